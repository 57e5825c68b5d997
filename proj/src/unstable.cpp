#include "r1kit/unstable.hpp"

#include "r1kit/polynomial.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace r1kit::unstable {

// ---- TruncatedModule -----------------------------------------------------

TruncatedModule::TruncatedModule(std::string name, int top, std::vector<std::size_t> dims)
    : name_(std::move(name)), top_(top), dims_(std::move(dims))
{
    if (top_ < 0)
        throw std::invalid_argument("TruncatedModule: negative top degree");
    if (dims_.size() != static_cast<std::size_t>(top_) + 1)
        throw std::invalid_argument("TruncatedModule: expected " + std::to_string(top_ + 1) + " dimensions, got " +
                                    std::to_string(dims_.size()));
    action_.resize(dims_.size());
    labels_.resize(dims_.size());
    for (int n = 0; n <= top_; ++n) {
        for (int i = 1; n + i <= top_; ++i)
            action_[n].emplace_back(dims_[n + i], dims_[n]);
        for (std::size_t j = 0; j < dims_[n]; ++j)
            labels_[n].push_back("b" + std::to_string(n) + "_" + std::to_string(j));
    }
}

std::size_t TruncatedModule::dim(int n) const
{
    if (n < 0 || n > top_)
        return 0;
    return dims_[static_cast<std::size_t>(n)];
}

std::size_t TruncatedModule::total_dim() const
{
    std::size_t s = 0;
    for (auto d : dims_)
        s += d;
    return s;
}

void TruncatedModule::check_op(int i, int n) const
{
    if (i < 1 || n < 0 || n + i > top_)
        throw std::out_of_range(name_ + ": Sq^" + std::to_string(i) + " on degree " + std::to_string(n) +
                                " is outside the truncation (top " + std::to_string(top_) + ")");
}

const BitMatrix& TruncatedModule::sq(int i, int n) const
{
    check_op(i, n);
    return action_[n][i - 1];
}

void TruncatedModule::set_sq(int i, int n, BitMatrix m)
{
    check_op(i, n);
    if (m.rows() != dim(n + i) || m.cols() != dim(n))
        throw std::invalid_argument(name_ + ": Sq^" + std::to_string(i) + " on degree " + std::to_string(n) +
                                    " must be " + std::to_string(dim(n + i)) + "x" + std::to_string(dim(n)));
    action_[n][i - 1] = std::move(m);
}

BitMatrix TruncatedModule::op(int i, int n) const
{
    if (i == 0) {
        if (n < 0 || n > top_)
            throw std::out_of_range(name_ + ": degree " + std::to_string(n) + " outside the truncation");
        return BitMatrix::identity(dim(n));
    }
    return sq(i, n);
}

BitMatrix TruncatedModule::apply(const steenrod::SqWord& w, int n) const
{
    BitMatrix m = op(0, n);
    int d = n;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        m = sq(*it, d) * m;
        d += *it;
    }
    return m;
}

const std::string& TruncatedModule::label(int n, std::size_t j) const { return labels_.at(n).at(j); }

const std::vector<std::string>& TruncatedModule::labels(int n) const { return labels_.at(n); }

void TruncatedModule::set_labels(int n, std::vector<std::string> labels)
{
    if (labels.size() != dim(n))
        throw std::invalid_argument(name_ + ": wrong number of labels in degree " + std::to_string(n));
    labels_.at(n) = std::move(labels);
}

// ---- validation ----------------------------------------------------------

std::string ValidationReport::to_string() const
{
    std::ostringstream os;
    for (const auto& v : violations)
        os << v.kind << " violation at degree " << v.degree << ": " << v.detail << "\n";
    return os.str();
}

namespace {

// ": at x, the difference is y" for the first basis element x where d is nonzero.
std::string first_column_witness(const TruncatedModule& m, const BitMatrix& d, int n, int target)
{
    for (std::size_t j = 0; j < d.cols(); ++j) {
        const BitVector c = d.column(j);
        if (!c.is_zero())
            return ": at " + m.label(n, j) + " the discrepancy is " + describe(m, target, c);
    }
    return "";
}

}  // namespace

ValidationReport validate(const TruncatedModule& m)
{
    ValidationReport report;
    const int top = m.top();
    for (int n = 0; n <= top; ++n)
        for (int i = n + 1; n + i <= top; ++i)
            if (!m.sq(i, n).is_zero())
                report.violations.push_back({"instability", n,
                                             "Sq^" + std::to_string(i) + " nonzero on degree " + std::to_string(n) +
                                                 " (i=" + std::to_string(i) + ", n=" + std::to_string(n) + ")" +
                                                 first_column_witness(m, m.sq(i, n), n, n + i)});
    for (int b = 1; b <= top; ++b)
        for (int a = 1; a < 2 * b && a + b <= top; ++a)
            for (int n = 0; n + a + b <= top; ++n) {
                BitMatrix lhs = m.sq(a, n + b) * m.sq(b, n);
                BitMatrix rhs(m.dim(n + a + b), m.dim(n));
                for (const auto& term : steenrod::adem_normal_form({a, b}))
                    rhs += m.apply(term.factors(), n);
                if (!(lhs == rhs))
                    report.violations.push_back({"adem", n,
                                                 "Sq^" + std::to_string(a) + "Sq^" + std::to_string(b) +
                                                     " disagrees with its admissible expansion on degree " +
                                                     std::to_string(n) +
                                                     first_column_witness(m, lhs + rhs, n, n + a + b)});
            }
    return report;
}

void assert_valid(const TruncatedModule& m)
{
    auto report = validate(m);
    if (!report.ok())
        throw std::logic_error(m.name() + " is not an unstable module:\n" + report.to_string());
}

// ---- maps ----------------------------------------------------------------

GradedLinearMap make_linear_map(ModuleRef source, ModuleRef target, std::vector<BitMatrix> f)
{
    const int top = std::min(source->top(), target->top());
    if (f.size() != static_cast<std::size_t>(top) + 1)
        throw std::invalid_argument("map " + source->name() + " -> " + target->name() + ": expected " +
                                    std::to_string(top + 1) + " components");
    for (int n = 0; n <= top; ++n)
        if (f[n].rows() != target->dim(n) || f[n].cols() != source->dim(n))
            throw std::invalid_argument("map " + source->name() + " -> " + target->name() + ": degree " +
                                        std::to_string(n) + " has the wrong shape");
    return {std::move(source), std::move(target), std::move(f)};
}

std::vector<Violation> linearity_violations(const GradedLinearMap& f)
{
    std::vector<Violation> out;
    const int top = f.top();
    for (int n = 0; n <= top; ++n)
        for (int i = 1; n + i <= top; ++i)
            if (!(f[n + i] * f.source->sq(i, n) == f.target->sq(i, n) * f[n]))
                out.push_back({"linearity", n,
                               "f Sq^" + std::to_string(i) + " != Sq^" + std::to_string(i) + " f on degree " +
                                   std::to_string(n)});
    return out;
}

ModuleMap make_map(ModuleRef source, ModuleRef target, std::vector<BitMatrix> f)
{
    ModuleMap m{make_linear_map(std::move(source), std::move(target), std::move(f))};
    auto bad = linearity_violations(m);
    if (!bad.empty())
        throw std::invalid_argument("map " + m.source->name() + " -> " + m.target->name() +
                                    " is not A-linear: " + bad.front().detail);
    return m;
}

ModuleMap zero_map(ModuleRef source, ModuleRef target)
{
    const int top = std::min(source->top(), target->top());
    std::vector<BitMatrix> f;
    for (int n = 0; n <= top; ++n)
        f.emplace_back(target->dim(n), source->dim(n));
    return ModuleMap{{std::move(source), std::move(target), std::move(f)}};
}

ModuleMap identity_map(ModuleRef m)
{
    std::vector<BitMatrix> f;
    for (int n = 0; n <= m->top(); ++n)
        f.push_back(BitMatrix::identity(m->dim(n)));
    return ModuleMap{{m, m, std::move(f)}};
}

ModuleMap compose(const ModuleMap& g, const ModuleMap& f)
{
    const int top = std::min(f.top(), g.top());
    std::vector<BitMatrix> h;
    for (int n = 0; n <= top; ++n) {
        if (g[n].cols() != f[n].rows())
            throw std::invalid_argument("compose: " + f.target->name() + " and " + g.source->name() +
                                        " differ in degree " + std::to_string(n));
        h.push_back(g[n] * f[n]);
    }
    ModuleRef src = f.source;
    if (src->top() > top)
        src = truncate(src, top);
    ModuleRef tgt = g.target;
    if (tgt->top() > top)
        tgt = truncate(tgt, top);
    return ModuleMap{{src, tgt, std::move(h)}};
}

ModuleMap add(const ModuleMap& f, const ModuleMap& g)
{
    if (f.top() != g.top())
        throw std::invalid_argument("add: maps have different truncations");
    ModuleMap h = f;
    for (int n = 0; n <= f.top(); ++n)
        h.f[n] += g[n];
    return h;
}

std::optional<int> first_non_injective_degree(const GradedLinearMap& f)
{
    for (int n = 0; n <= f.top(); ++n)
        if (f2::rank(f[n]) != f[n].cols())
            return n;
    return std::nullopt;
}

std::optional<int> first_non_surjective_degree(const GradedLinearMap& f)
{
    for (int n = 0; n <= f.top(); ++n)
        if (f2::rank(f[n]) != f[n].rows())
            return n;
    return std::nullopt;
}

bool is_zero(const GradedLinearMap& f)
{
    return std::all_of(f.f.begin(), f.f.end(), [](const BitMatrix& m) { return m.is_zero(); });
}

// ---- constructors --------------------------------------------------------

ModuleRef zero_module(int top)
{
    return std::make_shared<const TruncatedModule>("0", top, std::vector<std::size_t>(top + 1, 0));
}

ModuleRef ground_field(int top)
{
    std::vector<std::size_t> dims(top + 1, 0);
    dims[0] = 1;
    auto m = std::make_shared<TruncatedModule>("F", top, dims);
    m->set_labels(0, {"1"});
    return m;
}

ModuleRef free_unstable(int n, int top)
{
    if (n < 0)
        throw std::invalid_argument("free_unstable: negative generator degree");
    std::vector<std::size_t> dims(top + 1, 0);
    std::vector<std::vector<steenrod::AdmissibleMonomial>> basis(top + 1);
    std::vector<std::map<steenrod::AdmissibleMonomial, std::size_t>> index(top + 1);
    for (int d = n; d <= top; ++d) {
        basis[d] = steenrod::admissible_basis(d - n, n);
        dims[d] = basis[d].size();
        for (std::size_t j = 0; j < basis[d].size(); ++j)
            index[d].emplace(basis[d][j], j);
    }
    auto m = std::make_shared<TruncatedModule>("F(" + std::to_string(n) + ")", top, dims);
    const std::string gen = "i" + std::to_string(n);
    for (int d = n; d <= top; ++d) {
        std::vector<std::string> labels;
        for (const auto& b : basis[d])
            labels.push_back(b.length() == 0 ? gen : b.to_string() + gen);
        m->set_labels(d, std::move(labels));
    }
    for (int d = n; d <= top; ++d)
        for (int i = 1; d + i <= top; ++i) {
            BitMatrix a(dims[d + i], dims[d]);
            for (std::size_t j = 0; j < basis[d].size(); ++j) {
                steenrod::SqWord w{i};
                const auto& f = basis[d][j].factors();
                w.insert(w.end(), f.begin(), f.end());
                for (const auto& term : steenrod::adem_normal_form(w))
                    if (term.excess() <= n)
                        a.flip(index[d + i].at(term), j);
            }
            m->set_sq(i, d, std::move(a));
        }
    return m;
}

ModuleMap map_from_free(const ModuleRef& fn, int n, const ModuleRef& target, const BitVector& x)
{
    if (x.size() != target->dim(n))
        throw std::invalid_argument("map_from_free: element has the wrong degree");
    const int top = std::min(fn->top(), target->top());
    std::vector<BitMatrix> f;
    for (int d = 0; d <= top; ++d) {
        BitMatrix m(target->dim(d), fn->dim(d));
        if (d >= n) {
            const auto basis = steenrod::admissible_basis(d - n, n);
            if (basis.size() != fn->dim(d))
                throw std::invalid_argument("map_from_free: source is not F(" + std::to_string(n) + ")");
            for (std::size_t j = 0; j < basis.size(); ++j)
                m.set_column(j, target->apply(basis[j].factors(), n) * x);
        }
        f.push_back(std::move(m));
    }
    return make_map(fn, target, std::move(f));
}

namespace {

// Sq^k t^a = sum over k_1 + ... + k_r = k of prod binom(a_i, k_i) t^{a + k}.
void cartan_monomials(const poly::Exponents& a, int k, std::size_t var, poly::Exponents& cur,
                      std::vector<poly::Exponents>& out)
{
    if (var == a.size()) {
        if (k == 0)
            out.push_back(cur);
        return;
    }
    for (int ki = 0; ki <= std::min(k, a[var]); ++ki) {
        if ((a[var] & ki) != ki)
            continue;
        cur[var] = a[var] + ki;
        cartan_monomials(a, k - ki, var + 1, cur, out);
    }
    cur[var] = a[var];
}

}  // namespace

ModuleRef polynomial_module(int rank, int top)
{
    if (rank < 0)
        throw std::invalid_argument("polynomial_module: negative rank");
    std::vector<std::size_t> dims(top + 1);
    for (int d = 0; d <= top; ++d)
        dims[d] = poly::monomial_count(rank, d);
    std::string name = rank == 1 ? "H*(Z/2)" : "H*((Z/2)^" + std::to_string(rank) + ")";
    auto m = std::make_shared<TruncatedModule>(name, top, dims);
    for (int d = 0; d <= top; ++d) {
        std::vector<std::string> labels;
        for (const auto& e : poly::monomials(rank, d))
            labels.push_back(poly::monomial_label(e));
        m->set_labels(d, std::move(labels));
    }
    for (int d = 0; d <= top; ++d)
        for (int k = 1; k <= d && d + k <= top; ++k) {
            BitMatrix a(dims[d + k], dims[d]);
            const auto& mons = poly::monomials(rank, d);
            for (std::size_t j = 0; j < mons.size(); ++j) {
                std::vector<poly::Exponents> out;
                poly::Exponents cur = mons[j];
                cartan_monomials(mons[j], k, 0, cur, out);
                for (const auto& e : out)
                    a.flip(poly::monomial_index(e), j);
            }
            m->set_sq(k, d, std::move(a));
        }
    return m;
}

ModuleRef suspend(const ModuleRef& m, int s)
{
    if (s < 0)
        throw std::invalid_argument("suspend: negative shift");
    const int top = m->top() + s;
    std::vector<std::size_t> dims(top + 1, 0);
    for (int n = 0; n <= m->top(); ++n)
        dims[n + s] = m->dim(n);
    const std::string prefix = s == 1 ? "Σ" : "Σ^" + std::to_string(s);
    auto out = std::make_shared<TruncatedModule>(prefix + m->name(), top, dims);
    const std::string lp = s == 1 ? "σ" : "σ^" + std::to_string(s);
    for (int n = 0; n <= m->top(); ++n) {
        std::vector<std::string> labels;
        for (const auto& l : m->labels(n))
            labels.push_back(lp + l);
        out->set_labels(n + s, std::move(labels));
        for (int i = 1; n + i <= m->top(); ++i)
            out->set_sq(i, n + s, m->sq(i, n));
    }
    return out;
}

namespace {

std::string strip_prefix(const std::string& s, const std::string& p)
{
    return s.rfind(p, 0) == 0 ? s.substr(p.size()) : s;
}

}  // namespace

ModuleRef desuspend(const ModuleRef& m)
{
    if (m->top() < 1)
        throw NotASuspension(0, "desuspend: " + m->name() + " has no positive degrees");
    if (m->dim(0) != 0)
        throw NotASuspension(0, "desuspend: " + m->name() + " is nonzero in degree 0");
    for (int n = 1; 2 * n <= m->top(); ++n)
        if (!m->sq(n, n).is_zero())
            throw NotASuspension(n, "desuspend: Sq^" + std::to_string(n) + " is nonzero on degree " +
                                        std::to_string(n) + " of " + m->name());
    const int top = m->top() - 1;
    std::vector<std::size_t> dims(top + 1);
    for (int n = 0; n <= top; ++n)
        dims[n] = m->dim(n + 1);
    auto out = std::make_shared<TruncatedModule>("Σ^-1 " + m->name(), top, dims);
    for (int n = 0; n <= top; ++n) {
        std::vector<std::string> labels;
        for (const auto& l : m->labels(n + 1))
            labels.push_back(strip_prefix(l, "σ"));
        out->set_labels(n, std::move(labels));
        for (int i = 1; n + i <= top; ++i)
            out->set_sq(i, n, m->sq(i, n + 1));
    }
    return out;
}

ModuleRef phi(const ModuleRef& m)
{
    const int top = m->top();
    std::vector<std::size_t> dims(top + 1, 0);
    for (int n = 0; 2 * n <= top; ++n)
        dims[2 * n] = m->dim(n);
    auto out = std::make_shared<TruncatedModule>("Φ" + m->name(), top, dims);
    for (int n = 0; 2 * n <= top; ++n) {
        std::vector<std::string> labels;
        for (const auto& l : m->labels(n))
            labels.push_back("Φ" + l);
        out->set_labels(2 * n, std::move(labels));
        for (int i = 1; 2 * (n + i) <= top; ++i)
            out->set_sq(2 * i, 2 * n, m->sq(i, n));
    }
    return out;
}

ModuleMap sq0(const ModuleRef& m, const ModuleRef& phi_m)
{
    if (phi_m->top() != m->top())
        throw std::invalid_argument("sq0: truncations differ");
    std::vector<BitMatrix> f;
    for (int d = 0; d <= m->top(); ++d) {
        if (d % 2 == 1)
            f.emplace_back(m->dim(d), 0);
        else
            f.push_back(m->op(d / 2, d / 2));
    }
    return ModuleMap{make_linear_map(phi_m, m, std::move(f))};
}

ModuleMap sq0(const ModuleRef& m) { return sq0(m, phi(m)); }

std::size_t TensorLayout::offset(int n, int a) const
{
    std::size_t off = 0;
    for (int b = 0; b < a; ++b)
        off += left->dim(b) * right->dim(n - b);
    return off;
}

std::size_t TensorLayout::index(int n, int a, std::size_t i, std::size_t j) const
{
    return offset(n, a) + i * right->dim(n - a) + j;
}

ModuleRef tensor(const ModuleRef& m, const ModuleRef& n)
{
    const int top = std::min(m->top(), n->top());
    TensorLayout lay{m.get(), n.get()};
    std::vector<std::size_t> dims(top + 1);
    for (int d = 0; d <= top; ++d)
        dims[d] = lay.offset(d, d + 1);
    auto out = std::make_shared<TruncatedModule>(m->name() + "⊗" + n->name(), top, dims);
    for (int d = 0; d <= top; ++d) {
        std::vector<std::string> labels;
        for (int a = 0; a <= d; ++a)
            for (const auto& x : m->labels(a))
                for (const auto& y : n->labels(d - a))
                    labels.push_back(x + "⊗" + y);
        out->set_labels(d, std::move(labels));
    }
    for (int d = 0; d <= top; ++d)
        for (int k = 1; d + k <= top; ++k) {
            BitMatrix s(dims[d + k], dims[d]);
            for (int a = 0; a <= d; ++a) {
                const int b = d - a;
                if (m->dim(a) == 0 || n->dim(b) == 0)
                    continue;
                for (int i = 0; i <= k; ++i) {
                    if (i > a || k - i > b)
                        continue;
                    const BitMatrix x = m->op(i, a);
                    const BitMatrix y = n->op(k - i, b);
                    if (x.is_zero() || y.is_zero())
                        continue;
                    std::vector<std::pair<std::size_t, std::size_t>> ys;
                    for (std::size_t r = 0; r < y.rows(); ++r)
                        for (std::size_t c = 0; c < y.cols(); ++c)
                            if (y.get(r, c))
                                ys.emplace_back(r, c);
                    for (std::size_t r = 0; r < x.rows(); ++r)
                        for (std::size_t c = 0; c < x.cols(); ++c)
                            if (x.get(r, c))
                                for (auto [r2, c2] : ys)
                                    s.flip(lay.index(d + k, a + i, r, r2), lay.index(d, a, c, c2));
                }
            }
            out->set_sq(k, d, std::move(s));
        }
    return out;
}

ModuleRef direct_sum(const std::vector<ModuleRef>& parts, std::string name)
{
    if (parts.empty())
        throw std::invalid_argument("direct_sum: no summands");
    int top = parts.front()->top();
    for (const auto& p : parts)
        top = std::min(top, p->top());
    if (name.empty()) {
        for (std::size_t k = 0; k < parts.size(); ++k)
            name += (k ? "⊕" : "") + parts[k]->name();
    }
    std::vector<std::size_t> dims(top + 1, 0);
    for (int d = 0; d <= top; ++d)
        for (const auto& p : parts)
            dims[d] += p->dim(d);
    auto out = std::make_shared<TruncatedModule>(name, top, dims);
    for (int d = 0; d <= top; ++d) {
        std::vector<std::string> labels;
        for (const auto& p : parts)
            labels.insert(labels.end(), p->labels(d).begin(), p->labels(d).end());
        out->set_labels(d, std::move(labels));
        for (int i = 1; d + i <= top; ++i) {
            BitMatrix s(dims[d + i], dims[d]);
            std::size_t r0 = 0, c0 = 0;
            for (const auto& p : parts) {
                s.add_block(r0, c0, p->sq(i, d));
                r0 += p->dim(d + i);
                c0 += p->dim(d);
            }
            out->set_sq(i, d, std::move(s));
        }
    }
    return out;
}

ModuleRef truncate(const ModuleRef& m, int top)
{
    if (top > m->top() || top < 0)
        throw std::invalid_argument("truncate: cannot raise or negate the top degree");
    if (top == m->top())
        return m;
    std::vector<std::size_t> dims(m->dims().begin(), m->dims().begin() + top + 1);
    auto out = std::make_shared<TruncatedModule>(m->name(), top, dims);
    for (int d = 0; d <= top; ++d) {
        out->set_labels(d, m->labels(d));
        for (int i = 1; d + i <= top; ++i)
            out->set_sq(i, d, m->sq(i, d));
    }
    return out;
}

ModuleRef with_name(const ModuleRef& m, std::string name)
{
    auto out = std::make_shared<TruncatedModule>(*m);
    out->set_name(std::move(name));
    return out;
}

ModuleMap swap_map(const ModuleRef& m, const ModuleRef& mm)
{
    TensorLayout lay{m.get(), m.get()};
    std::vector<BitMatrix> f;
    for (int d = 0; d <= mm->top(); ++d) {
        BitMatrix s(mm->dim(d), mm->dim(d));
        for (int a = 0; a <= d; ++a)
            for (std::size_t i = 0; i < m->dim(a); ++i)
                for (std::size_t j = 0; j < m->dim(d - a); ++j)
                    s.set(lay.index(d, d - a, j, i), lay.index(d, a, i, j));
        f.push_back(std::move(s));
    }
    return make_map(mm, mm, std::move(f));
}

ModuleMap sum_inclusion(const ModuleRef& sum, const std::vector<ModuleRef>& parts, std::size_t k)
{
    std::vector<BitMatrix> f;
    const int top = std::min(sum->top(), parts.at(k)->top());
    for (int d = 0; d <= top; ++d) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < k; ++p)
            off += parts[p]->dim(d);
        BitMatrix m(sum->dim(d), parts[k]->dim(d));
        m.add_block(off, 0, BitMatrix::identity(parts[k]->dim(d)));
        f.push_back(std::move(m));
    }
    return make_map(parts[k], sum, std::move(f));
}

ModuleMap sum_projection(const ModuleRef& sum, const std::vector<ModuleRef>& parts, std::size_t k)
{
    std::vector<BitMatrix> f;
    const int top = std::min(sum->top(), parts.at(k)->top());
    for (int d = 0; d <= top; ++d) {
        std::size_t off = 0;
        for (std::size_t p = 0; p < k; ++p)
            off += parts[p]->dim(d);
        BitMatrix m(parts[k]->dim(d), sum->dim(d));
        m.add_block(0, off, BitMatrix::identity(parts[k]->dim(d)));
        f.push_back(std::move(m));
    }
    return make_map(sum, parts[k], std::move(f));
}

// ---- subquotients --------------------------------------------------------

BitVector Submodule::coordinates(int n, const BitVector& v) const
{
    auto c = basis.at(static_cast<std::size_t>(n)).coordinates(v);
    if (!c)
        throw std::invalid_argument("vector in degree " + std::to_string(n) + " does not lie in " + module->name());
    return *c;
}

BitVector QuotientModule::lift(int n, const BitVector& coords) const
{
    BitVector v(ambient->dim(n));
    for (auto j : coords.support())
        v.set(lifts.at(n).at(j));
    return v;
}

std::string describe(const TruncatedModule& m, int n, const BitVector& v)
{
    std::string s;
    for (auto j : v.support())
        s += (s.empty() ? "" : "+") + m.label(n, j);
    return s.empty() ? "0" : s;
}

Submodule submodule_with_basis(const ModuleRef& ambient, std::vector<f2::Basis> basis, std::string name,
                               std::vector<std::vector<std::string>> labels)
{
    const int top = ambient->top();
    if (basis.size() != static_cast<std::size_t>(top) + 1)
        throw std::invalid_argument("submodule: expected one basis per degree");
    std::vector<std::size_t> dims(top + 1);
    for (int d = 0; d <= top; ++d) {
        if (basis[d].ambient_dim() != ambient->dim(d))
            throw std::invalid_argument("submodule: basis in degree " + std::to_string(d) + " has the wrong ambient");
        dims[d] = basis[d].size();
    }
    if (name.empty())
        name = "sub(" + ambient->name() + ")";
    auto m = std::make_shared<TruncatedModule>(name, top, dims);
    for (int d = 0; d <= top; ++d) {
        if (labels.empty()) {
            std::vector<std::string> ls;
            for (const auto& v : basis[d].vectors())
                ls.push_back(describe(*ambient, d, v));
            m->set_labels(d, std::move(ls));
        } else {
            m->set_labels(d, std::move(labels.at(d)));
        }
        for (int i = 1; d + i <= top; ++i) {
            BitMatrix s(dims[d + i], dims[d]);
            const BitMatrix& a = ambient->sq(i, d);
            for (std::size_t j = 0; j < dims[d]; ++j) {
                auto c = basis[d + i].coordinates(a * basis[d][j]);
                if (!c)
                    throw std::invalid_argument("submodule of " + ambient->name() + " is not stable under Sq^" +
                                                std::to_string(i) + " on degree " + std::to_string(d));
                s.set_column(j, *c);
            }
            m->set_sq(i, d, std::move(s));
        }
    }
    std::vector<BitMatrix> inc;
    for (int d = 0; d <= top; ++d)
        inc.push_back(dims[d] ? basis[d].as_columns() : BitMatrix(ambient->dim(d), 0));
    ModuleRef mref = m;
    ModuleMap inclusion{make_linear_map(mref, ambient, std::move(inc))};
    return Submodule{mref, ambient, std::move(basis), std::move(inclusion)};
}

Submodule submodule(const ModuleRef& ambient, const std::vector<Subspace>& spaces, std::string name)
{
    std::vector<f2::Basis> basis;
    for (int d = 0; d <= ambient->top(); ++d) {
        const Subspace& s = spaces.at(d);
        std::vector<BitVector> vs;
        for (std::size_t j = 0; j < s.dim(); ++j)
            vs.push_back(s.basis_vector(j));
        basis.emplace_back(ambient->dim(d), std::move(vs));
    }
    return submodule_with_basis(ambient, std::move(basis), std::move(name));
}

QuotientModule quotient(const ModuleRef& ambient, const std::vector<Subspace>& spaces, std::string name)
{
    const int top = ambient->top();
    std::vector<Subspace> kernel(spaces.begin(), spaces.begin() + top + 1);
    std::vector<std::vector<std::size_t>> lifts(top + 1);
    std::vector<std::size_t> dims(top + 1);
    std::vector<BitMatrix> proj;
    for (int d = 0; d <= top; ++d) {
        if (kernel[d].ambient_dim() != ambient->dim(d))
            throw std::invalid_argument("quotient: subspace in degree " + std::to_string(d) + " has the wrong ambient");
        lifts[d] = kernel[d].complement_indices();
        dims[d] = lifts[d].size();
        BitMatrix p(dims[d], ambient->dim(d));
        for (std::size_t j = 0; j < ambient->dim(d); ++j) {
            BitVector r = kernel[d].reduce(BitVector::unit(ambient->dim(d), j));
            for (std::size_t c = 0; c < dims[d]; ++c)
                if (r.get(lifts[d][c]))
                    p.set(c, j);
        }
        proj.push_back(std::move(p));
    }
    if (name.empty())
        name = ambient->name() + "/sub";
    auto m = std::make_shared<TruncatedModule>(name, top, dims);
    for (int d = 0; d <= top; ++d) {
        std::vector<std::string> labels;
        for (auto j : lifts[d])
            labels.push_back(ambient->label(d, j));
        m->set_labels(d, std::move(labels));
        for (int i = 1; d + i <= top; ++i) {
            const BitMatrix& a = ambient->sq(i, d);
            for (std::size_t j = 0; j < kernel[d].dim(); ++j)
                if (!kernel[d + i].contains(a * kernel[d].basis_vector(j)))
                    throw std::invalid_argument("quotient of " + ambient->name() + ": subspace not stable under Sq^" +
                                                std::to_string(i) + " on degree " + std::to_string(d));
            BitMatrix s(dims[d + i], dims[d]);
            for (std::size_t c = 0; c < dims[d]; ++c)
                s.set_column(c, proj[d + i] * a.column(lifts[d][c]));
            m->set_sq(i, d, std::move(s));
        }
    }
    ModuleRef mref = m;
    ModuleMap projection{make_linear_map(ambient, mref, std::move(proj))};
    return QuotientModule{mref, ambient, std::move(kernel), std::move(lifts), std::move(projection)};
}

namespace {

ModuleRef source_at(const GradedLinearMap& f) { return truncate(f.source, f.top()); }
ModuleRef target_at(const GradedLinearMap& f) { return truncate(f.target, f.top()); }

void require_linear(const ModuleMap& f, const char* what)
{
    auto bad = linearity_violations(f);
    if (!bad.empty())
        throw std::invalid_argument(std::string(what) + ": map is not A-linear: " + bad.front().detail);
}

}  // namespace

Submodule kernel(const ModuleMap& f, std::string name)
{
    std::vector<Subspace> spaces;
    for (int d = 0; d <= f.top(); ++d)
        spaces.push_back(f2::kernel_basis(f[d]));
    if (name.empty())
        name = "ker(" + f.source->name() + "→" + f.target->name() + ")";
    return submodule(source_at(f), spaces, std::move(name));
}

Submodule image(const ModuleMap& f, std::string name)
{
    std::vector<Subspace> spaces;
    for (int d = 0; d <= f.top(); ++d)
        spaces.push_back(f2::image(f[d]));
    if (name.empty())
        name = "im(" + f.source->name() + "→" + f.target->name() + ")";
    return submodule(target_at(f), spaces, std::move(name));
}

QuotientModule cokernel(const ModuleMap& f, std::string name)
{
    std::vector<Subspace> spaces;
    for (int d = 0; d <= f.top(); ++d)
        spaces.push_back(f2::image(f[d]));
    if (name.empty())
        name = "coker(" + f.source->name() + "→" + f.target->name() + ")";
    return quotient(target_at(f), spaces, std::move(name));
}

ModuleMap corestrict(const ModuleMap& f, const Submodule& target)
{
    std::vector<BitMatrix> g;
    const int top = std::min(f.top(), target.module->top());
    for (int d = 0; d <= top; ++d) {
        BitMatrix m(target.module->dim(d), f[d].cols());
        for (std::size_t j = 0; j < f[d].cols(); ++j)
            m.set_column(j, target.coordinates(d, f[d].column(j)));
        g.push_back(std::move(m));
    }
    ModuleRef src = truncate(f.source, top);
    return ModuleMap{make_linear_map(src, target.module, std::move(g))};
}

ModuleMap factor_through(const ModuleMap& f, const QuotientModule& source)
{
    std::vector<BitMatrix> g;
    const int top = std::min(f.top(), source.module->top());
    for (int d = 0; d <= top; ++d) {
        for (std::size_t j = 0; j < source.kernel[d].dim(); ++j)
            if (!(f[d] * source.kernel[d].basis_vector(j)).is_zero())
                throw std::invalid_argument("factor_through: map does not vanish on the kernel in degree " +
                                            std::to_string(d));
        BitMatrix m(f[d].rows(), source.module->dim(d));
        for (std::size_t c = 0; c < source.lifts[d].size(); ++c)
            m.set_column(c, f[d].column(source.lifts[d][c]));
        g.push_back(std::move(m));
    }
    ModuleRef tgt = truncate(f.target, top);
    return ModuleMap{make_linear_map(source.module, tgt, std::move(g))};
}

ModuleMap restrict_map(const ModuleMap& f, const Submodule& source, const Submodule& target)
{
    std::vector<BitMatrix> g;
    const int top = std::min({f.top(), source.module->top(), target.module->top()});
    for (int d = 0; d <= top; ++d) {
        BitMatrix m(target.module->dim(d), source.module->dim(d));
        for (std::size_t j = 0; j < source.basis[d].size(); ++j)
            m.set_column(j, target.coordinates(d, f[d] * source.basis[d][j]));
        g.push_back(std::move(m));
    }
    return ModuleMap{make_linear_map(source.module, target.module, std::move(g))};
}

ModuleMap induced_map(const ModuleMap& f, const QuotientModule& source, const QuotientModule& target)
{
    std::vector<BitMatrix> g;
    const int top = std::min({f.top(), source.module->top(), target.module->top()});
    for (int d = 0; d <= top; ++d) {
        for (std::size_t j = 0; j < source.kernel[d].dim(); ++j)
            if (!target.kernel[d].contains(f[d] * source.kernel[d].basis_vector(j)))
                throw std::invalid_argument("induced_map: kernel not preserved in degree " + std::to_string(d));
        BitMatrix m(target.module->dim(d), source.module->dim(d));
        for (std::size_t c = 0; c < source.lifts[d].size(); ++c)
            m.set_column(c, target.projection[d] * f[d].column(source.lifts[d][c]));
        g.push_back(std::move(m));
    }
    return ModuleMap{make_linear_map(source.module, target.module, std::move(g))};
}

std::optional<int> exactness_failure(const GradedLinearMap& f, const GradedLinearMap& g, int up_to)
{
    for (int d = 0; d <= up_to; ++d) {
        if (d > f.top() || d > g.top())
            return d;
        if (!(g[d] * f[d]).is_zero())
            return d;
        if (f2::rank(f[d]) + f2::rank(g[d]) != f[d].rows())
            return d;
    }
    return std::nullopt;
}

Subquotients subquotient(const ModuleMap& f)
{
    require_linear(f, "subquotient");
    Submodule ker = kernel(f);
    Submodule im = image(f);
    QuotientModule coker = cokernel(f);
    ModuleMap core = corestrict(f, im);
    const int top = f.top();
    if (first_non_injective_degree(ker.inclusion) || first_non_surjective_degree(core) ||
        exactness_failure(ker.inclusion, f, top) || first_non_injective_degree(im.inclusion) ||
        first_non_surjective_degree(coker.projection) || exactness_failure(im.inclusion, coker.projection, top))
        throw std::logic_error("subquotient: exactness re-verification failed");
    return Subquotients{std::move(ker), std::move(im), std::move(coker), std::move(core)};
}

// ---- loop functors -------------------------------------------------------

FourTermOmega omega(const ModuleRef& m)
{
    if (m->top() < 2)
        throw std::invalid_argument("omega: top degree must be at least 2");
    FourTermOmega out;
    out.module = m;
    out.phi_module = phi(m);
    out.sq0 = sq0(m, out.phi_module);
    require_linear(out.sq0, "omega");
    out.sq0_kernel = kernel(out.sq0, "ΣΩ₁" + m->name());
    out.sq0_cokernel = cokernel(out.sq0, "ΣΩ" + m->name());
    try {
        out.omega = with_name(desuspend(out.sq0_cokernel.module), "Ω" + m->name());
        out.omega1 = with_name(desuspend(out.sq0_kernel.module), "Ω₁" + m->name());
    } catch (const NotASuspension& e) {
        throw std::logic_error(std::string("omega: ") + e.what());
    }
    out.certified = m->top();
    out.exact = true;
    const int top = m->top();
    if (auto d = first_non_injective_degree(out.sq0_kernel.inclusion)) {
        out.exact = false;
        out.witness = "kernel inclusion not injective in degree " + std::to_string(*d);
    } else if (auto d2 = exactness_failure(out.sq0_kernel.inclusion, out.sq0, top)) {
        out.exact = false;
        out.witness = "not exact at " + out.phi_module->name() + " in degree " + std::to_string(*d2);
    } else if (auto d3 = exactness_failure(out.sq0, out.sq0_cokernel.projection, top)) {
        out.exact = false;
        out.witness = "not exact at " + m->name() + " in degree " + std::to_string(*d3);
    } else if (auto d4 = first_non_surjective_degree(out.sq0_cokernel.projection)) {
        out.exact = false;
        out.witness = "cokernel projection not surjective in degree " + std::to_string(*d4);
    }
    return out;
}

ReducedVerdict is_reduced(const TruncatedModule& m, int up_to)
{
    if (up_to > m.top() / 2)
        throw std::invalid_argument("is_reduced: degree " + std::to_string(up_to) + " exceeds top/2 = " +
                                    std::to_string(m.top() / 2));
    ReducedVerdict v;
    v.certified = up_to;
    for (int n = 0; n <= up_to; ++n) {
        const BitMatrix s = m.op(n, n);
        Subspace k = f2::kernel_basis(s);
        if (!k.is_zero()) {
            v.reduced = false;
            v.witness_degree = n;
            v.witness = "Sq^" + std::to_string(n) + " kills " + describe(m, n, k.basis_vector(0));
            return v;
        }
    }
    return v;
}

ReducedVerdict is_reduced(const TruncatedModule& m) { return is_reduced(m, m.top() / 2); }

// ---- symmetric tensors ---------------------------------------------------

Submodule symmetric_invariants(const ModuleRef& m, const ModuleRef& mm)
{
    ModuleMap s = add(swap_map(m, mm), identity_map(mm));
    return kernel(s, "(" + mm->name() + ")^S2");
}

ModuleMap diagonal_map(const ModuleRef& m, const ModuleRef& mm, const Submodule& invariants, const ModuleRef& phi_m)
{
    TensorLayout lay{m.get(), m.get()};
    std::vector<BitMatrix> f;
    const int top = std::min(invariants.module->top(), phi_m->top());
    for (int d = 0; d <= top; ++d) {
        BitMatrix g(phi_m->dim(d), invariants.module->dim(d));
        if (d % 2 == 0) {
            const int k = d / 2;
            for (std::size_t c = 0; c < invariants.basis[d].size(); ++c)
                for (std::size_t j = 0; j < m->dim(k); ++j)
                    if (invariants.basis[d][c].get(lay.index(d, k, j, j)))
                        g.set(j, c);
        }
        f.push_back(std::move(g));
    }
    (void)mm;
    return make_map(invariants.module, phi_m, std::move(f));
}

SymLambda sym_lambda(int top)
{
    SymLambda out;
    out.f1 = free_unstable(1, top);
    out.f1_squared = tensor(out.f1, out.f1);
    out.f2 = free_unstable(2, top);
    out.phi_f1 = phi(out.f1);
    out.invariants = symmetric_invariants(out.f1, out.f1_squared);
    out.certified = top;

    TensorLayout lay{out.f1.get(), out.f1.get()};
    std::vector<BitMatrix> g;
    for (int d = 0; d <= top; ++d) {
        BitMatrix m(out.invariants.module->dim(d), out.f2->dim(d));
        if (d >= 2) {
            const auto basis = steenrod::admissible_basis(d - 2, 2);
            const BitVector gen = BitVector::unit(out.f1_squared->dim(2), lay.index(2, 1, 0, 0));
            for (std::size_t j = 0; j < basis.size(); ++j)
                m.set_column(j, out.invariants.coordinates(d, out.f1_squared->apply(basis[j].factors(), 2) * gen));
        }
        g.push_back(std::move(m));
    }
    out.f2_to_invariants = make_map(out.f2, out.invariants.module, std::move(g));
    out.iso_to_f2 = !first_non_injective_degree(out.f2_to_invariants) &&
                    !first_non_surjective_degree(out.f2_to_invariants);
    out.diag = diagonal_map(out.f1, out.f1_squared, out.invariants, out.phi_f1);
    out.lambda2 = kernel(out.diag, "Λ²F(1)");
    return out;
}

}  // namespace r1kit::unstable
