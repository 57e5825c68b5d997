#include "r1kit/lannes.hpp"

#include "r1kit/polynomial.hpp"
#include "r1kit/steenrod.hpp"

#include <stdexcept>

namespace r1kit::lannes {

using fulu::extended_offset;
using unstable::TruncatedModule;

namespace {

constexpr int max_hom_bits = 20;

HomCode hom_count(int rank, int w)
{
    if (rank * w > max_hom_bits)
        throw std::invalid_argument("T-expansion: Hom(W, V) too large (rank " + std::to_string(rank) + ", dim W " +
                                    std::to_string(w) + ")");
    return HomCode{1} << (rank * w);
}

HomCode coordinate(HomCode h, int rank, int i) { return (h >> (rank * i)) & ((HomCode{1} << rank) - 1); }

std::string component_prefix(HomCode h, int rank, int w)
{
    if (w == 0)
        return "";
    std::string s = "[";
    for (int i = 0; i < w; ++i)
        s += (i ? "," : "") + std::to_string(coordinate(h, rank, i));
    return s + "]";
}

ModuleRef realize_summand(const Summand& s, int top)
{
    if (s.suspension < 0 || s.rank < 0)
        throw std::invalid_argument("realm summand: negative suspension or rank");
    if (s.suspension > top)
        throw std::invalid_argument("realm summand: suspension " + std::to_string(s.suspension) +
                                    " exceeds top degree " + std::to_string(top));
    auto p = unstable::polynomial_module(s.rank, top - s.suspension);
    return s.suspension == 0 ? p : unstable::suspend(p, s.suspension);
}

// Position of ext(summand)^n basis vectors inside F[u] (x) (a sum containing the summand at `offset`).
std::vector<std::size_t> embedding(const TruncatedModule& part, const TruncatedModule& whole, int n,
                                   const std::function<std::size_t(int)>& offset)
{
    std::vector<std::size_t> out;
    for (int k = 0; k <= n; ++k) {
        const std::size_t base = extended_offset(whole, n, k) + offset(n - k);
        for (std::size_t i = 0; i < part.dim(n - k); ++i)
            out.push_back(base + i);
    }
    return out;
}

// Sum over c with c_i a sub-multiset (bitwise) of a_i, c_i = 0 where v_i = 0.
void substitutions(const poly::Exponents& a, std::uint64_t v, std::size_t i, poly::Exponents& rest, int lifted,
                   const std::function<void(const poly::Exponents&, int)>& emit)
{
    if (i == a.size()) {
        emit(rest, lifted);
        return;
    }
    if (!((v >> i) & 1)) {
        substitutions(a, v, i + 1, rest, lifted, emit);
        return;
    }
    const int ai = a[i];
    for (int c = ai;; c = (c - 1) & ai) {
        rest[i] = ai - c;
        substitutions(a, v, i + 1, rest, lifted + c, emit);
        if (c == 0)
            break;
    }
    rest[i] = ai;
}

}  // namespace

// ---- realm ---------------------------------------------------------------

RealmObject::RealmObject(std::vector<Summand> summands, int top) : summands_(std::move(summands)), top_(top)
{
    if (summands_.empty())
        throw std::invalid_argument("realm object: no summands");
    for (const auto& s : summands_)
        parts_.push_back(realize_summand(s, top));
    module_ = parts_.size() == 1 ? parts_.front() : unstable::direct_sum(parts_);
}

std::size_t RealmObject::offset(int n, std::size_t j) const
{
    std::size_t off = 0;
    for (std::size_t i = 0; i < j; ++i)
        off += parts_[i]->dim(n);
    return off;
}

// ---- T-expansions --------------------------------------------------------

TExpansion::TExpansion(const RealmObject& base, int w, Filter filter, std::string name) : base_(base), w_(w)
{
    std::vector<ModuleRef> parts;
    std::vector<std::string> prefixes;
    for (std::size_t j = 0; j < base.summands().size(); ++j) {
        const int rank = base.summands()[j].rank;
        const HomCode count = hom_count(rank, w);
        for (HomCode h = 0; h < count; ++h)
            if (!filter || filter(rank, h)) {
                components_.push_back({j, h});
                parts.push_back(base.summand_module(j));
                prefixes.push_back(component_prefix(h, rank, w));
            }
    }
    if (parts.empty()) {
        module_ = unstable::with_name(unstable::zero_module(base.top()), std::move(name));
        return;
    }
    auto m = std::make_shared<TruncatedModule>(*unstable::direct_sum(parts, std::move(name)));
    for (int n = 0; n <= m->top(); ++n) {
        std::vector<std::string> labels;
        for (std::size_t c = 0; c < parts.size(); ++c)
            for (const auto& l : parts[c]->labels(n))
                labels.push_back(prefixes[c] + l);
        m->set_labels(n, std::move(labels));
    }
    module_ = m;
}

std::size_t TExpansion::find(std::size_t summand, HomCode h) const
{
    for (std::size_t c = 0; c < components_.size(); ++c)
        if (components_[c].summand == summand && components_[c].h == h)
            return c;
    return npos;
}

std::size_t TExpansion::offset(int n, std::size_t component) const
{
    std::size_t off = 0;
    for (std::size_t c = 0; c < component; ++c)
        off += base_.summand_module(components_[c].summand)->dim(n);
    return off;
}

std::size_t TExpansion::component_count(std::size_t summand) const
{
    std::size_t k = 0;
    for (const auto& c : components_)
        k += c.summand == summand;
    return k;
}

TExpansion t_apply(const RealmObject& x, int w)
{
    const std::string prefix = w == 0 ? "" : w == 1 ? "T" : "T_{F^" + std::to_string(w) + "}";
    return TExpansion(x, w, nullptr, prefix + x.name());
}

TExpansion t_bar(const RealmObject& x)
{
    return TExpansion(x, 1, [](int, HomCode h) { return h != 0; }, "T̄" + x.name());
}

TExpansion t_tbar(const RealmObject& x)
{
    return TExpansion(x, 2, [](int r, HomCode h) { return coordinate(h, r, 1) != 0; }, "TT̄" + x.name());
}

TExpansion tbar_squared(const RealmObject& x)
{
    return TExpansion(
        x, 2, [](int r, HomCode h) { return coordinate(h, r, 0) != 0 && coordinate(h, r, 1) != 0; },
        "T̄²" + x.name());
}

ModuleMap component_map(const TExpansion& source, const TExpansion& target, const ComponentRule& rule)
{
    const auto& x = source.base();
    const int top = std::min(source.module()->top(), target.module()->top());
    std::vector<BitMatrix> f;
    for (int n = 0; n <= top; ++n) {
        BitMatrix a(target.module()->dim(n), source.module()->dim(n));
        for (std::size_t c = 0; c < source.components().size(); ++c) {
            const auto [j, h] = source.components()[c];
            const std::size_t dim = x.summand_module(j)->dim(n);
            if (dim == 0)
                continue;
            const std::size_t col = source.offset(n, c);
            for (HomCode t : rule(x.summands()[j].rank, h)) {
                const std::size_t tc = target.find(j, t);
                if (tc == TExpansion::npos)
                    continue;
                const std::size_t row = target.offset(n, tc);
                for (std::size_t i = 0; i < dim; ++i)
                    a.flip(row + i, col + i);
            }
        }
        f.push_back(std::move(a));
    }
    return unstable::make_map(source.module(), target.module(), std::move(f));
}

ModuleMap t_induced(const TExpansion& source, const TExpansion& target, const std::vector<std::vector<int>>& phi)
{
    const int ws = source.w();
    const int wt = target.w();
    if (static_cast<int>(phi.size()) != wt)
        throw std::invalid_argument("t_induced: phi must have dim W' rows");
    for (const auto& row : phi)
        if (static_cast<int>(row.size()) != ws)
            throw std::invalid_argument("t_induced: phi must have dim W columns");
    // h' phi, for every target component h'
    auto pull_back = [&](int rank, HomCode ht) {
        HomCode h = 0;
        for (int i = 0; i < ws; ++i) {
            HomCode v = 0;
            for (int k = 0; k < wt; ++k)
                if (phi[k][i] & 1)
                    v ^= coordinate(ht, rank, k);
            h |= v << (rank * i);
        }
        return h;
    };
    const auto& x = source.base();
    const int top = std::min(source.module()->top(), target.module()->top());
    std::vector<BitMatrix> f;
    for (int n = 0; n <= top; ++n) {
        BitMatrix a(target.module()->dim(n), source.module()->dim(n));
        for (std::size_t tc = 0; tc < target.components().size(); ++tc) {
            const auto [j, ht] = target.components()[tc];
            const std::size_t sc = source.find(j, pull_back(x.summands()[j].rank, ht));
            if (sc == TExpansion::npos)
                continue;
            const std::size_t row = target.offset(n, tc);
            const std::size_t col = source.offset(n, sc);
            for (std::size_t i = 0; i < x.summand_module(j)->dim(n); ++i)
                a.flip(row + i, col + i);
        }
        f.push_back(std::move(a));
    }
    return unstable::make_map(source.module(), target.module(), std::move(f));
}

ModuleMap t_bar_projection(const TExpansion& t, const TExpansion& tbar)
{
    return component_map(t, tbar, [](int rank, HomCode h) {
        if (h != 0)
            return std::vector<HomCode>{h};
        std::vector<HomCode> all;
        for (HomCode v = 1; v < (HomCode{1} << rank); ++v)
            all.push_back(v);
        return all;
    });
}

// ---- sigma, tau, tau-bar -------------------------------------------------

BitMatrix gv_matrix(const RealmObject& x, std::size_t summand, int n, std::uint64_t v)
{
    const auto& part = *x.summand_module(summand);
    const auto [s, rank] = x.summands().at(summand);
    const std::size_t dim = extended_offset(part, n, n + 1);
    BitMatrix g(dim, dim);
    for (int k = 0; k + s <= n; ++k) {
        const std::size_t col0 = extended_offset(part, n, k);
        const auto& mons = poly::monomials(rank, n - k - s);
        for (std::size_t i = 0; i < mons.size(); ++i) {
            poly::Exponents rest = mons[i];
            substitutions(mons[i], v, 0, rest, 0, [&](const poly::Exponents& e, int lifted) {
                g.flip(extended_offset(part, n, k + lifted) + poly::monomial_index(e), col0 + i);
            });
        }
    }
    return g;
}

namespace {

std::vector<std::size_t> realm_embedding(const RealmObject& x, std::size_t j, int n)
{
    return embedding(*x.summand_module(j), *x.module(), n, [&](int d) { return x.offset(d, j); });
}

std::vector<std::size_t> component_embedding(const TExpansion& t, std::size_t c, int n)
{
    const auto& part = *t.base().summand_module(t.components()[c].summand);
    return embedding(part, *t.module(), n, [&](int d) { return t.offset(d, c); });
}

// Sum over components of t of the block gv (or the identity) from summand j into component c.
template <class BlockFn>
std::vector<BitMatrix> component_blocks(const RealmObject& x, const FuluRef& source, const TExpansion& t,
                                        const FuluRef& target, BlockFn block)
{
    std::vector<BitMatrix> f;
    for (int n = 0; n <= x.top(); ++n) {
        BitMatrix a(target->dim(n), source->dim(n));
        for (std::size_t c = 0; c < t.components().size(); ++c) {
            const auto [j, h] = t.components()[c];
            const auto src = realm_embedding(x, j, n);
            const auto tgt = component_embedding(t, c, n);
            const BitMatrix b = block(j, h, n);
            for (std::size_t col = 0; col < b.cols(); ++col)
                for (auto row : b.column(col).support())
                    a.flip(tgt[row], src[col]);
        }
        f.push_back(std::move(a));
    }
    return f;
}

}  // namespace

LannesContext::LannesContext(RealmObject realm)
    : x(std::move(realm)), t(t_apply(x, 1)), tbar(t_bar(x))
{
    auto& m = maps;
    m.ext_m = fulu::extend_scalars(x.module());
    m.ext_tm = fulu::extend_scalars(t.module());
    m.ext_tbar = fulu::extend_scalars(tbar.module());

    auto identity = [&](std::size_t j, HomCode, int n) {
        return BitMatrix::identity(extended_offset(*x.summand_module(j), n, n + 1));
    };
    auto gv = [&](std::size_t j, HomCode h, int n) { return gv_matrix(x, j, n, h); };
    auto gv_plus_id = [&](std::size_t j, HomCode h, int n) { return gv(j, h, n) + identity(j, h, n); };

    m.sigma = fulu::make_fulu_map(m.ext_m, m.ext_tm, component_blocks(x, m.ext_m, t, m.ext_tm, identity));
    m.tau = fulu::make_fulu_map(m.ext_m, m.ext_tm, component_blocks(x, m.ext_m, t, m.ext_tm, gv));
    m.tau_bar_full =
        fulu::make_fulu_map(m.ext_m, m.ext_tbar, component_blocks(x, m.ext_m, tbar, m.ext_tbar, gv_plus_id));

    std::vector<Subspace> spaces;
    for (int n = 0; n <= x.top(); ++n) {
        const std::size_t dim = m.ext_tbar->dim(n);
        std::vector<BitVector> vs;
        for (std::size_t i = extended_offset(*tbar.module(), n, 1); i < dim; ++i)
            vs.push_back(BitVector::unit(dim, i));
        spaces.push_back(Subspace::spanned_by(vs, dim));
    }
    m.bar = fulu::fulu_submodule(m.ext_tbar, spaces, "F̄[u]⊗" + tbar.module()->name());
    m.tau_bar = fulu::fulu_corestrict(m.tau_bar_full, m.bar);
}

// ---- R~_1, invariants, C_1, C_2 ------------------------------------------

Rtilde rtilde(const LannesContext& c)
{
    const std::string name = "R̃₁" + c.x.name();
    Rtilde r{fulu::fulu_kernel(c.maps.tau_bar, name),
             fulu::fulu_kernel(fulu::fulu_add(c.maps.sigma, c.maps.tau), "Eq(σ,τ)" + c.x.name()), false};
    r.definitions_agree = true;
    for (int n = 0; n <= c.x.top(); ++n)
        if (!(r.kernel.sub.span(n) == r.equalizer.sub.span(n)))
            r.definitions_agree = false;
    return r;
}

unstable::Submodule gv_invariants(int rank, int top)
{
    const auto h = unstable::polynomial_module(rank, top);
    const auto ext = fulu::extend_scalars(h);
    std::vector<Subspace> spaces;
    for (int n = 0; n <= top; ++n) {
        const std::size_t dim = ext->dim(n);
        BitMatrix stacked(0, dim);
        for (int var = 0; var < rank; ++var) {
            // (t_var -> t_var + u) + id
            BitMatrix a(dim, dim);
            for (int k = 0; k <= n; ++k) {
                const std::size_t col0 = extended_offset(*h, n, k);
                const auto& mons = poly::monomials(rank, n - k);
                for (std::size_t i = 0; i < mons.size(); ++i) {
                    const int e = mons[i][var];
                    for (int c = 1; c <= e; ++c) {
                        if (!steenrod::binomial_mod2(e, c))
                            continue;
                        poly::Exponents rest = mons[i];
                        rest[var] -= c;
                        a.flip(extended_offset(*h, n, k + c) + poly::monomial_index(rest), col0 + i);
                    }
                }
            }
            stacked = BitMatrix::vstack(stacked, a);
        }
        spaces.push_back(rank == 0 ? Subspace::full(dim) : f2::kernel_basis(stacked));
    }
    return unstable::submodule(ext->module, spaces, "G-inv(" + ext->name() + ")");
}

CFunctors c_functors(const LannesContext& c)
{
    return {fulu::fulu_image(c.maps.tau_bar, "C₁" + c.x.name()),
            fulu::fulu_cokernel(c.maps.tau_bar, "C₂" + c.x.name())};
}

FuluMap zero_component_retraction(const LannesContext& c)
{
    const auto& x = c.x;
    std::vector<BitMatrix> f;
    for (int n = 0; n <= x.top(); ++n) {
        BitMatrix a(c.maps.ext_m->dim(n), c.maps.ext_tm->dim(n));
        for (std::size_t j = 0; j < x.summands().size(); ++j) {
            const auto tgt = realm_embedding(x, j, n);
            const auto src = component_embedding(c.t, c.t.find(j, 0), n);
            for (std::size_t i = 0; i < src.size(); ++i)
                a.set(tgt[i], src[i]);
        }
        f.push_back(std::move(a));
    }
    return fulu::make_fulu_map(c.maps.ext_tm, c.maps.ext_m, std::move(f));
}

// ---- Fix -----------------------------------------------------------------

FixData::FixData(const RealmObject& x)
    : t0(t_apply(x, 0)),
      t1(t_apply(x, 1)),
      t2(t_apply(x, 2)),
      ttbar(t_tbar(x)),
      tbar2(tbar_squared(x)),
      unit(t_induced(t0, t1, {{}})),
      zero_projection(t_induced(t1, t0, {})),
      t_i1(t_induced(t1, t2, {{1}, {0}})),
      t_delta(t_induced(t1, t2, {{1}, {1}}))
{
    // T(pi) on the inner coordinate
    const ModuleMap pi_inner = component_map(t2, ttbar, [](int r, HomCode h) {
        if (coordinate(h, r, 1) != 0)
            return std::vector<HomCode>{h};
        std::vector<HomCode> out;
        for (HomCode b = 1; b < (HomCode{1} << r); ++b)
            out.push_back(h | (b << r));
        return out;
    });
    j = unstable::compose(pi_inner, unstable::add(t_i1, t_delta));
    // K(w)_(a,b) = w_(a,b) + w_(0,a) + w_(0,a+b), dropping terms with inner index 0
    k = component_map(ttbar, tbar2, [](int r, HomCode h) {
        const HomCode c = coordinate(h, r, 0);
        const HomCode d = coordinate(h, r, 1);
        if (c != 0)
            return std::vector<HomCode>{h};
        std::vector<HomCode> out;
        for (HomCode b = 1; b < (HomCode{1} << r); ++b)
            out.push_back(d | (b << r));
        for (HomCode a = 1; a < (HomCode{1} << r); ++a)
            if (a != d)
                out.push_back(a | ((a ^ d) << r));
        return out;
    });
}

FuluMap defining_map(const LannesContext& c, DefiningMap map)
{
    switch (map) {
    case DefiningMap::sigma:
        return c.maps.sigma;
    case DefiningMap::tau:
        return c.maps.tau;
    case DefiningMap::sigma_plus_tau:
        return fulu::fulu_add(c.maps.sigma, c.maps.tau);
    case DefiningMap::tau_bar:
        return c.maps.tau_bar;
    }
    throw std::logic_error("defining_map: unknown defining map");
}

FuluRef realize_presented(const LannesContext& c, const PresentedFuluObject& p)
{
    const FuluMap f = defining_map(c, p.map);
    switch (p.kind) {
    case PresentationKind::kernel:
        return fulu::fulu_kernel(f).module;
    case PresentationKind::image:
        return fulu::fulu_image(f).module;
    case PresentationKind::cokernel:
        return fulu::fulu_cokernel(f).module;
    }
    throw std::logic_error("realize_presented: unknown presentation");
}

ModuleMap fix_of(const FixData& f, DefiningMap map)
{
    switch (map) {
    case DefiningMap::sigma:
        return f.t_i1;
    case DefiningMap::tau:
        return f.t_delta;
    case DefiningMap::sigma_plus_tau:
        return unstable::add(f.t_i1, f.t_delta);
    case DefiningMap::tau_bar:
        return f.j;
    }
    throw std::logic_error("fix_of: unknown defining map");
}

ModuleRef fix_presented(const FixData& f, const PresentedFuluObject& p)
{
    const ModuleMap m = fix_of(f, p.map);
    switch (p.kind) {
    case PresentationKind::kernel:
        return unstable::kernel(m, "Fix(ker)").module;
    case PresentationKind::image:
        return unstable::image(m, "Fix(im)").module;
    case PresentationKind::cokernel:
        return unstable::cokernel(m, "Fix(coker)").module;
    }
    throw std::logic_error("fix_presented: unknown presentation");
}

// ---- alpha and division functors -----------------------------------------

ModuleMap tau_bar_unit(const LannesContext& c)
{
    const auto& m = *c.x.module();
    const auto& tb = *c.tbar.module();
    const auto target = unstable::suspend(c.tbar.module());
    std::vector<BitMatrix> f;
    for (int n = 0; n <= m.top(); ++n) {
        const BitMatrix& full = c.maps.tau_bar_full[n];
        f.push_back(n == 0 ? BitMatrix(0, m.dim(0))
                           : full.block(extended_offset(tb, n, 1), 0, tb.dim(n - 1), m.dim(n)));
    }
    return unstable::make_map(c.x.module(), target, std::move(f));
}

Alpha alpha_from_unit(const ModuleRef& m, const ModuleRef& tbar, const ModuleMap& unit)
{
    Alpha a;
    a.omega = unstable::omega(m);
    a.tbar = tbar;
    a.unit = unit;
    a.kills_sq0 = true;
    const int top = std::min(unit.top(), a.omega.sq0.top());
    for (int n = 0; n <= top; ++n)
        if (!(unit[n] * a.omega.sq0[n]).is_zero())
            a.kills_sq0 = false;
    if (!a.kills_sq0)
        throw std::logic_error("alpha: the unit map does not vanish on the image of Sq_0 for " + m->name());
    const ModuleMap factored = unstable::factor_through(unit, a.omega.sq0_cokernel);
    const int atop = std::min({a.omega.omega->top(), tbar->top(), factored.top() - 1});
    std::vector<BitMatrix> f;
    for (int n = 0; n <= atop; ++n)
        f.push_back(factored[n + 1]);
    a.alpha = unstable::make_map(a.omega.omega, tbar, std::move(f));
    return a;
}

Alpha alpha(const LannesContext& c) { return alpha_from_unit(c.x.module(), c.tbar.module(), tau_bar_unit(c)); }

Alpha alpha_phi_f1(int top)
{
    const auto m = unstable::phi(unstable::free_unstable(1, top));
    const auto tbar = unstable::with_name(unstable::ground_field(top), "T̄" + m->name());
    return alpha_from_unit(m, tbar, unstable::zero_map(m, unstable::suspend(tbar)));
}

Division division_u2(const Alpha& a)
{
    const std::string& name = a.omega.module->name();
    return {unstable::cokernel(a.alpha, "Div(" + name + ")"), unstable::kernel(a.alpha, "Div₁(" + name + ")"),
            a.omega.omega1};
}

}  // namespace r1kit::lannes
