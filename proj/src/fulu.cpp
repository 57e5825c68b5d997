#include "r1kit/fulu.hpp"

#include "r1kit/steenrod.hpp"

#include <algorithm>

namespace r1kit::fulu {

using unstable::TruncatedModule;

BitMatrix FuluModule::u_mul(int n) const
{
    if (n < 0 || n > top())
        throw std::out_of_range(name() + ": u on degree " + std::to_string(n) + " outside the truncation");
    if (n == top())
        return BitMatrix(0, dim(n));
    return u[n];
}

std::vector<unstable::Violation> fulu_violations(const FuluModule& n)
{
    std::vector<unstable::Violation> out;
    const int top = n.top();
    if (n.u.size() != static_cast<std::size_t>(top)) {
        out.push_back({"shape", 0, "expected " + std::to_string(top) + " u-matrices"});
        return out;
    }
    for (int d = 0; d < top; ++d)
        if (n.u[d].rows() != n.dim(d + 1) || n.u[d].cols() != n.dim(d))
            out.push_back({"shape", d, "u on degree " + std::to_string(d) + " has the wrong shape"});
    if (!out.empty())
        return out;
    const auto& m = *n.module;
    for (int d = 0; d < top; ++d)
        for (int i = 1; d + 1 + i <= top; ++i) {
            BitMatrix lhs = m.sq(i, d + 1) * n.u[d];
            BitMatrix rhs = n.u[d + i] * m.sq(i, d) + n.u[d + i] * n.u[d + i - 1] * m.op(i - 1, d);
            if (!(lhs == rhs))
                out.push_back({"u-linearity", d,
                               "Sq^" + std::to_string(i) + "(u x) != u Sq^" + std::to_string(i) + " x + u^2 Sq^" +
                                   std::to_string(i - 1) + " x on degree " + std::to_string(d)});
        }
    return out;
}

FuluRef make_fulu(ModuleRef m, std::vector<BitMatrix> u, ModuleRef base)
{
    auto n = std::make_shared<FuluModule>(FuluModule{std::move(m), std::move(u), std::move(base)});
    auto bad = fulu_violations(*n);
    if (!bad.empty())
        throw std::invalid_argument(n->name() + " is not an F[u]-module: " + bad.front().detail);
    return n;
}

FuluMap make_fulu_map(FuluRef source, FuluRef target, std::vector<BitMatrix> f)
{
    ModuleMap map = unstable::make_map(source->module, target->module, std::move(f));
    for (int d = 0; d < map.top(); ++d)
        if (!(map[d + 1] * source->u[d] == target->u[d] * map[d]))
            throw std::invalid_argument("map " + source->name() + " -> " + target->name() +
                                        " does not commute with u on degree " + std::to_string(d));
    return FuluMap{std::move(source), std::move(target), std::move(map)};
}

FuluMap fulu_compose(const FuluMap& g, const FuluMap& f)
{
    if (f.top() != g.top())
        throw std::invalid_argument("fulu_compose: maps have different truncations");
    return FuluMap{f.source, g.target, unstable::compose(g.map, f.map)};
}

FuluMap fulu_add(const FuluMap& f, const FuluMap& g) { return FuluMap{f.source, f.target, unstable::add(f.map, g.map)}; }

FuluMap fulu_identity(const FuluRef& n) { return FuluMap{n, n, unstable::identity_map(n->module)}; }

// ---- extension of scalars ------------------------------------------------

std::size_t extended_offset(const TruncatedModule& m, int n, int k)
{
    std::size_t off = 0;
    for (int j = 0; j < k; ++j)
        off += m.dim(n - j);
    return off;
}

FuluRef extend_scalars(const ModuleRef& m)
{
    const int top = m->top();
    std::vector<std::size_t> dims(top + 1);
    for (int n = 0; n <= top; ++n)
        dims[n] = extended_offset(*m, n, n + 1);
    auto out = std::make_shared<TruncatedModule>("F[u]⊗" + m->name(), top, dims);
    for (int n = 0; n <= top; ++n) {
        std::vector<std::string> labels;
        for (int k = 0; k <= n; ++k)
            for (const auto& l : m->labels(n - k)) {
                if (k == 0)
                    labels.push_back(l);
                else
                    labels.push_back((k == 1 ? std::string("u") : "u^" + std::to_string(k)) + "⊗" + l);
            }
        out->set_labels(n, std::move(labels));
    }
    // Sq^s(u^k (x) x) = sum_j binom(k, j) u^{k+j} (x) Sq^{s-j} x
    for (int n = 0; n <= top; ++n)
        for (int s = 1; n + s <= top; ++s) {
            BitMatrix a(dims[n + s], dims[n]);
            for (int k = 0; k <= n; ++k) {
                const int e = n - k;
                if (m->dim(e) == 0)
                    continue;
                for (int j = 0; j <= std::min(k, s); ++j) {
                    if (!steenrod::binomial_mod2(k, j) || s - j > e)
                        continue;
                    a.add_block(extended_offset(*m, n + s, k + j), extended_offset(*m, n, k), m->op(s - j, e));
                }
            }
            out->set_sq(s, n, std::move(a));
        }
    std::vector<BitMatrix> u;
    for (int n = 0; n < top; ++n) {
        BitMatrix a(dims[n + 1], dims[n]);
        for (int k = 0; k <= n; ++k)
            a.add_block(extended_offset(*m, n + 1, k + 1), extended_offset(*m, n, k),
                        BitMatrix::identity(m->dim(n - k)));
        u.push_back(std::move(a));
    }
    return make_fulu(std::move(out), std::move(u), m);
}

FuluMap extend_map(const ModuleMap& f, const FuluRef& source, const FuluRef& target)
{
    if (!source->base || !target->base)
        throw std::invalid_argument("extend_map: modules are not extended");
    const int top = std::min(source->top(), target->top());
    std::vector<BitMatrix> g;
    for (int n = 0; n <= top; ++n) {
        BitMatrix a(target->dim(n), source->dim(n));
        for (int k = 0; k <= n; ++k)
            a.add_block(extended_offset(*target->base, n, k), extended_offset(*source->base, n, k), f[n - k]);
        g.push_back(std::move(a));
    }
    return make_fulu_map(source, target, std::move(g));
}

ModuleMap augmentation(const FuluRef& extended)
{
    if (!extended->base)
        throw std::invalid_argument("augmentation: " + extended->name() + " is not an extended module");
    std::vector<BitMatrix> f;
    for (int n = 0; n <= extended->top(); ++n) {
        BitMatrix a(extended->base->dim(n), extended->dim(n));
        a.add_block(0, 0, BitMatrix::identity(extended->base->dim(n)));
        f.push_back(std::move(a));
    }
    return unstable::make_map(extended->module, extended->base, std::move(f));
}

// ---- subobjects and quotients --------------------------------------------

namespace {

FuluSubmodule wrap_submodule(const FuluRef& ambient, unstable::Submodule sub)
{
    std::vector<BitMatrix> u;
    for (int n = 0; n < ambient->top(); ++n) {
        BitMatrix a(sub.module->dim(n + 1), sub.module->dim(n));
        for (std::size_t j = 0; j < sub.basis[n].size(); ++j) {
            auto c = sub.basis[n + 1].coordinates(ambient->u[n] * sub.basis[n][j]);
            if (!c)
                throw std::invalid_argument("submodule of " + ambient->name() + " is not stable under u on degree " +
                                            std::to_string(n));
            a.set_column(j, *c);
        }
        u.push_back(std::move(a));
    }
    auto mod = make_fulu(sub.module, std::move(u));
    FuluMap inc{mod, ambient, sub.inclusion};
    return FuluSubmodule{mod, ambient, std::move(sub), std::move(inc)};
}

}  // namespace

FuluSubmodule fulu_submodule(const FuluRef& ambient, const std::vector<Subspace>& spaces, std::string name)
{
    return wrap_submodule(ambient, unstable::submodule(ambient->module, spaces, std::move(name)));
}

FuluSubmodule fulu_submodule_with_basis(const FuluRef& ambient, std::vector<f2::Basis> basis, std::string name,
                                        std::vector<std::vector<std::string>> labels)
{
    return wrap_submodule(ambient,
                          unstable::submodule_with_basis(ambient->module, std::move(basis), std::move(name), std::move(labels)));
}

FuluQuotient fulu_quotient(const FuluRef& ambient, const std::vector<Subspace>& spaces, std::string name)
{
    auto q = unstable::quotient(ambient->module, spaces, std::move(name));
    std::vector<BitMatrix> u;
    for (int n = 0; n < ambient->top(); ++n) {
        for (std::size_t j = 0; j < q.kernel[n].dim(); ++j)
            if (!q.kernel[n + 1].contains(ambient->u[n] * q.kernel[n].basis_vector(j)))
                throw std::invalid_argument("quotient of " + ambient->name() + ": subspace not stable under u on degree " +
                                            std::to_string(n));
        BitMatrix a(q.module->dim(n + 1), q.module->dim(n));
        for (std::size_t c = 0; c < q.lifts[n].size(); ++c)
            a.set_column(c, q.projection[n + 1] * ambient->u[n].column(q.lifts[n][c]));
        u.push_back(std::move(a));
    }
    auto mod = make_fulu(q.module, std::move(u));
    FuluMap proj{ambient, mod, q.projection};
    return FuluQuotient{mod, ambient, std::move(q), std::move(proj)};
}

std::vector<Subspace> fulu_closure(const FuluRef& ambient, const std::vector<std::vector<BitVector>>& generators)
{
    const int top = ambient->top();
    std::vector<Subspace> spaces;
    for (int n = 0; n <= top; ++n) {
        std::vector<BitVector> vs;
        if (static_cast<std::size_t>(n) < generators.size())
            vs = generators[n];
        for (int i = 1; i <= n; ++i) {
            const BitMatrix& s = ambient->module->sq(i, n - i);
            for (std::size_t j = 0; j < spaces[n - i].dim(); ++j)
                vs.push_back(s * spaces[n - i].basis_vector(j));
        }
        if (n > 0)
            for (std::size_t j = 0; j < spaces[n - 1].dim(); ++j)
                vs.push_back(ambient->u[n - 1] * spaces[n - 1].basis_vector(j));
        spaces.push_back(Subspace::spanned_by(vs, ambient->dim(n)));
    }
    return spaces;
}

namespace {

void require_full(const FuluMap& f)
{
    if (f.top() != f.source->top() || f.top() != f.target->top())
        throw std::invalid_argument("map " + f.source->name() + " -> " + f.target->name() +
                                    " is not defined through both truncations");
}

}  // namespace

FuluSubmodule fulu_kernel(const FuluMap& f, std::string name)
{
    require_full(f);
    std::vector<Subspace> spaces;
    for (int n = 0; n <= f.top(); ++n)
        spaces.push_back(f2::kernel_basis(f[n]));
    if (name.empty())
        name = "ker(" + f.source->name() + "→" + f.target->name() + ")";
    return fulu_submodule(f.source, spaces, std::move(name));
}

FuluSubmodule fulu_image(const FuluMap& f, std::string name)
{
    require_full(f);
    std::vector<Subspace> spaces;
    for (int n = 0; n <= f.top(); ++n)
        spaces.push_back(f2::image(f[n]));
    if (name.empty())
        name = "im(" + f.source->name() + "→" + f.target->name() + ")";
    return fulu_submodule(f.target, spaces, std::move(name));
}

FuluQuotient fulu_cokernel(const FuluMap& f, std::string name)
{
    require_full(f);
    std::vector<Subspace> spaces;
    for (int n = 0; n <= f.top(); ++n)
        spaces.push_back(f2::image(f[n]));
    if (name.empty())
        name = "coker(" + f.source->name() + "→" + f.target->name() + ")";
    return fulu_quotient(f.target, spaces, std::move(name));
}

FuluMap fulu_restrict(const FuluMap& f, const FuluSubmodule& source, const FuluSubmodule& target)
{
    return FuluMap{source.module, target.module, unstable::restrict_map(f.map, source.sub, target.sub)};
}

FuluMap fulu_corestrict(const FuluMap& f, const FuluSubmodule& target)
{
    return FuluMap{f.source, target.module, unstable::corestrict(f.map, target.sub)};
}

FuluMap fulu_induced(const FuluMap& f, const FuluQuotient& source, const FuluQuotient& target)
{
    return FuluMap{source.module, target.module, unstable::induced_map(f.map, source.quot, target.quot)};
}

// ---- indecomposables -----------------------------------------------------

unstable::QuotientModule indecomposables(const FuluRef& n)
{
    std::vector<Subspace> spaces;
    for (int d = 0; d <= n->top(); ++d)
        spaces.push_back(d == 0 ? Subspace(n->dim(0)) : f2::image(n->u[d - 1]));
    return unstable::quotient(n->module, spaces, "Q(" + n->name() + ")");
}

ModuleMap indecomposables_map(const FuluMap& f, const unstable::QuotientModule& source,
                              const unstable::QuotientModule& target)
{
    return unstable::induced_map(f.map, source, target);
}

// ---- verdicts ------------------------------------------------------------

FreenessReport freeness_report(const FuluRef& n)
{
    FreenessReport r;
    const int top = n->top();
    r.torsion_free.certified = std::max(0, top - 1);
    for (int d = 0; d < top; ++d) {
        auto k = f2::kernel_basis(n->u[d]);
        if (!k.is_zero()) {
            r.torsion_free.holds = false;
            r.torsion_free.degree = d;
            r.torsion_free.witness = "u kills " + unstable::describe(*n->module, d, k.basis_vector(0)) +
                                     " in degree " + std::to_string(d);
            break;
        }
    }
    auto q = indecomposables(n);
    r.basis.resize(top + 1);
    r.basis_labels.resize(top + 1);
    for (int d = 0; d <= top; ++d)
        for (auto j : q.lifts[d]) {
            r.basis[d].push_back(BitVector::unit(n->dim(d), j));
            r.basis_labels[d].push_back(n->module->label(d, j));
        }
    if (!r.torsion_free.holds)
        return r;
    r.free = true;
    for (int d = 0; d <= top && r.free; ++d) {
        std::vector<BitVector> span;
        for (int e = 0; e <= d; ++e)
            for (const auto& w : r.basis[e]) {
                BitVector v = w;
                for (int k = e; k < d; ++k)
                    v = n->u[k] * v;
                span.push_back(std::move(v));
            }
        if (span.size() != n->dim(d) || f2::Subspace::spanned_by(span, n->dim(d)).dim() != n->dim(d))
            r.free = false;
    }
    return r;
}

Verdict saturation_check(const FuluSubmodule& x)
{
    const auto& amb = *x.ambient;
    Verdict v;
    v.certified = std::max(0, amb.top() - 1);
    for (int n = 0; n < amb.top(); ++n) {
        const Subspace target = x.sub.span(n + 1);
        BitMatrix r(amb.dim(n + 1), amb.dim(n));
        for (std::size_t j = 0; j < amb.dim(n); ++j)
            r.set_column(j, target.reduce(amb.u[n].column(j)));
        const Subspace pre = f2::kernel_basis(r);
        const Subspace have = x.sub.span(n);
        if (!have.contains(pre)) {
            for (std::size_t j = 0; j < pre.dim(); ++j)
                if (!have.contains(pre.basis_vector(j))) {
                    v.holds = false;
                    v.degree = n;
                    v.witness = "u·(" + unstable::describe(*amb.module, n, pre.basis_vector(j)) +
                                ") lies in the submodule but " +
                                unstable::describe(*amb.module, n, pre.basis_vector(j)) + " does not";
                    return v;
                }
        }
    }
    return v;
}

GeneratorSpace generator_space(const FuluSubmodule& x)
{
    const ModuleMap eps = augmentation(x.ambient);
    auto q = indecomposables(x.module);
    GeneratorSpace g;
    const int top = x.ambient->top();
    g.eps_injective.certified = top;
    g.w.resize(top + 1);
    for (int n = 0; n <= top; ++n) {
        std::vector<BitVector> images;
        for (auto j : q.lifts[n]) {
            g.w[n].push_back(x.sub.basis[n][j]);
            images.push_back(eps[n] * x.sub.basis[n][j]);
        }
        g.eps_image.push_back(Subspace::spanned_by(images, x.ambient->base->dim(n)));
        if (g.eps_injective.holds && g.eps_image.back().dim() != images.size()) {
            g.eps_injective.holds = false;
            g.eps_injective.degree = n;
            g.eps_injective.witness = "generators in degree " + std::to_string(n) + " have " +
                                      std::to_string(images.size()) + " elements but an image of dimension " +
                                      std::to_string(g.eps_image.back().dim());
        }
    }
    return g;
}

FuluTensor fulu_tensor_presentation(const FuluRef& a, const FuluRef& b)
{
    const ModuleRef t = unstable::tensor(a->module, b->module);
    const int top = t->top();
    unstable::TensorLayout lay{a->module.get(), b->module.get()};
    // u (x) 1 and 1 (x) u from degree n - 1 to n
    auto u_left = [&](int n) {
        BitMatrix m(t->dim(n), t->dim(n - 1));
        for (int p = 0; p <= n - 1; ++p)
            for (std::size_t i = 0; i < a->dim(p); ++i) {
                const BitVector ui = a->u[p] * BitVector::unit(a->dim(p), i);
                for (std::size_t j = 0; j < b->dim(n - 1 - p); ++j)
                    for (auto r : ui.support())
                        m.set(lay.index(n, p + 1, r, j), lay.index(n - 1, p, i, j));
            }
        return m;
    };
    auto u_right = [&](int n) {
        BitMatrix m(t->dim(n), t->dim(n - 1));
        for (int p = 0; p <= n - 1; ++p)
            for (std::size_t j = 0; j < b->dim(n - 1 - p); ++j) {
                const BitVector uj = b->u[n - 1 - p] * BitVector::unit(b->dim(n - 1 - p), j);
                for (std::size_t i = 0; i < a->dim(p); ++i)
                    for (auto r : uj.support())
                        m.set(lay.index(n, p, i, r), lay.index(n - 1, p, i, j));
            }
        return m;
    };
    std::vector<Subspace> rel;
    std::vector<BitMatrix> ul(top + 1);
    for (int n = 0; n <= top; ++n) {
        if (n == 0) {
            rel.emplace_back(t->dim(0));
            continue;
        }
        ul[n] = u_left(n);
        rel.push_back(f2::image(ul[n] + u_right(n)));
    }
    auto q = unstable::quotient(t, rel, a->name() + "⊗_F[u]" + b->name());
    std::vector<BitMatrix> u;
    for (int n = 0; n < top; ++n) {
        BitMatrix m(q.module->dim(n + 1), q.module->dim(n));
        for (std::size_t c = 0; c < q.lifts[n].size(); ++c)
            m.set_column(c, q.projection[n + 1] * ul[n + 1].column(q.lifts[n][c]));
        u.push_back(std::move(m));
    }
    auto mod = make_fulu(q.module, std::move(u));
    return FuluTensor{std::move(mod), t, std::move(q)};
}

FuluRef tensor_over_fulu(const FuluRef& a, const FuluRef& b) { return fulu_tensor_presentation(a, b).module; }

}  // namespace r1kit::fulu
