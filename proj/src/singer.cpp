#include "r1kit/singer.hpp"

#include <stdexcept>

namespace r1kit::singer {

using f2::Subspace;
using fulu::extended_offset;

namespace {

std::string power_prefix(int k)
{
    if (k == 0)
        return "";
    return (k == 1 ? std::string("u") : "u^" + std::to_string(k)) + "·";
}

// (k, j) with index = offset of block u^k (x) M^{n-k} plus j.
std::pair<int, std::size_t> decode(const unstable::TruncatedModule& base, int n, std::size_t index)
{
    for (int k = 0; k <= n; ++k) {
        const std::size_t size = base.dim(n - k);
        if (index < size)
            return {k, index};
        index -= size;
    }
    throw std::out_of_range("index outside (F[u] (x) M)^" + std::to_string(n));
}

}  // namespace

St1Map st1(const ModuleRef& m, const FuluRef& extended)
{
    St1Map s{m, extended, {}};
    for (int d = 0; 2 * d <= m->top(); ++d) {
        BitMatrix a(extended->dim(2 * d), m->dim(d));
        for (int i = 0; i <= d; ++i)
            a.add_block(extended_offset(*m, 2 * d, d - i), 0, m->op(i, d));
        s.st.push_back(std::move(a));
    }
    return s;
}

St1Map st1(const ModuleRef& m) { return st1(m, fulu::extend_scalars(m)); }

SingerModule r1(const ModuleRef& m)
{
    SingerModule r;
    r.base = m;
    r.extended = fulu::extend_scalars(m);
    r.st1 = st1(m, r.extended);
    const int top = m->top();
    r.certified = top;
    r.generators.resize(top + 1);

    std::vector<std::vector<BitVector>> vectors(top + 1);
    std::vector<std::vector<std::string>> labels(top + 1);
    for (int n = 0; n <= top; ++n)
        for (int d = n / 2; d >= 0; --d) {
            const int k = n - 2 * d;
            for (std::size_t j = 0; j < m->dim(d); ++j) {
                BitVector v = r.st1.st[d].column(j);
                for (int e = 2 * d; e < n; ++e)
                    v = r.extended->u[e] * v;
                vectors[n].push_back(std::move(v));
                labels[n].push_back(power_prefix(k) + "St1(" + m->label(d, j) + ")");
                r.generators[n].push_back({k, d, j});
            }
        }

    const std::string name = "R₁" + m->name();
    try {
        std::vector<f2::Basis> basis;
        for (int n = 0; n <= top; ++n)
            basis.emplace_back(r.extended->dim(n), vectors[n]);
        r.r1 = fulu::fulu_submodule_with_basis(r.extended, std::move(basis), name, std::move(labels));
        r.distinguished = true;
    } catch (const std::invalid_argument&) {
        std::vector<Subspace> spaces;
        for (int n = 0; n <= top; ++n)
            spaces.push_back(Subspace::spanned_by(vectors[n], r.extended->dim(n)));
        r.r1 = fulu::fulu_submodule(r.extended, spaces, name);
        r.distinguished = false;
    }
    return r;
}

FuluMap r1_on_map(const ModuleMap& f, const SingerModule& source, const SingerModule& target)
{
    const FuluMap ext = fulu::extend_map(f, source.extended, target.extended);
    try {
        return fulu::fulu_restrict(ext, source.r1, target.r1);
    } catch (const std::invalid_argument& e) {
        throw std::logic_error("R1 of " + f.source->name() + " -> " + f.target->name() +
                               " leaves the target's R1: " + e.what());
    }
}

Rho1 rho1(const SingerModule& r)
{
    if (!r.distinguished)
        throw std::logic_error("rho1: " + r.r1.module->name() + " has no distinguished basis");
    Rho1 out;
    out.phi = unstable::phi(r.base);
    const auto& mod = r.r1.module->module;
    const int top = mod->top();
    std::vector<BitMatrix> f;
    for (int n = 0; n <= top; ++n) {
        BitMatrix a(out.phi->dim(n), mod->dim(n));
        for (std::size_t c = 0; c < r.generators[n].size(); ++c)
            if (r.generators[n][c].k == 0)
                a.set(r.generators[n][c].j, c);
        f.push_back(std::move(a));
    }
    out.rho = unstable::make_map(mod, out.phi, std::move(f));

    std::vector<Subspace> spaces;
    for (int n = 0; n <= top; ++n)
        spaces.push_back(n == 0 ? Subspace(mod->dim(0)) : f2::image(r.r1.module->u[n - 1]));
    out.u_r1 = fulu::fulu_submodule(r.r1.module, spaces, "u" + mod->name());

    out.certified = top;
    const auto bad_surj = unstable::first_non_surjective_degree(out.rho);
    out.surjective = !bad_surj;
    out.kernel_is_u_multiples = true;
    for (int n = 0; n <= top; ++n)
        if (!(f2::kernel_basis(out.rho[n]) == out.u_r1.sub.span(n))) {
            out.kernel_is_u_multiples = false;
            out.witness = "ker rho differs from u R1 in degree " + std::to_string(n);
            break;
        }
    const ModuleMap s0 = unstable::sq0(r.base, out.phi);
    const ModuleMap eps = fulu::augmentation(r.extended);
    out.sq0_square_commutes = true;
    for (int n = 0; n <= top; ++n)
        if (!(s0[n] * out.rho[n] == eps[n] * r.r1.sub.inclusion[n])) {
            out.sq0_square_commutes = false;
            out.witness = "Sq0 rho differs from eps in degree " + std::to_string(n);
            break;
        }
    if (bad_surj)
        out.witness = "rho not surjective in degree " + std::to_string(*bad_surj);
    return out;
}

BitVector multiply_extended(const FuluRef& em, const FuluRef& en, const FuluRef& emn, int p, const BitVector& v,
                            int q, const BitVector& w)
{
    const auto& mb = *em->base;
    const auto& nb = *en->base;
    unstable::TensorLayout lay{&mb, &nb};
    BitVector out(emn->dim(p + q));
    for (auto a : v.support()) {
        const auto [k, x] = decode(mb, p, a);
        for (auto b : w.support()) {
            const auto [l, y] = decode(nb, q, b);
            const int deg = p - k + q - l;
            out.flip(extended_offset(*emn->base, p + q, k + l) + lay.index(deg, p - k, x, y));
        }
    }
    return out;
}

ProductCertificate product_mu(const SingerModule& m, const SingerModule& n, const SingerModule& mn)
{
    ProductCertificate cert;
    cert.source = fulu::fulu_tensor_presentation(m.module(), n.module());
    const auto& product = cert.source.product;
    const int top = std::min({product->top(), mn.extended->top()});
    cert.certified = top;
    unstable::TensorLayout lay{m.r1.module->module.get(), n.r1.module->module.get()};
    std::vector<BitMatrix> f;
    for (int d = 0; d <= top; ++d) {
        BitMatrix a(mn.extended->dim(d), product->dim(d));
        for (int p = 0; p <= d; ++p)
            for (std::size_t i = 0; i < m.r1.module->dim(p); ++i)
                for (std::size_t j = 0; j < n.r1.module->dim(d - p); ++j)
                    a.set_column(lay.index(d, p, i, j),
                                 multiply_extended(m.extended, n.extended, mn.extended, p,
                                                   m.r1.sub.inclusion[p].column(i), d - p,
                                                   n.r1.sub.inclusion[d - p].column(j)));
        f.push_back(std::move(a));
    }
    ModuleMap full{unstable::make_linear_map(product, mn.extended->module, std::move(f))};
    cert.map = unstable::factor_through(full, cert.source.quot);
    cert.linear = unstable::linearity_violations(cert.map).empty();
    const auto bad_inj = unstable::first_non_injective_degree(cert.map);
    cert.injective = !bad_inj;
    cert.image_is_r1 = true;
    for (int d = 0; d <= top; ++d)
        if (!(f2::image(cert.map[d]) == mn.r1.sub.span(d))) {
            cert.image_is_r1 = false;
            cert.failure_degree = d;
            break;
        }
    if (bad_inj && !cert.failure_degree)
        cert.failure_degree = bad_inj;
    return cert;
}

}  // namespace r1kit::singer
