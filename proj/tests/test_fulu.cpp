#include "support.hpp"

#include "r1kit/fulu.hpp"
#include "r1kit/singer.hpp"
#include "r1kit/steenrod.hpp"

#include <doctest.h>

using namespace r1kit;
using namespace r1kit::fulu;
using f2::BitMatrix;
using f2::BitVector;
using f2::Subspace;

namespace {

bool same_action(const unstable::TruncatedModule& a, const unstable::TruncatedModule& b)
{
    if (a.top() != b.top() || a.dims() != b.dims())
        return false;
    for (int n = 0; n <= a.top(); ++n)
        for (int i = 1; n + i <= a.top(); ++i)
            if (!(a.sq(i, n) == b.sq(i, n)))
                return false;
    return true;
}

// F[u]/(u^2): 1 in degree 0, u in degree 1.
FuluRef truncated_polynomial(int top)
{
    std::vector<std::size_t> dims(top + 1, 0);
    dims[0] = dims[1] = 1;
    auto m = std::make_shared<unstable::TruncatedModule>("F[u]/(u^2)", top, dims);
    std::vector<BitMatrix> u;
    for (int n = 0; n < top; ++n)
        u.emplace_back(dims[n + 1], dims[n]);
    u[0].set(0, 0);
    return make_fulu(m, std::move(u));
}

std::vector<Subspace> u_multiples(const FuluRef& n)
{
    std::vector<Subspace> spaces;
    for (int d = 0; d <= n->top(); ++d)
        spaces.push_back(d == 0 ? Subspace(n->dim(0)) : f2::image(n->u[d - 1]));
    return spaces;
}

std::vector<ModuleRef> bases(int top)
{
    return {unstable::ground_field(top), unstable::free_unstable(1, top), unstable::free_unstable(2, top),
            unstable::polynomial_module(1, top), unstable::phi(unstable::free_unstable(1, top)),
            unstable::suspend(unstable::ground_field(top - 1))};
}

}  // namespace

TEST_CASE("extension of scalars")
{
    auto fu = extend_scalars(unstable::ground_field(12));
    for (int n = 0; n <= 12; ++n)
        CHECK(fu->dim(n) == 1);
    for (int n = 0; n <= 12; ++n)
        for (int s = 1; n + s <= 12; ++s)
            CHECK(fu->module->sq(s, n).get(0, 0) == steenrod::binomial_mod2(n, s));
    CHECK(same_action(*fu->module, *unstable::polynomial_module(1, 12)));

    auto es = extend_scalars(unstable::suspend(unstable::ground_field(9)));
    CHECK(es->dim(0) == 0);
    for (int n = 1; n <= 10; ++n)
        CHECK(es->dim(n) == 1);
    CHECK(es->module->sq(1, 2).get(0, 0));  // Sq^1(u (x) s) = u^2 (x) s

    auto f1 = unstable::free_unstable(1, 16);
    auto ef = extend_scalars(f1);
    for (int n = 0; n <= 16; ++n) {
        std::size_t expect = 0;
        for (int k = 0; k <= n; ++k)
            expect += f1->dim(n - k);
        CHECK(ef->dim(n) == expect);
    }
    for (const auto& m : bases(10)) {
        auto e = extend_scalars(m);
        CHECK(unstable::validate(*e->module).ok());
        CHECK(fulu_violations(*e).empty());
    }
}

TEST_CASE("twisted linearity is enforced")
{
    auto e = extend_scalars(unstable::ground_field(4));
    auto u = e->u;
    u[1] = BitMatrix(1, 1);
    CHECK_THROWS_AS(make_fulu(e->module, u), std::invalid_argument);
}

TEST_CASE("indecomposables")
{
    auto q = indecomposables(extend_scalars(unstable::ground_field(10)));
    CHECK(same_action(*q.module, *unstable::ground_field(10)));
    auto f2m = unstable::free_unstable(2, 10);
    CHECK(same_action(*indecomposables(extend_scalars(f2m)).module, *f2m));
    auto r = singer::r1(unstable::polynomial_module(1, 12));
    auto qr = indecomposables(r.module());
    for (int n = 0; n <= 12; ++n)
        CHECK(qr.module->dim(n) == (n % 2 == 0 ? 1u : 0u));
}

TEST_CASE("freeness")
{
    for (const auto& m : bases(10)) {
        auto rep = freeness_report(extend_scalars(m));
        CHECK(rep.torsion_free.holds);
        CHECK(rep.free);
    }
    auto t = freeness_report(truncated_polynomial(5));
    CHECK_FALSE(t.torsion_free.holds);
    CHECK(t.torsion_free.degree == 1);
    CHECK_FALSE(t.free);

    auto r = singer::r1(unstable::free_unstable(1, 16));
    auto rep = freeness_report(r.module());
    CHECK(rep.free);
    for (int n = 0; n <= 16; ++n)
        for (const auto& l : rep.basis_labels[n])
            CHECK(l.rfind("St1(", 0) == 0);
}

TEST_CASE("saturation and generators")
{
    const int top = 10;
    auto h = unstable::polynomial_module(1, top);
    auto f1 = unstable::free_unstable(1, top);
    std::vector<ModuleRef> parts{f1, h};
    auto m = unstable::direct_sum(parts);
    auto em = extend_scalars(m);

    SUBCASE("extended submodule")
    {
        auto inc = extend_map(unstable::sum_inclusion(m, parts, 0), extend_scalars(f1), em);
        auto x = fulu_image(inc);
        CHECK(saturation_check(x).holds);
        CHECK(generator_space(x).eps_injective.holds);
    }
    SUBCASE("the whole module")
    {
        auto x = fulu_image(fulu_identity(em));
        auto g = generator_space(x);
        CHECK(g.eps_injective.holds);
        for (int n = 0; n <= top; ++n)
            CHECK(g.eps_image[n].dim() == m->dim(n));
    }
    SUBCASE("u times everything")
    {
        auto x = fulu_submodule(em, u_multiples(em));
        auto v = saturation_check(x);
        CHECK_FALSE(v.holds);
        CHECK(v.degree == 0);
        auto g = generator_space(x);
        CHECK_FALSE(g.eps_injective.holds);
        for (int n = 0; n <= top; ++n)
            CHECK(g.eps_image[n].is_zero());
    }
    SUBCASE("R1 H*(Z/2)")
    {
        auto r = singer::r1(h);
        CHECK(saturation_check(r.r1).holds);
        auto g = generator_space(r.r1);
        CHECK(g.eps_injective.holds);
        for (int n = 0; n <= top; ++n)
            CHECK(g.eps_image[n].dim() == (n % 2 == 0 ? 1u : 0u));
    }
}

TEST_CASE("property: saturation iff injective generators; saturated quotients are torsion-free")
{
    const int top = 9;
    std::vector<ModuleRef> ms{unstable::polynomial_module(1, top), unstable::polynomial_module(2, top),
                              unstable::free_unstable(1, top),
                              unstable::tensor(unstable::free_unstable(1, top), unstable::polynomial_module(1, top))};
    int saturated = 0, unsaturated = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto em = extend_scalars(ms[testing::uniform(0, ms.size() - 1)]);
        std::vector<std::vector<BitVector>> gens(top + 1);
        const std::size_t count = testing::uniform(1, 3);
        for (std::size_t c = 0; c < count; ++c) {
            const int d = static_cast<int>(testing::uniform(0, top));
            if (em->dim(d))
                gens[d].push_back(testing::random_vector(em->dim(d)));
        }
        auto x = fulu_submodule(em, fulu_closure(em, gens));
        const auto sat = saturation_check(x);
        const auto gen = generator_space(x);
        CHECK(sat.holds == gen.eps_injective.holds);
        if (!sat.holds)
            CHECK(*gen.eps_injective.degree == *sat.degree + 1);
        if (sat.holds) {
            ++saturated;
            std::vector<Subspace> spaces;
            for (int n = 0; n <= top; ++n)
                spaces.push_back(x.sub.span(n));
            auto q = fulu_quotient(em, spaces);
            CHECK(freeness_report(q.module).torsion_free.holds);
        } else {
            ++unsaturated;
        }
    }
    CHECK(saturated > 5);
    CHECK(unsaturated > 5);
}

TEST_CASE("property: Q of an extended map is the map")
{
    const int top = 10;
    std::vector<ModuleRef> targets{unstable::polynomial_module(1, top), unstable::polynomial_module(2, top)};
    for (int trial = 0; trial < 40; ++trial) {
        const int a = static_cast<int>(testing::uniform(0, 3));
        auto fa = unstable::free_unstable(a, top);
        auto t = targets[testing::uniform(0, 1)];
        auto f = unstable::map_from_free(fa, a, t, testing::random_vector(t->dim(a)));
        auto ea = extend_scalars(fa), et = extend_scalars(t);
        auto ef = extend_map(f, ea, et);
        auto qa = indecomposables(ea), qt = indecomposables(et);
        auto qf = indecomposables_map(ef, qa, qt);
        for (int n = 0; n <= top; ++n)
            CHECK(qf[n] == f[n]);
    }
}

TEST_CASE("extension of scalars is exact")
{
    const int top = 12;
    auto s = unstable::sym_lambda(top);
    auto l = extend_scalars(s.lambda2.module), inv = extend_scalars(s.invariants.module), pf = extend_scalars(s.phi_f1);
    auto a = extend_map(s.lambda2.inclusion, l, inv);
    auto b = extend_map(s.diag, inv, pf);
    CHECK_FALSE(unstable::first_non_injective_degree(a.map));
    CHECK_FALSE(unstable::first_non_surjective_degree(b.map));
    CHECK_FALSE(unstable::exactness_failure(a.map, b.map, top));
}

TEST_CASE("tensor over F[u]")
{
    const int top = 9;
    auto fu = extend_scalars(unstable::ground_field(top));
    for (const auto& m : bases(top)) {
        auto em = extend_scalars(m);
        auto t = tensor_over_fulu(fu, em);
        CHECK(t->module->dims() == em->module->dims());
        CHECK(same_action(*t->module, *em->module));
    }
    auto f1 = unstable::free_unstable(1, top), h = unstable::polynomial_module(1, top);
    auto t = tensor_over_fulu(extend_scalars(f1), extend_scalars(h));
    auto e = extend_scalars(unstable::tensor(f1, h));
    CHECK(t->module->dims() == e->module->dims());
    auto rep = freeness_report(t);
    CHECK(rep.free);
    for (int n = 0; n <= top; ++n) {
        std::size_t expect = 0;
        for (int a = 0; a <= n; ++a)
            expect += f1->dim(a) * h->dim(n - a);
        CHECK(rep.basis[n].size() == expect);
    }
}
