#include "support.hpp"

#include "r1kit/unstable.hpp"

#include <doctest.h>

#include <functional>

using namespace r1kit::unstable;
using r1kit::f2::Basis;

namespace {

std::vector<std::size_t> dims_of(const ModuleRef& m) { return m->dims(); }

// Dimension oracle for F(n): count compositions of d - n that are admissible
// with excess at most n, enumerating every composition.
std::size_t free_dim_oracle(int n, int d)
{
    if (d < n)
        return 0;
    std::size_t count = 0;
    std::function<void(int, std::vector<int>&)> rec = [&](int rem, std::vector<int>& w) {
        if (rem == 0) {
            bool adm = true;
            for (std::size_t j = 0; j + 1 < w.size(); ++j)
                adm = adm && w[j] >= 2 * w[j + 1];
            int ex = 0;
            if (!w.empty()) {
                ex = w[0];
                for (std::size_t j = 1; j < w.size(); ++j)
                    ex -= w[j];
            }
            count += adm && ex <= n;
            return;
        }
        for (int i = 1; i <= rem; ++i) {
            w.push_back(i);
            rec(rem - i, w);
            w.pop_back();
        }
    };
    std::vector<int> w;
    rec(d - n, w);
    return count;
}

bool same_action(const TruncatedModule& a, const TruncatedModule& b)
{
    if (a.top() != b.top() || a.dims() != b.dims())
        return false;
    for (int n = 0; n <= a.top(); ++n)
        for (int i = 1; n + i <= a.top(); ++i)
            if (!(a.sq(i, n) == b.sq(i, n)))
                return false;
    return true;
}

// Isomorphism test for modules that are one-dimensional or zero in each degree.
bool same_rank_one_action(const TruncatedModule& a, const TruncatedModule& b)
{
    if (a.top() != b.top() || a.dims() != b.dims())
        return false;
    for (auto d : a.dims())
        if (d > 1)
            return false;
    return same_action(a, b);
}

std::vector<ModuleRef> fixtures(int top)
{
    return {ground_field(top),        free_unstable(1, top),     free_unstable(2, top),
            free_unstable(3, top),    polynomial_module(1, top), polynomial_module(2, top),
            phi(free_unstable(1, top)), suspend(ground_field(top - 1)), sym_lambda(top).lambda2.module};
}

}  // namespace

TEST_CASE("validation reports")
{
    CHECK(validate(*free_unstable(1, 8)).ok());
    SUBCASE("instability")
    {
        auto m = std::make_shared<TruncatedModule>("bad", 4, std::vector<std::size_t>{0, 1, 0, 1, 0});
        m->set_sq(2, 1, BitMatrix{{1}});
        auto r = validate(*m);
        REQUIRE_FALSE(r.ok());
        CHECK(r.violations.front().kind == "instability");
        CHECK(r.violations.front().degree == 1);
        CHECK(r.violations.front().detail.find("i=2, n=1") != std::string::npos);
    }
    SUBCASE("adem")
    {
        auto m = std::make_shared<TruncatedModule>("bad", 3, std::vector<std::size_t>{0, 1, 1, 1});
        m->set_sq(1, 1, BitMatrix{{1}});
        m->set_sq(1, 2, BitMatrix{{1}});
        auto r = validate(*m);
        REQUIRE_FALSE(r.ok());
        CHECK(r.violations.front().kind == "adem");
        CHECK_THROWS_AS(assert_valid(*m), std::logic_error);
    }
}

TEST_CASE("free unstable modules")
{
    CHECK(dims_of(free_unstable(0, 5)) == std::vector<std::size_t>{1, 0, 0, 0, 0, 0});
    auto f1 = free_unstable(1, 16);
    for (int d = 0; d <= 16; ++d)
        CHECK(f1->dim(d) == ((d == 1 || d == 2 || d == 4 || d == 8 || d == 16) ? 1u : 0u));
    auto f2m = free_unstable(2, 8);
    const std::vector<std::size_t> expect{1, 1, 1, 1, 1, 0, 1};
    for (int d = 2; d <= 8; ++d)
        CHECK(f2m->dim(d) == expect[d - 2]);
    for (int n = 0; n <= 4; ++n) {
        auto f = free_unstable(n, 14);
        CHECK(validate(*f).ok());
        CHECK(f->dim(n) == 1);
        for (int d = 0; d <= 14; ++d)
            CHECK(f->dim(d) == free_dim_oracle(n, d));
    }
}

TEST_CASE("polynomial modules")
{
    auto h = polynomial_module(1, 12);
    CHECK(validate(*h).ok());
    for (int n = 1; 2 * n <= 12; ++n)
        for (int i = 1; i <= n; ++i)
            CHECK(h->sq(i, n).get(0, 0) == r1kit::steenrod::binomial_mod2(n, i));
    auto h3 = polynomial_module(3, 9);
    CHECK(validate(*h3).ok());
    CHECK(h3->dim(4) == 15);
}

TEST_CASE("suspension")
{
    auto f0 = ground_field(6);
    CHECK(dims_of(suspend(f0)) == std::vector<std::size_t>{0, 1, 0, 0, 0, 0, 0, 0});
    for (const auto& m : fixtures(8)) {
        auto back = desuspend(suspend(m));
        CHECK(same_action(*back, *m));
        CHECK(validate(*suspend(m)).ok());
    }
    CHECK_THROWS_AS(desuspend(free_unstable(0, 4)), NotASuspension);
    try {
        desuspend(free_unstable(1, 4));
        FAIL("expected NotASuspension");
    } catch (const NotASuspension& e) {
        CHECK(e.degree() == 1);
    }
    auto c = cokernel(sq0(free_unstable(1, 12)));
    CHECK(same_action(*desuspend(c.module), *ground_field(11)));
}

TEST_CASE("Phi and Sq_0")
{
    auto f = ground_field(4);
    CHECK(same_action(*phi(f), *f));
    CHECK(sq0(f)[0] == BitMatrix::identity(1));
    auto pf1 = phi(free_unstable(1, 16));
    for (int d = 0; d <= 16; ++d)
        CHECK(pf1->dim(d) == ((d == 2 || d == 4 || d == 8 || d == 16) ? 1u : 0u));
    CHECK(validate(*pf1).ok());
    auto h = polynomial_module(1, 12);
    auto s = sq0(h);
    CHECK(linearity_violations(s).empty());
    for (int n = 0; 2 * n <= 12; ++n)
        CHECK(s[2 * n] == BitMatrix{{1}});
    for (const auto& m : fixtures(10))
        CHECK(linearity_violations(sq0(m)).empty());
}

TEST_CASE("tensor products")
{
    for (const auto& m : fixtures(8)) {
        auto t = tensor(m, ground_field(8));
        CHECK(same_action(*t, *m));
    }
    auto f1 = free_unstable(1, 10);
    auto tt = tensor(f1, f1);
    CHECK(validate(*tt).ok());
    for (int n = 0; n <= 10; ++n) {
        std::size_t expect = 0;
        for (int a = 0; a <= n; ++a)
            expect += f1->dim(a) * f1->dim(n - a);
        CHECK(tt->dim(n) == expect);
    }
    // Sq^1(i (x) i) = Sq^1 i (x) i + i (x) Sq^1 i
    const auto& s = tt->sq(1, 2);
    CHECK(r1kit::f2::rank(s) == 1);
    CHECK(s.column(0) == r1kit::f2::BitVector::from_string("11"));
    auto h2 = tensor(polynomial_module(1, 9), polynomial_module(1, 9));
    CHECK(same_action(*h2, *polynomial_module(2, 9)));
}

TEST_CASE("direct sums")
{
    std::vector<ModuleRef> parts{free_unstable(1, 8), polynomial_module(1, 8)};
    auto s = direct_sum(parts);
    CHECK(validate(*s).ok());
    CHECK(s->dim(4) == 2);
    auto inc = sum_inclusion(s, parts, 1);
    auto proj = sum_projection(s, parts, 1);
    CHECK(compose(proj, inc).f == identity_map(parts[1]).f);
}

TEST_CASE("subquotients")
{
    auto f1 = free_unstable(1, 12);
    CHECK(kernel(identity_map(f1)).module->total_dim() == 0);
    CHECK(image(zero_map(f1, f1)).module->total_dim() == 0);
    auto c = cokernel(sq0(f1));
    CHECK(same_action(*c.module, *suspend(ground_field(11))));
    auto sq = subquotient(sq0(f1));
    CHECK(sq.kernel.module->total_dim() == 0);

    auto bad = zero_map(f1, f1);
    bad.f[4] = BitMatrix{{1}};
    CHECK_THROWS_AS(subquotient(bad), std::invalid_argument);

    std::vector<Subspace> spaces;
    for (int d = 0; d <= 12; ++d)
        spaces.push_back(d == 2 ? Subspace::full(1) : Subspace(f1->dim(d)));
    CHECK_THROWS_AS(submodule(f1, spaces), std::invalid_argument);
}

TEST_CASE("property: functoriality of kernels and images")
{
    // maps F(a) -> F(b) -> M determined by random elements
    std::vector<ModuleRef> targets{polynomial_module(1, 10), polynomial_module(2, 10), free_unstable(1, 10),
                                   tensor(free_unstable(1, 10), free_unstable(1, 10))};
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int a = static_cast<int>(testing::uniform(0, 3));
        const int b = static_cast<int>(testing::uniform(a, 4));
        auto fa = free_unstable(a, 10), fb = free_unstable(b, 10);
        if (fb->dim(a) == 0)
            continue;
        auto m = targets[testing::uniform(0, targets.size() - 1)];
        auto f = map_from_free(fa, a, fb, testing::random_vector(fb->dim(a)));
        auto g = map_from_free(fb, b, m, testing::random_vector(m->dim(b)));
        auto gf = compose(g, f);
        CHECK(linearity_violations(gf).empty());
        auto im_gf = image(gf), im_g = image(g);
        auto ker_f = kernel(f), ker_gf = kernel(gf);
        for (int d = 0; d <= 10; ++d) {
            CHECK(im_g.span(d).contains(im_gf.span(d)));
            CHECK(ker_gf.span(d).contains(ker_f.span(d)));
        }
        ++checked;
    }
    CHECK(checked > 40);
}

TEST_CASE("omega")
{
    SUBCASE("Omega F(2) = F(1)")
    {
        auto o = omega(free_unstable(2, 12));
        CHECK(o.exact);
        CHECK(same_rank_one_action(*o.omega, *free_unstable(1, 11)));
        CHECK(o.omega1->total_dim() == 0);
    }
    SUBCASE("Omega H*(Z/2) = Phi F[u]")
    {
        auto o = omega(polynomial_module(1, 12));
        CHECK(o.exact);
        CHECK(same_rank_one_action(*o.omega, *phi(polynomial_module(1, 11))));
    }
    SUBCASE("Omega Phi F(1) = Sigma F, Omega_1 Phi F(1) = 0")
    {
        auto o = omega(phi(free_unstable(1, 16)));
        CHECK(o.exact);
        CHECK(same_action(*o.omega, *suspend(ground_field(14))));
        CHECK(o.omega1->total_dim() == 0);
    }
    SUBCASE("non-reduced input has Omega_1 in odd degrees")
    {
        auto o = omega(suspend(ground_field(9)));
        CHECK(o.exact);
        CHECK(o.omega1->dim(1) == 1);
        CHECK(o.omega1->total_dim() == 1);
    }
    for (const auto& m : fixtures(12)) {
        auto o = omega(m);
        CHECK_MESSAGE(o.exact, m->name() << ": " << o.witness);
        CHECK(validate(*o.omega).ok());
        CHECK(validate(*o.omega1).ok());
    }
}

TEST_CASE("property: Kunneth sequence for Omega on reduced fixtures")
{
    const int top = 10;
    std::vector<ModuleRef> reduced{free_unstable(1, top), free_unstable(2, top), polynomial_module(1, top),
                                   ground_field(top)};
    for (const auto& m : reduced)
        for (const auto& n : reduced) {
            auto om = omega(m).omega, on = omega(n).omega;
            auto lhs = omega(tensor(m, n)).omega;
            auto mid = direct_sum({tensor(om, n), tensor(m, on)});
            auto right = suspend(tensor(om, on));
            for (int d = 0; d < top; ++d)
                CHECK(static_cast<long>(lhs->dim(d)) - static_cast<long>(mid->dim(d)) +
                          static_cast<long>(right->dim(d)) ==
                      0);
        }
}

TEST_CASE("reducedness")
{
    for (int n = 0; n <= 3; ++n)
        CHECK(is_reduced(*free_unstable(n, 14)).reduced);
    for (int r = 1; r <= 3; ++r)
        CHECK(is_reduced(*polynomial_module(r, 10)).reduced);
    auto v = is_reduced(*suspend(ground_field(5)));
    CHECK_FALSE(v.reduced);
    CHECK(v.witness_degree == 1);
    CHECK(v.certified == 3);
    CHECK_THROWS(is_reduced(*free_unstable(1, 8), 5));
    std::vector<ModuleRef> reduced{free_unstable(1, 10), free_unstable(2, 10), polynomial_module(1, 10),
                                   polynomial_module(2, 10)};
    for (const auto& m : reduced)
        for (const auto& n : reduced)
            CHECK(is_reduced(*tensor(m, n)).reduced);
}

TEST_CASE("symmetric invariants and Lambda^2")
{
    const int top = 12;
    auto s = sym_lambda(top);
    CHECK(s.iso_to_f2);
    for (int d = 0; d <= top; ++d)
        CHECK(s.invariants.module->dim(d) == s.f2->dim(d));
    CHECK_FALSE(first_non_surjective_degree(s.diag).has_value());
    CHECK(validate(*s.lambda2.module).ok());
    CHECK(s.lambda2.module->dim(3) == 1);
    // inside F(1) (x) F(1) degree 3: basis i(x)Sq1 i, Sq1 i (x) i
    auto v = s.invariants.inclusion[3] * s.lambda2.inclusion[3].column(0);
    CHECK(v == r1kit::f2::BitVector::from_string("11"));
    // 0 -> Lambda^2 -> F(2) -> Phi F(1) -> 0, dimensionwise
    for (int d = 0; d <= top; ++d)
        CHECK(s.lambda2.module->dim(d) + s.phi_f1->dim(d) == s.f2->dim(d));
}
