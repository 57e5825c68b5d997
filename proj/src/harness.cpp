#include "r1kit/harness.hpp"

#include "r1kit/fixture_io.hpp"
#include "r1kit/fulu.hpp"
#include "r1kit/lannes.hpp"
#include "r1kit/singer.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <future>
#include <random>
#include <sstream>

namespace r1kit::harness {

using f2::BitMatrix;
using f2::BitVector;
using f2::Subspace;
using unstable::ModuleMap;
using unstable::ModuleRef;

namespace {

std::string join(const std::vector<std::size_t>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

// Coefficients of prod 1/(1 - s^e).
std::vector<std::size_t> series(const std::vector<int>& exps, int top)
{
    std::vector<std::size_t> c(top + 1, 0);
    c[0] = 1;
    for (int e : exps)
        for (int n = e; n <= top; ++n)
            c[n] += c[n - e];
    return c;
}

std::vector<int> invariant_exponents(int r)
{
    std::vector<int> e{1};
    e.insert(e.end(), r, 2);
    return e;
}

std::vector<std::size_t> dims_of(const unstable::TruncatedModule& m, int top)
{
    std::vector<std::size_t> d;
    for (int n = 0; n <= std::min(top, m.top()); ++n)
        d.push_back(m.dim(n));
    return d;
}

std::string degree_text(int n) { return "degree " + std::to_string(n); }

std::string rank_text(int r) { return r == 1 ? "H*(Z/2)" : "H*((Z/2)^" + std::to_string(r) + ")"; }

class Run {
public:
    Run(std::string id, std::string anchor, int certified)
    {
        r_.id = std::move(id);
        r_.anchor = std::move(anchor);
        r_.certified_degree = certified;
    }

    void param(std::string key, ParamValue v) { r_.params.emplace_back(std::move(key), std::move(v)); }
    void table(std::string name, std::vector<std::size_t> dims) { r_.tables.push_back({std::move(name), std::move(dims)}); }
    void table(const unstable::TruncatedModule& m, int top) { table(m.name(), dims_of(m, top)); }
    void certify(int d) { r_.certified_degree = std::min(r_.certified_degree, d); }

    void fail(const std::string& witness)
    {
        if (r_.pass) {
            r_.pass = false;
            r_.witness = witness;
        }
    }
    bool require(bool ok, const std::string& witness)
    {
        if (!ok)
            fail(witness);
        return ok;
    }
    template <class Opt>
    bool none(const Opt& failure, const std::string& what)
    {
        if (failure)
            fail(what + " fails in " + degree_text(*failure));
        return !failure;
    }

    bool ok() const { return r_.pass; }
    CheckResult take() { return std::move(r_); }

private:
    CheckResult r_;
};

std::optional<int> first_span_mismatch(const std::function<Subspace(int)>& a, const std::function<Subspace(int)>& b,
                                       int top)
{
    for (int n = 0; n <= top; ++n)
        if (!(a(n) == b(n)))
            return n;
    return std::nullopt;
}

std::optional<int> first_dim_mismatch(const unstable::TruncatedModule& m, const std::vector<std::size_t>& expect,
                                      int top)
{
    for (int n = 0; n <= top; ++n)
        if (m.dim(n) != expect.at(n))
            return n;
    return std::nullopt;
}

std::string dim_witness(const unstable::TruncatedModule& m, const std::vector<std::size_t>& expect, int n)
{
    return "dim " + m.name() + " in " + degree_text(n) + " is " + std::to_string(m.dim(n)) + ", expected " +
           std::to_string(expect.at(n));
}

void dims_equal(Run& run, const unstable::TruncatedModule& m, const std::vector<std::size_t>& expect, int top)
{
    if (auto n = first_dim_mismatch(m, expect, top))
        run.fail(dim_witness(m, expect, *n));
}

// Exactness of 0 -> A -f-> B -g-> C -> 0 through top.
void short_exact(Run& run, const unstable::GradedLinearMap& f, const unstable::GradedLinearMap& g, int top,
                 const std::string& what)
{
    run.none(unstable::first_non_injective_degree(f), what + ": injectivity of " + f.source->name() + " -> " +
                                                           f.target->name());
    run.none(unstable::exactness_failure(f, g, top), what + ": exactness at " + f.target->name());
    run.none(unstable::first_non_surjective_degree(g), what + ": surjectivity onto " + g.target->name());
}

std::vector<std::pair<std::string, ModuleRef>> standard_fixtures(const Params& p)
{
    const int d = p.max_degree;
    std::vector<std::pair<std::string, ModuleRef>> out;
    for (const auto& name : module_names()) {
        if (name == "H3" && p.max_rank < 3)
            continue;
        if (name == "H2" && p.max_rank < 2)
            continue;
        out.emplace_back(name, named_module(name, d));
    }
    if (p.fixture)
        out.emplace_back("fixture", p.fixture);
    return out;
}

// ---- T1, T2: R~1 H*(V), invariants and R1 --------------------------------

CheckResult t1(const Params& p)
{
    Run run("T1", "R̃₁H*(V) = H*(V⊕𝔽)^{G_V}", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    for (int r = 0; r <= p.max_rank; ++r) {
        lannes::LannesContext c(lannes::RealmObject::polynomial(r, d));
        const auto rt = lannes::rtilde(c);
        const auto inv = lannes::gv_invariants(r, d);
        const auto oracle = series(invariant_exponents(r), d);
        run.require(rt.definitions_agree, "ker τ̄ differs from the equalizer of σ, τ for " + rank_text(r));
        run.none(first_span_mismatch([&](int n) { return rt.kernel.sub.span(n); },
                                     [&](int n) { return inv.span(n); }, d),
                 "R̃₁ = G_V-invariants for " + rank_text(r));
        dims_equal(run, *inv.module, oracle, d);
        run.table("R̃₁" + rank_text(r), dims_of(*rt.kernel.module->module, d));
    }
    return run.take();
}

CheckResult t2(const Params& p)
{
    Run run("T2", "R₁ = R̃₁ on H*(V)", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    for (int r = 0; r <= p.max_rank; ++r) {
        lannes::LannesContext c(lannes::RealmObject::polynomial(r, d));
        const auto rt = lannes::rtilde(c);
        const auto r1 = singer::r1(unstable::polynomial_module(r, d));
        run.require(r1.distinguished, "St₁ family dependent for " + rank_text(r));
        run.none(first_span_mismatch([&](int n) { return rt.kernel.sub.span(n); },
                                     [&](int n) { return r1.r1.sub.span(n); }, d),
                 "St₁-span = ker τ̄ for " + rank_text(r));
        run.table(*r1.r1.module->module, d);
    }
    return run.take();
}

// ---- T3: Fix ---------------------------------------------------------------

CheckResult t3(const Params& p)
{
    Run run("T3", "Fix R̃₁M ≅ M", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    std::vector<lannes::RealmObject> realms;
    for (int r = 0; r <= p.max_rank; ++r)
        realms.push_back(lannes::RealmObject::polynomial(r, d));
    realms.push_back(lannes::RealmObject({{1, 1}}, d));
    for (const auto& x : realms) {
        lannes::FixData f(x);
        const auto fix = lannes::fix_presented(f, {lannes::PresentationKind::kernel, lannes::DefiningMap::tau_bar});
        dims_equal(run, *fix, dims_of(*x.module(), d), d);
        // map level: M -> TM is injective with image Fix R~1 M = ker J
        const auto ker = unstable::kernel(f.j);
        run.none(unstable::first_non_injective_degree(f.unit), "M -> TM for " + x.name());
        run.none(first_span_mismatch([&](int n) { return f2::image(f.unit[n]); },
                                     [&](int n) { return ker.span(n); }, d),
                 "image of M in TM = Fix R̃₁M for " + x.name());
        run.table("Fix R̃₁" + x.name(), dims_of(*fix, d));
    }
    return run.take();
}

// ---- T4, T5, T17: Singer structure ----------------------------------------

std::vector<std::pair<std::string, ModuleRef>> singer_fixtures(int d)
{
    return {{"F1", named_module("F1", d)},
            {"F2", named_module("F2", d)},
            {"F1xF1", named_module("F1xF1", d)},
            {"H", named_module("H", d)}};
}

CheckResult t4(const Params& p)
{
    Run run("T4", "R₁M is 𝔽[u]-free on {St₁(b)}", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    for (const auto& [name, m] : singer_fixtures(d)) {
        const auto r = singer::r1(m);
        run.require(r.distinguished, "u^k St₁(b) dependent for " + name);
        const auto fr = fulu::freeness_report(r.module());
        run.require(fr.free, "R₁" + name + " not free: " + fr.torsion_free.witness);
        const auto phi = unstable::phi(m);
        std::vector<std::size_t> expect(d + 1, 0);
        for (int n = 0; n <= d; ++n)
            for (int k = 0; k <= n; ++k)
                expect[n] += phi->dim(n - k);
        dims_equal(run, *r.module()->module, expect, d);
        for (int n = 0; n <= d; ++n)
            run.require(fr.basis[n].size() == phi->dim(n),
                        "free basis of R₁" + name + " has " + std::to_string(fr.basis[n].size()) +
                            " elements in " + degree_text(n) + ", ΦM has " + std::to_string(phi->dim(n)));
        run.table(*r.module()->module, d);
    }
    return run.take();
}

CheckResult t5(const Params& p)
{
    Run run("T5", "0 → uR₁M → R₁M → ΦM → 0", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    for (const auto& [name, m] : singer_fixtures(d)) {
        const auto r = singer::r1(m);
        const auto rho = singer::rho1(r);
        run.require(rho.ok(), "ρ₁ for " + name + ": " + rho.witness);
        run.none(unstable::first_non_injective_degree(rho.u_r1.inclusion.map), "uR₁" + name + " → R₁" + name);
        run.table(*rho.u_r1.module->module, d);
    }
    return run.take();
}

CheckResult t17(const Params& p)
{
    Run run("T17", "ρ̃_P : R̃₁P ↠ ΦP is surjective for P = F(n)", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    for (int k = 0; k <= 3; ++k) {
        const auto fk = unstable::free_unstable(k, d);
        const auto r = singer::r1(fk);
        const auto phi = unstable::phi(fk);
        const auto sq0 = unstable::sq0(fk, phi);
        const auto eps = fulu::augmentation(r.extended);
        const auto& mod = r.module()->module;
        // Sq_0 rho~ = eps on R1 F(n) with Sq_0 injective
        std::vector<BitMatrix> f;
        bool solvable = true;
        for (int n = 0; n <= d && solvable; ++n) {
            BitMatrix a(phi->dim(n), mod->dim(n));
            const BitMatrix e = eps[n] * r.r1.sub.inclusion[n];
            for (std::size_t c = 0; c < mod->dim(n); ++c) {
                const auto x = f2::solve(sq0[n], e.column(c));
                if (!x) {
                    run.fail("ε(" + mod->label(n, c) + ") is not in the image of Sq₀ on F(" + std::to_string(k) +
                             ")");
                    solvable = false;
                    break;
                }
                a.set_column(c, *x);
            }
            f.push_back(std::move(a));
        }
        if (!solvable)
            continue;
        run.none(unstable::first_non_injective_degree(sq0), "Sq₀ on F(" + std::to_string(k) + ")");
        ModuleMap rho;
        try {
            rho = unstable::make_map(mod, phi, std::move(f));
        } catch (const std::invalid_argument& e) {
            run.fail(std::string("ρ̃ is not A-linear: ") + e.what());
            continue;
        }
        run.none(unstable::first_non_surjective_degree(rho), "surjectivity of ρ̃ on F(" + std::to_string(k) + ")");
        const auto rho1 = singer::rho1(r);
        for (int n = 0; n <= d; ++n)
            run.require(rho[n] == rho1.rho[n], "ρ̃ differs from ρ₁ on F(" + std::to_string(k) + ") in " +
                                                   degree_text(n));
        run.table("ΦF(" + std::to_string(k) + ")", dims_of(*phi, d));
    }
    return run.take();
}

// ---- T6: product -------------------------------------------------------------

CheckResult t6(const Params& p)
{
    Run run("T6", "R₁M ⊗_{𝔽[u]} R₁N ≅ R₁(M⊗N)", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    const auto h = unstable::polynomial_module(1, d);
    const auto hh = unstable::tensor(h, h);
    const auto rh = singer::r1(h);
    const auto rhh = singer::r1(hh);
    const auto cert = singer::product_mu(rh, rh, rhh);
    run.certify(cert.certified);
    run.require(cert.linear, "μ is not A-linear");
    if (!cert.ok())
        run.fail("μ is not an isomorphism onto R₁(H*(Z/2)⊗H*(Z/2)) in " +
                 degree_text(cert.failure_degree.value_or(-1)));
    dims_equal(run, *rhh.module()->module, series({1, 2, 2}, d), cert.certified);
    dims_equal(run, *cert.source.module->module, series({1, 2, 2}, d), cert.certified);
    run.table(*rhh.module()->module, d);
    return run.take();
}

// ---- T7, T8: sequences on realm objects -------------------------------------

CheckResult t7(const Params& p)
{
    Run run("T7", "0 → R̃₁M → 𝔽[u]⊗M → C₁M → 0 for reduced M", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    for (int r = 0; r <= p.max_rank; ++r) {
        const auto x = lannes::RealmObject::polynomial(r, d);
        const std::string name = x.name();
        lannes::LannesContext c(x);
        const auto rt = lannes::rtilde(c);
        const auto cf = lannes::c_functors(c);
        const auto to_c1 = fulu::fulu_corestrict(c.maps.tau_bar, cf.c1);
        short_exact(run, rt.kernel.inclusion.map, to_c1.map, d, "R̃₁ sequence for " + name);

        const auto q_r = fulu::indecomposables(rt.kernel.module);
        const auto q_m = fulu::indecomposables(c.maps.ext_m);
        const auto q_c1 = fulu::indecomposables(cf.c1.module);
        short_exact(run, fulu::indecomposables_map(rt.kernel.inclusion, q_r, q_m),
                    fulu::indecomposables_map(to_c1, q_m, q_c1), d, "Q-sequence for " + name);
        const auto om = unstable::omega(x.module());
        dims_equal(run, *q_r.module, dims_of(*om.phi_module, d), d);
        dims_equal(run, *q_c1.module, dims_of(*om.sq0_cokernel.module, d), d);

        lannes::FixData f(x);
        const auto fix_c1 = unstable::image(f.j);
        short_exact(run, f.unit, unstable::corestrict(f.j, fix_c1), d, "Fix sequence for " + name);
        dims_equal(run, *fix_c1.module, dims_of(*c.tbar.module(), d), d);

        const auto fr = fulu::freeness_report(cf.c1.module);
        run.require(fr.torsion_free.holds, "C₁" + name + " has u-torsion: " + fr.torsion_free.witness);
        const auto red = unstable::is_reduced(*cf.c1.module->module);
        run.require(red.reduced, "C₁" + name + " is not reduced: " + red.witness);
        run.table(*cf.c1.module->module, d);
        run.table("Q(C₁" + name + ")", dims_of(*q_c1.module, d));
    }
    return run.take();
}

CheckResult t8(const Params& p)
{
    Run run("T8", "0 → R̃₁M → 𝔽[u]⊗M → 𝔽̄[u]⊗T̄M → C₂M → 0 for nilclosed M", p.max_degree);
    const int d = p.max_degree;
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    for (int r = 1; r <= p.max_rank; ++r) {
        const auto x = lannes::RealmObject::polynomial(r, d);
        const std::string name = x.name();
        lannes::LannesContext c(x);
        const auto rt = lannes::rtilde(c);
        const auto cf = lannes::c_functors(c);
        const auto& tb = c.maps.tau_bar;
        run.none(unstable::first_non_injective_degree(rt.kernel.inclusion.map), "R̃₁" + name + " → 𝔽[u]⊗M");
        run.none(unstable::exactness_failure(rt.kernel.inclusion.map, tb.map, d), "exactness at 𝔽[u]⊗" + name);
        run.none(unstable::exactness_failure(tb.map, cf.c2.projection.map, d), "exactness at 𝔽̄[u]⊗T̄" + name);
        run.none(unstable::first_non_surjective_degree(cf.c2.projection.map), "surjectivity onto C₂" + name);

        // Q-sequence 0 -> PhiM -> M -> Sigma T-bar M -> Sigma (M : F[u]u^2) -> 0
        const auto q_r = fulu::indecomposables(rt.kernel.module);
        const auto q_m = fulu::indecomposables(c.maps.ext_m);
        const auto q_bar = fulu::indecomposables(c.maps.bar.module);
        const auto q_c2 = fulu::indecomposables(cf.c2.module);
        const auto g1 = fulu::indecomposables_map(rt.kernel.inclusion, q_r, q_m);
        const auto g2 = fulu::indecomposables_map(tb, q_m, q_bar);
        const auto g3 = fulu::indecomposables_map(cf.c2.projection, q_bar, q_c2);
        run.none(unstable::first_non_injective_degree(g1), "Q-sequence: ΦM → M for " + name);
        run.none(unstable::exactness_failure(g1, g2, d), "Q-sequence: exactness at " + name);
        run.none(unstable::exactness_failure(g2, g3, d), "Q-sequence: exactness at ΣT̄" + name);
        run.none(unstable::first_non_surjective_degree(g3), "Q-sequence: surjectivity for " + name);
        const auto div = lannes::division_u2(lannes::alpha(c));
        dims_equal(run, *q_r.module, dims_of(*unstable::phi(x.module()), d), d);
        dims_equal(run, *q_bar.module, dims_of(*unstable::suspend(c.tbar.module()), d), d);
        dims_equal(run, *q_c2.module, dims_of(*unstable::suspend(div.div.module), d), d);

        // Fix-sequence 0 -> M -> TM -> TT-bar M -> T-bar^2 M -> 0
        lannes::FixData f(x);
        run.none(unstable::first_non_injective_degree(f.unit), "Fix sequence: M → TM for " + name);
        run.none(unstable::exactness_failure(f.unit, f.j, d), "Fix sequence: exactness at T" + name);
        run.none(unstable::exactness_failure(f.j, f.k, d), "Fix sequence: exactness at TT̄" + name);
        run.none(unstable::first_non_surjective_degree(f.k), "Fix sequence: surjectivity onto T̄²" + name);
        const std::size_t v = std::size_t{1} << r;
        for (int n = 0; n <= d; ++n) {
            const std::size_t m = x.module()->dim(n);
            const bool ok = f.t1.module()->dim(n) == v * m && f.ttbar.module()->dim(n) == v * (v - 1) * m &&
                            f.tbar2.module()->dim(n) == (v - 1) * (v - 1) * m;
            run.require(ok, "Fix sequence dims for " + name + " in " + degree_text(n));
            const long alt = static_cast<long>(m) - static_cast<long>(f.t1.module()->dim(n)) +
                             static_cast<long>(f.ttbar.module()->dim(n)) -
                             static_cast<long>(f.tbar2.module()->dim(n));
            run.require(alt == 0, "Fix sequence alternating sum nonzero for " + name + " in " + degree_text(n));
        }

        const auto fr = fulu::freeness_report(cf.c2.module);
        run.require(fr.torsion_free.holds, "C₂" + name + " has u-torsion: " + fr.torsion_free.witness);
        const auto fr1 = fulu::freeness_report(cf.c1.module);
        run.require(fr1.torsion_free.holds, "C₁" + name + " has u-torsion: " + fr1.torsion_free.witness);
        run.table(*cf.c2.module->module, d);
        run.table("Σ(" + name + ":𝔽[u]u²)", dims_of(*q_c2.module, d));
    }
    return run.take();
}

// ---- T9-T13: loop functors and division ---------------------------------------

CheckResult t9(const Params& p)
{
    Run run("T9", "0 → ΣΩ₁M → ΦM → M → ΣΩM → 0", p.max_degree);
    run.param("D", p.max_degree);
    for (const auto& [name, m] : standard_fixtures(p)) {
        const auto report = unstable::validate(*m);
        if (!report.ok()) {
            const auto& v = report.violations.front();
            run.fail(m->name() + " is not an unstable module (" + v.kind + "): " + v.detail);
            continue;
        }
        if (m->top() < 2) {
            run.fail(m->name() + " is truncated below degree 2");
            continue;
        }
        run.certify(m->top());
        try {
            const auto om = unstable::omega(m);
            run.require(om.exact, "Ω sequence for " + m->name() + ": " + om.witness);
            if (name != "fixture")
                continue;
            run.table(*om.omega, om.omega->top());
        } catch (const std::exception& e) {
            run.fail(m->name() + ": " + e.what());
        }
    }
    const auto om = unstable::omega(named_module("H", p.max_degree));
    run.table(*om.omega, om.omega->top());
    return run.take();
}

std::vector<std::size_t> convolve(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b, int top)
{
    std::vector<std::size_t> c(top + 1, 0);
    for (int n = 0; n <= top; ++n)
        for (int i = 0; i <= n; ++i)
            if (i < static_cast<int>(a.size()) && n - i < static_cast<int>(b.size()))
                c[n] += a[i] * b[n - i];
    return c;
}

CheckResult t10(const Params& p)
{
    const int d = std::min(p.max_degree, 8);
    Run run("T10", "0 → ΩM⊗N ⊕ M⊗ΩN → Ω(M⊗N) → Σ(ΩM⊗ΩN) → 0 (dimensions)", d - 1);
    run.param("D", d);
    const std::vector<std::pair<std::string, std::string>> pairs{{"H", "H"}, {"F1", "H"}, {"F1", "F2"}};
    for (const auto& [a, b] : pairs) {
        const auto m = named_module(a, d);
        const auto n = named_module(b, d);
        const auto om = unstable::omega(m).omega;
        const auto on = unstable::omega(n).omega;
        const auto omn = unstable::omega(unstable::tensor(m, n)).omega;
        const int top = d - 1;
        const auto dm = dims_of(*m, d), dn = dims_of(*n, d), dom = dims_of(*om, top), don = dims_of(*on, top);
        const auto left = convolve(dom, dn, top);
        const auto right = convolve(dm, don, top);
        const auto both = convolve(dom, don, top);
        for (int k = 0; k <= top; ++k) {
            const long alt = static_cast<long>(omn->dim(k)) - static_cast<long>(left[k] + right[k]) +
                             static_cast<long>(k >= 1 ? both[k - 1] : 0);
            run.require(alt == 0, "alternating sum " + std::to_string(alt) + " for Ω(" + m->name() + "⊗" +
                                      n->name() + ") in " + degree_text(k));
        }
        run.table(*omn, top);
    }
    return run.take();
}

CheckResult t11(const Params& p)
{
    const int d = p.max_degree;
    Run run("T11", "ΩH*(V) is reduced", (d - 1) / 2);
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    for (int r = 1; r <= p.max_rank; ++r) {
        const auto om = unstable::omega(unstable::polynomial_module(r, d));
        const auto v = unstable::is_reduced(*om.omega, om.omega->top() / 2);
        run.require(v.reduced, om.omega->name() + ": " + v.witness);
        run.certify(v.certified);
        run.table(*om.omega, om.omega->top());
    }
    return run.take();
}

CheckResult t12(const Params& p)
{
    const int d = p.max_degree;
    Run run("T12", "α_{ΦF(1)} = 0 and (ΦF(1):𝔽[u]u²)₁ = Σ𝔽", d - 1);
    run.param("D", d);
    const auto a = lannes::alpha_phi_f1(d);
    run.require(a.kills_sq0, "the unit ΦF(1) → ΣT̄ΦF(1) does not vanish on im Sq₀");
    for (int n = 0; n <= a.alpha.top(); ++n)
        run.require(a.alpha[n].is_zero(), "α_{ΦF(1)} nonzero in " + degree_text(n));
    const auto div = lannes::division_u2(a);
    std::vector<std::size_t> expect(d + 1, 0);
    expect[1] = 1;
    dims_equal(run, *div.derived1.module, expect, div.derived1.module->top());
    run.table(*div.derived1.module, d);
    run.table(*div.div.module, d);
    return run.take();
}

CheckResult t13(const Params& p)
{
    const int d = p.max_degree;
    Run run("T13", "0 → Λ²F(1) → F(2) → ΦF(1) → 0 and non-exactness of (−:𝔽[u]u²)", d);
    run.param("D", d);
    const auto s = unstable::sym_lambda(d);
    run.require(s.iso_to_f2, "F(2) → (F(1)⊗F(1))^{S₂} is not an isomorphism");
    short_exact(run, s.lambda2.inclusion, s.diag, d, "Λ² sequence");
    // Phi F(1) has (-:F[u]u^2)_1 = Sigma F, while the first derived division vanishes on nilclosed modules
    const auto div = lannes::division_u2(lannes::alpha_phi_f1(d));
    run.require(div.derived1.module->dim(1) == 1,
                "(ΦF(1):𝔽[u]u²)₁ vanishes in degree 1, no non-exactness witness");
    for (int r = 1; r <= std::min(p.max_rank, 2); ++r) {
        lannes::LannesContext c(lannes::RealmObject::polynomial(r, d));
        const auto dr = lannes::division_u2(lannes::alpha(c));
        run.require(dr.derived1.module->total_dim() == 0,
                    "(" + rank_text(r) + ":𝔽[u]u²)₁ is nonzero for a nilclosed module");
    }
    run.table(*s.lambda2.module, d);
    run.table(*s.f2, d);
    run.table(*s.phi_f1, d);
    return run.take();
}

// ---- T14, T15: saturation and freeness over F[u] ---------------------------

std::vector<fulu::FuluRef> closure_ambients(const Params& p, int top)
{
    std::vector<fulu::FuluRef> out{fulu::extend_scalars(unstable::polynomial_module(1, top)),
                                   fulu::extend_scalars(unstable::free_unstable(1, top)),
                                   fulu::extend_scalars(unstable::tensor(unstable::free_unstable(1, top),
                                                                         unstable::polynomial_module(1, top)))};
    if (p.max_rank >= 2)
        out.push_back(fulu::extend_scalars(unstable::polynomial_module(2, top)));
    return out;
}

fulu::FuluSubmodule random_closure(const fulu::FuluRef& em, std::mt19937_64& gen, int top)
{
    std::uniform_int_distribution<int> degree(0, top);
    std::uniform_int_distribution<int> count(1, 3);
    std::bernoulli_distribution bit(0.5);
    std::vector<std::vector<BitVector>> gens(top + 1);
    const int k = count(gen);
    for (int c = 0; c < k; ++c) {
        const int n = degree(gen);
        BitVector v(em->dim(n));
        for (std::size_t i = 0; i < v.size(); ++i)
            if (bit(gen))
                v.set(i);
        gens[n].push_back(std::move(v));
    }
    return fulu::fulu_submodule(em, fulu::fulu_closure(em, gens));
}

CheckResult t14(const Params& p)
{
    const int top = std::min(p.max_degree, 9);
    Run run("T14", "X ⊆ 𝔽[u]⊗M is saturated ⇔ ε is injective on its generators", top);
    const int instances = 120;
    run.param("D", top);
    run.param("seed", static_cast<long long>(p.seed));
    run.param("instances", instances);
    std::mt19937_64 gen(p.seed);
    const auto ambients = closure_ambients(p, top);
    std::uniform_int_distribution<std::size_t> pick(0, ambients.size() - 1);
    std::size_t saturated = 0;
    for (int t = 0; t < instances; ++t) {
        const auto& em = ambients[pick(gen)];
        const auto x = random_closure(em, gen, top);
        const auto sat = fulu::saturation_check(x);
        const auto gs = fulu::generator_space(x);
        if (sat.holds != gs.eps_injective.holds) {
            run.fail("instance " + std::to_string(t) + " in " + em->name() + ": saturation " +
                     (sat.holds ? "holds" : "fails (" + sat.witness + ")") + " but ε on generators is " +
                     (gs.eps_injective.holds ? "injective" : "not injective (" + gs.eps_injective.witness + ")"));
            continue;
        }
        if (!sat.holds) {
            run.require(gs.eps_injective.degree == std::optional<int>(*sat.degree + 1),
                        "instance " + std::to_string(t) + ": failure degrees do not correspond");
            continue;
        }
        ++saturated;
        std::vector<Subspace> spaces;
        for (int n = 0; n <= top; ++n)
            spaces.push_back(x.sub.span(n));
        const auto q = fulu::fulu_quotient(em, spaces);
        const auto fr = fulu::freeness_report(q.module);
        run.require(fr.torsion_free.holds, "instance " + std::to_string(t) + ": saturated but " + q.module->name() +
                                               " has u-torsion: " + fr.torsion_free.witness);
    }
    run.table("saturated/unsaturated", {saturated, instances - saturated});
    return run.take();
}

CheckResult t15(const Params& p)
{
    const int d = p.max_degree;
    Run run("T15", "a connected 𝔽[u]-module is free iff it is u-torsion-free", d);
    run.param("D", d);
    run.param("seed", static_cast<long long>(p.seed));
    std::vector<fulu::FuluRef> modules;
    for (const auto& name : {"F0", "F1", "F2", "H", "PhiF1", "F1xF1"})
        modules.push_back(fulu::extend_scalars(named_module(name, d)));
    modules.push_back(singer::r1(named_module("F1", d)).module());
    modules.push_back(singer::r1(named_module("H", d)).module());
    {
        lannes::LannesContext c(lannes::RealmObject::polynomial(1, d));
        modules.push_back(lannes::c_functors(c).c2.module);
    }
    // F[u]/(u^2): torsion
    const auto e0 = fulu::extend_scalars(unstable::ground_field(d));
    std::vector<Subspace> u2;
    for (int n = 0; n <= d; ++n)
        u2.push_back(n >= 2 ? Subspace::full(e0->dim(n)) : Subspace(e0->dim(n)));
    modules.push_back(fulu::fulu_quotient(e0, u2, "𝔽[u]/(u²)").module);
    std::mt19937_64 gen(p.seed ^ 0x9e3779b97f4a7c15ULL);
    const int top = std::min(d, 8);
    const auto amb = fulu::extend_scalars(unstable::polynomial_module(1, top));
    for (int t = 0; t < 20; ++t) {
        const auto x = random_closure(amb, gen, top);
        std::vector<Subspace> spaces;
        for (int n = 0; n <= top; ++n)
            spaces.push_back(x.sub.span(n));
        modules.push_back(fulu::fulu_quotient(amb, spaces).module);
    }
    std::size_t free = 0, torsion = 0;
    for (const auto& m : modules) {
        const auto fr = fulu::freeness_report(m);
        run.certify(fr.torsion_free.certified);
        run.require(fr.torsion_free.holds == fr.free, m->name() + ": torsion-free " +
                                                          (fr.torsion_free.holds ? "yes" : "no") + ", free " +
                                                          (fr.free ? "yes" : "no"));
        (fr.free ? free : torsion) += 1;
    }
    run.require(torsion > 0, "no torsion fixture exercised");
    run.table("free/torsion", {free, torsion});
    return run.take();
}

// ---- T16 -----------------------------------------------------------------------

CheckResult t16(const Params& p)
{
    const int d = p.max_degree;
    Run run("T16", "R̃₁ commutes with Σ and with ⊗X for X locally finite", d);
    run.param("D", d);
    run.param("max_rank", p.max_rank);
    for (int r = 0; r <= p.max_rank; ++r) {
        lannes::LannesContext base(lannes::RealmObject::polynomial(r, d));
        const auto rm = lannes::rtilde(base);
        const auto& dims = *rm.kernel.module->module;
        for (int s = 1; s <= 2; ++s) {
            lannes::LannesContext c(lannes::RealmObject({{s, r}}, d));
            const auto rs = lannes::rtilde(c);
            std::vector<std::size_t> expect(d + 1, 0);
            for (int n = s; n <= d; ++n)
                expect[n] = dims.dim(n - s);
            dims_equal(run, *rs.kernel.module->module, expect, d);
        }
        // X = F + Sigma^2 F: M (x) X = M + Sigma^2 M
        lannes::LannesContext c(lannes::RealmObject({{0, r}, {2, r}}, d));
        const auto rx = lannes::rtilde(c);
        std::vector<std::size_t> expect(d + 1, 0);
        for (int n = 0; n <= d; ++n)
            expect[n] = dims.dim(n) + (n >= 2 ? dims.dim(n - 2) : 0);
        dims_equal(run, *rx.kernel.module->module, expect, d);
        run.require(rx.definitions_agree, "equalizer and ker τ̄ differ on " + c.x.name());
        run.table(*rx.kernel.module->module, d);
    }
    return run.take();
}

std::vector<CheckSpec> build_catalog()
{
    return {
        {"T1", "R̃₁H*(V) = H*(V⊕𝔽)^{G_V}", t1},
        {"T2", "R₁ = R̃₁ on H*(V)", t2},
        {"T3", "Fix R̃₁M ≅ M", t3},
        {"T4", "R₁M is 𝔽[u]-free on {St₁(b)}", t4},
        {"T5", "0 → uR₁M → R₁M → ΦM → 0", t5},
        {"T6", "R₁M ⊗_{𝔽[u]} R₁N ≅ R₁(M⊗N)", t6},
        {"T7", "0 → R̃₁M → 𝔽[u]⊗M → C₁M → 0 for reduced M", t7},
        {"T8", "0 → R̃₁M → 𝔽[u]⊗M → 𝔽̄[u]⊗T̄M → C₂M → 0 for nilclosed M", t8},
        {"T9", "0 → ΣΩ₁M → ΦM → M → ΣΩM → 0", t9},
        {"T10", "0 → ΩM⊗N ⊕ M⊗ΩN → Ω(M⊗N) → Σ(ΩM⊗ΩN) → 0 (dimensions)", t10},
        {"T11", "ΩH*(V) is reduced", t11},
        {"T12", "α_{ΦF(1)} = 0 and (ΦF(1):𝔽[u]u²)₁ = Σ𝔽", t12},
        {"T13", "0 → Λ²F(1) → F(2) → ΦF(1) → 0 and non-exactness of (−:𝔽[u]u²)", t13},
        {"T14", "X ⊆ 𝔽[u]⊗M is saturated ⇔ ε is injective on its generators", t14},
        {"T15", "a connected 𝔽[u]-module is free iff it is u-torsion-free", t15},
        {"T16", "R̃₁ commutes with Σ and with ⊗X for X locally finite", t16},
        {"T17", "ρ̃_P : R̃₁P ↠ ΦP is surjective for P = F(n)", t17},
    };
}

}  // namespace

void check_params(const Params& p)
{
    if (p.max_degree < min_degree || p.max_degree > max_degree_limit)
        throw UsageError("max degree must lie in [" + std::to_string(min_degree) + ", " +
                         std::to_string(max_degree_limit) + "], got " + std::to_string(p.max_degree));
    if (p.max_rank < 1 || p.max_rank > max_rank_limit)
        throw UsageError("max rank must lie in [1, " + std::to_string(max_rank_limit) + "], got " +
                         std::to_string(p.max_rank));
}

const std::vector<CheckSpec>& catalog()
{
    static const std::vector<CheckSpec> c = build_catalog();
    return c;
}

CheckResult run_check(const std::string& id, const Params& p)
{
    check_params(p);
    for (const auto& spec : catalog()) {
        if (spec.id != id)
            continue;
        const auto start = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = spec.run(p);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            r = CheckResult{};
            r.id = spec.id;
            r.anchor = spec.anchor;
            r.pass = false;
            r.witness = std::string("error: ") + e.what();
        }
        r.id = spec.id;
        r.anchor = spec.anchor;
        r.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return r;
    }
    throw UsageError("unknown check id '" + id + "'");
}

std::vector<CheckResult> run_all(const Params& p)
{
    check_params(p);
    std::vector<std::future<CheckResult>> futures;
    for (const auto& spec : catalog())
        futures.push_back(std::async(std::launch::async, [&p, id = spec.id] { return run_check(id, p); }));
    std::vector<CheckResult> out;
    for (auto& f : futures)
        out.push_back(f.get());
    return out;
}

int exit_code(const std::vector<CheckResult>& results)
{
    for (const auto& r : results)
        if (!r.pass)
            return 1;
    return 0;
}

namespace {

std::string param_text(const ParamValue& v)
{
    if (const auto* i = std::get_if<long long>(&v))
        return std::to_string(*i);
    return std::get<std::string>(v);
}

}  // namespace

std::string report_text(const std::vector<CheckResult>& results, bool timing)
{
    if (results.empty())
        return "";
    std::ostringstream out;
    std::size_t passed = 0;
    for (const auto& r : results) {
        passed += r.pass;
        out << r.id << "  " << (r.pass ? "PASS" : "FAIL") << "  " << r.anchor << '\n';
        out << "    certified through degree " << r.certified_degree;
        if (!r.params.empty()) {
            out << "; params:";
            for (const auto& [k, v] : r.params)
                out << ' ' << k << '=' << param_text(v);
        }
        if (timing)
            out << "; " << static_cast<long long>(r.millis) << " ms";
        out << '\n';
        if (!r.pass)
            out << "    witness: " << r.witness << '\n';
        for (const auto& t : r.tables)
            out << "    " << t.name << ": " << join(t.dims) << '\n';
    }
    out << passed << '/' << results.size() << " checks passed\n";
    return out.str();
}

std::string report_json(const std::vector<CheckResult>& results, bool timing)
{
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json rec;
        rec["check_id"] = r.id;
        rec["anchor"] = r.anchor;
        nlohmann::ordered_json params = nlohmann::ordered_json::object();
        for (const auto& [k, v] : r.params) {
            if (const auto* i = std::get_if<long long>(&v))
                params[k] = *i;
            else
                params[k] = std::get<std::string>(v);
        }
        rec["params"] = params;
        rec["pass"] = r.pass;
        rec["certified_degree"] = r.certified_degree;
        if (!r.pass)
            rec["witness"] = r.witness;
        nlohmann::ordered_json tables = nlohmann::ordered_json::array();
        for (const auto& t : r.tables)
            tables.push_back({{"name", t.name}, {"dims", t.dims}});
        rec["poincare"] = tables;
        if (timing)
            rec["millis"] = static_cast<long long>(r.millis);
        doc.push_back(rec);
    }
    return doc.dump(2) + "\n";
}

const std::vector<std::string>& module_names()
{
    static const std::vector<std::string> names{"F0",      "F1",        "F2",    "F3", "H",  "H2",
                                                "PhiF1",   "SigmaF0",   "Lambda2F1", "F1xF1"};
    return names;
}

ModuleRef named_module(const std::string& name, int top)
{
    if (top < 0)
        throw UsageError("negative max degree");
    if (name.size() == 2 && name[0] == 'F' && name[1] >= '0' && name[1] <= '9')
        return unstable::free_unstable(name[1] - '0', top);
    if (name == "H")
        return unstable::polynomial_module(1, top);
    if (name.size() == 2 && name[0] == 'H' && name[1] >= '0' && name[1] <= '4')
        return unstable::polynomial_module(name[1] - '0', top);
    if (name == "PhiF1")
        return unstable::phi(unstable::free_unstable(1, top));
    if (name == "SigmaF0") {
        if (top < 1)
            throw UsageError("SigmaF0 needs max degree >= 1");
        return unstable::suspend(unstable::ground_field(top - 1));
    }
    if (name == "Lambda2F1")
        return unstable::sym_lambda(top).lambda2.module;
    if (name == "F1xF1")
        return unstable::tensor(unstable::free_unstable(1, top), unstable::free_unstable(1, top));
    if (std::filesystem::exists(name)) {
        try {
            return io::load_fixture(name).module;
        } catch (const io::FixtureError& e) {
            throw UsageError(name + ": " + e.what());
        }
    }
    throw UsageError("unknown module '" + name + "' (not a known name or a fixture file)");
}

}  // namespace r1kit::harness
