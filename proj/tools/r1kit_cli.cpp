// r1kit: compute Singer and Lannes constructions on truncated unstable modules,
// and run the verification catalog.

#include "r1kit/fixture_io.hpp"
#include "r1kit/harness.hpp"
#include "r1kit/lannes.hpp"
#include "r1kit/singer.hpp"
#include "r1kit/steenrod.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <sstream>

using namespace r1kit;
using json = nlohmann::ordered_json;

namespace {

struct ComputeOptions {
    std::string what;
    std::string module;
    int max_degree = 10;
    int rank = 1;
    std::string format = "text";
};

std::string dims_line(const unstable::TruncatedModule& m)
{
    std::string s;
    for (int n = 0; n <= m.top(); ++n)
        s += (n ? "," : "") + std::to_string(m.dim(n));
    return s;
}

json module_json(const unstable::TruncatedModule& m)
{
    json labels = json::object();
    for (int n = 0; n <= m.top(); ++n)
        if (m.dim(n))
            labels[std::to_string(n)] = m.labels(n);
    return {{"name", m.name()}, {"max_degree", m.top()}, {"dims", m.dims()}, {"labels", labels}};
}

std::string module_text(const unstable::TruncatedModule& m)
{
    std::ostringstream out;
    out << m.name() << ": " << dims_line(m) << '\n';
    for (int n = 0; n <= m.top(); ++n) {
        if (!m.dim(n))
            continue;
        out << "  " << n << ':';
        for (const auto& l : m.labels(n))
            out << ' ' << l;
        out << '\n';
    }
    return out.str();
}

void check_degree(int d)
{
    if (d < 0 || d > harness::max_degree_limit)
        throw harness::UsageError("max degree must lie in [0, " + std::to_string(harness::max_degree_limit) + "]");
}

int realm_rank(const ComputeOptions& o)
{
    if (o.rank < 0 || o.rank > harness::max_rank_limit)
        throw harness::UsageError("rank must lie in [0, " + std::to_string(harness::max_rank_limit) + "]");
    if (o.module.empty())
        return o.rank;
    if (o.module == "H")
        return 1;
    if (o.module.size() == 2 && o.module[0] == 'H' && o.module[1] >= '0' && o.module[1] <= '3')
        return o.module[1] - '0';
    throw harness::UsageError(o.what + " is computed on H*((Z/2)^r); use --rank or --module H<r>");
}

int compute(const ComputeOptions& o)
{
    check_degree(o.max_degree);
    const bool as_json = o.format == "json";
    if (o.what == "basis") {
        json doc = json::object();
        std::ostringstream out;
        for (int n = 0; n <= o.max_degree; ++n) {
            std::vector<std::string> names;
            for (const auto& m : steenrod::admissible_basis(n))
                names.push_back(m.to_string());
            doc[std::to_string(n)] = names;
            out << n << " (" << names.size() << "):";
            for (const auto& s : names)
                out << ' ' << s;
            out << '\n';
        }
        std::cout << (as_json ? doc.dump(2) + "\n" : out.str());
        return 0;
    }
    if (o.what == "module" || o.what == "r1") {
        if (o.module.empty())
            throw harness::UsageError(o.what + " needs --module");
        const auto m = harness::named_module(o.module, o.max_degree);
        if (o.what == "module") {
            if (as_json) {
                auto doc = module_json(*m);
                doc["valid"] = unstable::validate(*m).ok();
                std::cout << doc.dump(2) << '\n';
            } else {
                std::cout << io::write_fixture(*m);
            }
            return 0;
        }
        const auto r = singer::r1(m);
        const auto fr = fulu::freeness_report(r.module());
        if (as_json) {
            auto doc = module_json(*r.module()->module);
            doc["distinguished"] = r.distinguished;
            doc["free"] = fr.free;
            doc["certified_degree"] = r.certified;
            std::cout << doc.dump(2) << '\n';
        } else {
            std::cout << module_text(*r.module()->module);
            std::cout << "distinguished basis: " << (r.distinguished ? "yes" : "no")
                      << "; free: " << (fr.free ? "yes" : "no") << '\n';
        }
        return 0;
    }
    const int r = realm_rank(o);
    const auto x = lannes::RealmObject::polynomial(r, o.max_degree);
    if (o.what == "rtilde") {
        lannes::LannesContext c(x);
        const auto rt = lannes::rtilde(c);
        if (as_json) {
            auto doc = module_json(*rt.kernel.module->module);
            doc["definitions_agree"] = rt.definitions_agree;
            std::cout << doc.dump(2) << '\n';
        } else {
            std::cout << module_text(*rt.kernel.module->module);
            std::cout << "ker τ̄ = ker(σ+τ): " << (rt.definitions_agree ? "yes" : "no") << '\n';
        }
        return 0;
    }
    if (o.what == "invariants") {
        const auto inv = lannes::gv_invariants(r, o.max_degree);
        std::cout << (as_json ? module_json(*inv.module).dump(2) + "\n" : module_text(*inv.module));
        return 0;
    }
    if (o.what == "fix") {
        lannes::FixData f(x);
        const auto fix =
            lannes::fix_presented(f, {lannes::PresentationKind::kernel, lannes::DefiningMap::tau_bar});
        const bool iso = !unstable::first_non_injective_degree(f.unit) &&
                         !unstable::exactness_failure(f.unit, f.j, o.max_degree);
        if (as_json) {
            json doc{{"module", x.name()},
                     {"module_dims", x.module()->dims()},
                     {"fix_dims", fix->dims()},
                     {"unit_is_iso_onto_fix", iso}};
            std::cout << doc.dump(2) << '\n';
        } else {
            std::cout << x.name() << ": " << dims_line(*x.module()) << '\n';
            std::cout << "Fix R̃₁: " << dims_line(*fix) << '\n';
            std::cout << "unit iso onto Fix: " << (iso ? "yes" : "no") << '\n';
        }
        return 0;
    }
    throw harness::UsageError("unknown computation '" + o.what + "'");
}

struct VerifyOptions {
    std::string check;
    bool all = false;
    harness::Params params;
    std::string format = "text";
    std::string fixture;
    bool timing = false;
};

int verify(VerifyOptions o)
{
    if (!o.fixture.empty()) {
        try {
            o.params.fixture = io::load_fixture(o.fixture).module;
        } catch (const std::exception& e) {
            throw harness::UsageError(e.what());
        }
    }
    std::vector<harness::CheckResult> results;
    if (o.all)
        results = harness::run_all(o.params);
    else
        results.push_back(harness::run_check(o.check, o.params));
    std::cout << (o.format == "json" ? harness::report_json(results, o.timing)
                                     : harness::report_text(results, o.timing));
    return harness::exit_code(results);
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Singer and Lannes constructions on truncated unstable modules"};
    app.require_subcommand(1);

    ComputeOptions co;
    auto* compute_cmd = app.add_subcommand("compute", "compute a construction and print it");
    compute_cmd->add_option("what", co.what, "basis, module, r1, rtilde, invariants or fix")
        ->required()
        ->check(CLI::IsMember({"basis", "module", "r1", "rtilde", "invariants", "fix"}));
    compute_cmd->add_option("--module", co.module, "module name (F0..F3, H, H2, PhiF1, ...) or fixture file");
    compute_cmd->add_option("--max-degree", co.max_degree, "top degree of the truncation");
    compute_cmd->add_option("--rank", co.rank, "rank r of H*((Z/2)^r) for rtilde, invariants and fix");
    compute_cmd->add_option("--format", co.format)->check(CLI::IsMember({"text", "json"}));

    VerifyOptions vo;
    auto* verify_cmd = app.add_subcommand("verify", "run verification checks");
    auto* check_opt = verify_cmd->add_option("--check", vo.check, "check id, T1..T17");
    auto* all_opt = verify_cmd->add_flag("--all", vo.all, "run the whole catalog");
    check_opt->excludes(all_opt);
    verify_cmd->add_option("--max-degree", vo.params.max_degree);
    verify_cmd->add_option("--max-rank", vo.params.max_rank);
    verify_cmd->add_option("--seed", vo.params.seed, "seed for the randomized checks");
    verify_cmd->add_option("--format", vo.format)->check(CLI::IsMember({"text", "json"}));
    verify_cmd->add_option("--fixture", vo.fixture, "extra module fixture for the Ω check");
    verify_cmd->add_flag("--timing", vo.timing, "include wall time per check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*compute_cmd)
            return compute(co);
        if (!vo.all && vo.check.empty())
            throw harness::UsageError("verify needs --check <ID> or --all");
        return verify(vo);
    } catch (const harness::UsageError& e) {
        std::cerr << "r1kit: " << e.what() << '\n';
        return 2;
    } catch (const io::FixtureError& e) {
        std::cerr << "r1kit: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "r1kit: error: " << e.what() << '\n';
        return 1;
    }
}
