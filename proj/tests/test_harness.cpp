#include "support.hpp"

#include "r1kit/fixture_io.hpp"
#include "r1kit/harness.hpp"

#include <doctest.h>
#include <json.hpp>

#include <set>

using namespace r1kit;
using harness::Params;

namespace {

Params small_params()
{
    Params p;
    p.max_degree = 6;
    p.max_rank = 1;
    return p;
}

std::string ones_and_halves(int top)
{
    std::string s;
    for (int n = 0; n <= top; ++n)
        s += (n ? "," : "") + std::to_string(n / 2 + 1);
    return s;
}

const harness::PoincareRow* find_row(const harness::CheckResult& r, const std::string& name)
{
    for (const auto& t : r.tables)
        if (t.name == name)
            return &t;
    return nullptr;
}

bool same_module(const unstable::TruncatedModule& a, const unstable::TruncatedModule& b)
{
    if (a.name() != b.name() || a.top() != b.top() || a.dims() != b.dims())
        return false;
    for (int n = 0; n <= a.top(); ++n) {
        if (a.dim(n) && a.labels(n) != b.labels(n))
            return false;
        for (int i = 1; n + i <= a.top(); ++i)
            if (!(a.sq(i, n) == b.sq(i, n)))
                return false;
    }
    return true;
}

// H*(Z/2) with Sq^1 t^2 = t^3, which breaks Sq^1 Sq^1 = 0 on t.
std::string corrupted_h(int top)
{
    auto text = io::write_fixture(*unstable::polynomial_module(1, top));
    const auto at = text.rfind("end\n");
    text.insert(at, "action 1 2\n1\n");
    return text;
}

}  // namespace

TEST_CASE("catalog ids are unique and ordered")
{
    const auto& c = harness::catalog();
    REQUIRE(c.size() == 17);
    std::set<std::string> ids;
    for (std::size_t k = 0; k < c.size(); ++k) {
        CHECK(c[k].id == "T" + std::to_string(k + 1));
        CHECK(!c[k].anchor.empty());
        ids.insert(c[k].id);
    }
    CHECK(ids.size() == c.size());
}

TEST_CASE("parameter and id errors are usage errors")
{
    Params p = small_params();
    CHECK_THROWS_AS(harness::run_check("T0", p), harness::UsageError);
    p.max_degree = harness::min_degree - 1;
    CHECK_THROWS_AS(harness::run_check("T1", p), harness::UsageError);
    p.max_degree = harness::max_degree_limit + 1;
    CHECK_THROWS_AS(harness::run_all(p), harness::UsageError);
    p = small_params();
    p.max_rank = harness::max_rank_limit + 1;
    CHECK_THROWS_AS(harness::run_check("T1", p), harness::UsageError);
    CHECK_THROWS_AS(harness::named_module("no-such-module", 6), harness::UsageError);
}

TEST_CASE("full catalog passes at small degree and reports are deterministic")
{
    const Params p = small_params();
    const auto a = harness::run_all(p);
    const auto b = harness::run_all(p);
    REQUIRE(a.size() == 17);
    for (const auto& r : a) {
        INFO(r.id << ": " << r.witness);
        CHECK(r.pass);
        CHECK(r.certified_degree >= 0);
        CHECK(r.certified_degree <= p.max_degree);
    }
    CHECK(harness::exit_code(a) == 0);
    CHECK(harness::report_json(a) == harness::report_json(b));
    CHECK(harness::report_text(a) == harness::report_text(b));
    CHECK(harness::report_text(a).find("17/17 checks passed") != std::string::npos);
}

TEST_CASE("json records have the documented keys")
{
    Params p = small_params();
    std::vector<harness::CheckResult> rs{harness::run_check("T1", p)};
    auto bad = io::read_fixture_string(corrupted_h(6));
    p.fixture = bad.module;
    rs.push_back(harness::run_check("T9", p));

    const auto doc = nlohmann::json::parse(harness::report_json(rs));
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 2);
    const std::vector<std::string> pass_keys{"check_id", "anchor", "params", "pass", "certified_degree", "poincare"};
    std::vector<std::string> keys;
    for (auto it = doc[0].begin(); it != doc[0].end(); ++it)
        keys.push_back(it.key());
    std::sort(keys.begin(), keys.end());
    auto sorted = pass_keys;
    std::sort(sorted.begin(), sorted.end());
    CHECK(keys == sorted);
    CHECK(doc[0]["check_id"] == "T1");
    CHECK(doc[0]["pass"] == true);
    CHECK(doc[0]["params"]["D"] == 6);
    CHECK(!doc[0].contains("witness"));
    CHECK(!doc[0].contains("millis"));
    CHECK(doc[1]["pass"] == false);
    CHECK(doc[1]["witness"].is_string());

    const auto timed = nlohmann::json::parse(harness::report_json(rs, true));
    CHECK(timed[0]["millis"].is_number_integer());
}

TEST_CASE("empty result list gives empty reports")
{
    const std::vector<harness::CheckResult> none;
    CHECK(harness::report_text(none).empty());
    CHECK(harness::report_json(none) == "[]\n");
    CHECK(harness::exit_code(none) == 0);
}

TEST_CASE("corrupted fixture fails the loop check with a labeled witness")
{
    Params p = small_params();
    p.fixture = io::read_fixture_string(corrupted_h(6)).module;
    CHECK(!unstable::validate(*p.fixture).ok());
    const auto r = harness::run_check("T9", p);
    CHECK(!r.pass);
    CHECK(r.witness.find("adem") != std::string::npos);
    CHECK(r.witness.find("at t ") != std::string::npos);
    CHECK(r.witness.find("t^3") != std::string::npos);
    const auto text = harness::report_text({r});
    CHECK(text.find("T9  FAIL") != std::string::npos);
    CHECK(harness::exit_code({r}) == 1);
}

TEST_CASE("Poincare row of R1 H*(Z/2) at D = 8")
{
    Params p;
    p.max_degree = 8;
    p.max_rank = 1;
    const auto r = harness::run_check("T2", p);
    REQUIRE(r.pass);
    const auto* row = find_row(r, "R₁H*(Z/2)");
    REQUIRE(row != nullptr);
    CHECK(row->dims == std::vector<std::size_t>{1, 1, 2, 2, 3, 3, 4, 4, 5});
    const auto text = harness::report_text({r});
    CHECK(ones_and_halves(8) == "1,1,2,2,3,3,4,4,5");
    CHECK(text.find("R₁H*(Z/2): " + ones_and_halves(8) + "\n") != std::string::npos);
}

TEST_CASE("invariants and Fix for rank one at D = 12")
{
    Params p;
    p.max_degree = 12;
    p.max_rank = 1;
    const auto t1 = harness::run_check("T1", p);
    CHECK(t1.pass);
    const auto* row = find_row(t1, "R̃₁H*(Z/2)");
    REQUIRE(row != nullptr);
    for (int n = 0; n <= 12; ++n)
        CHECK(row->dims[n] == static_cast<std::size_t>(n / 2 + 1));

    const auto t3 = harness::run_check("T3", p);
    CHECK(t3.pass);
    const auto* fix = find_row(t3, "Fix R̃₁H*(Z/2)");
    REQUIRE(fix != nullptr);
    CHECK(fix->dims == std::vector<std::size_t>(13, 1));

    const auto t12 = harness::run_check("T12", p);
    CHECK(t12.pass);
}

TEST_CASE("randomized checks log their seed")
{
    Params p = small_params();
    p.seed = 7;
    for (const char* id : {"T14", "T15"}) {
        const auto r = harness::run_check(id, p);
        CHECK(r.pass);
        bool logged = false;
        for (const auto& [k, v] : r.params)
            logged |= k == "seed" && std::get<long long>(v) == 7;
        CHECK(logged);
    }
}

TEST_CASE("fixture files round-trip")
{
    for (const auto& name : harness::module_names()) {
        const auto m = harness::named_module(name, 8);
        const auto text = io::write_fixture(*m);
        const auto back = io::read_fixture_string(text);
        INFO(name);
        CHECK(same_module(*m, *back.module));
        CHECK(!back.u);
        CHECK(io::write_fixture(*back.module) == text);
    }
    const auto e = fulu::extend_scalars(unstable::free_unstable(1, 7));
    const auto text = io::write_fixture(*e);
    const auto back = io::read_fixture_string(text);
    REQUIRE(back.u);
    CHECK(same_module(*e->module, *back.module));
    for (int n = 0; n < 7; ++n)
        CHECK((*back.u)[n] == e->u[n]);
}

TEST_CASE("random modules round-trip through fixture text")
{
    for (int t = 0; t < 20; ++t) {
        const int top = static_cast<int>(testing::uniform(0, 6));
        std::vector<std::size_t> dims;
        for (int n = 0; n <= top; ++n)
            dims.push_back(testing::uniform(0, 3));
        auto m = std::make_shared<unstable::TruncatedModule>("random " + std::to_string(t), top, dims);
        for (int n = 0; n <= top; ++n)
            for (int i = 1; n + i <= top; ++i)
                m->set_sq(i, n, testing::random_matrix(dims[n + i], dims[n]));
        const auto back = io::read_fixture_string(io::write_fixture(*m));
        CHECK(same_module(*m, *back.module));
    }
}

TEST_CASE("malformed fixtures report the line")
{
    const std::string good = io::write_fixture(*unstable::free_unstable(1, 4));
    CHECK_THROWS_AS(io::read_fixture_string("D 2\ndims 1 1 1\n"), io::FixtureError);
    try {
        io::read_fixture_string("# comment\nD 2\ndims 1 1 1\naction 1 0\n11\nend\n");
        FAIL("expected a fixture error");
    } catch (const io::FixtureError& e) {
        CHECK(e.line() == 5);
    }
    CHECK_THROWS_AS(io::read_fixture_string("D 2\ndims 1 1\nend\n"), io::FixtureError);
    CHECK_THROWS_AS(io::read_fixture_string("D 2\ndims 1 1 1\naction 3 0\n1\nend\n"), io::FixtureError);
    CHECK_THROWS_AS(io::read_fixture_string("D 2\ndims 1 1 1\nbogus\nend\n"), io::FixtureError);
    CHECK_NOTHROW(io::read_fixture_string(good));
}
