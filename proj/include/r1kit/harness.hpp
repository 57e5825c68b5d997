#pragma once

// Verification catalog T1..T17: each check runs a bounded instance of a
// structural statement and reports the degree range it certifies.

#include "r1kit/unstable.hpp"

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace r1kit::harness {

// Bad check ids, parameters out of range, unknown module names.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Params {
    int max_degree = 10;
    int max_rank = 2;
    std::uint64_t seed = 20240611;
    // Extra module fed to the checks that take fixtures (T9).
    unstable::ModuleRef fixture;
};

constexpr int min_degree = 4;
constexpr int max_degree_limit = 24;
constexpr int max_rank_limit = 3;

void check_params(const Params& p);

using ParamValue = std::variant<long long, std::string>;

struct PoincareRow {
    std::string name;
    std::vector<std::size_t> dims;
};

struct CheckResult {
    std::string id;
    std::string anchor;
    std::vector<std::pair<std::string, ParamValue>> params;
    bool pass = true;
    int certified_degree = 0;
    std::string witness;  // set on failure
    std::vector<PoincareRow> tables;
    double millis = 0;
};

struct CheckSpec {
    std::string id;
    std::string anchor;
    std::function<CheckResult(const Params&)> run;
};

const std::vector<CheckSpec>& catalog();
// Throws UsageError for unknown ids or out-of-range parameters.
CheckResult run_check(const std::string& id, const Params& p);
// Checks run concurrently; results come back in catalog order.
std::vector<CheckResult> run_all(const Params& p);

// 0 all pass, 1 any failure.
int exit_code(const std::vector<CheckResult>& results);

std::string report_text(const std::vector<CheckResult>& results, bool timing = false);
std::string report_json(const std::vector<CheckResult>& results, bool timing = false);

// Named modules: F0..F3, H, H<r>, PhiF1, SigmaF0, Lambda2F1, F1xF1; anything else is read as a fixture file.
unstable::ModuleRef named_module(const std::string& name, int top);
const std::vector<std::string>& module_names();

}  // namespace r1kit::harness
