#pragma once

// Plain-text fixture files for truncated unstable modules (optionally with a u-action).
//
//   name <text>
//   D <top>
//   dims <d_0> ... <d_D>
//   labels <n> <l_1> ... <l_k>        one line per nonzero degree
//   action <i> <n>                    Sq^i : M^n -> M^{n+i}, then dim(n+i) rows of dim(n) bits
//   u <n>                             u : M^n -> M^{n+1}, then dim(n+1) rows of dim(n) bits
//   end
//
// Only nonzero action matrices are written; they are listed in (n, i) order.
// Lines starting with '#' are comments.  Reading does not validate the module axioms.

#include "r1kit/fulu.hpp"
#include "r1kit/unstable.hpp"

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace r1kit::io {

class FixtureError : public std::runtime_error {
public:
    FixtureError(int line, const std::string& what)
        : std::runtime_error("fixture line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const { return line_; }

private:
    int line_;
};

struct Fixture {
    unstable::ModuleRef module;
    std::optional<std::vector<f2::BitMatrix>> u;  // u[n] for n < top
};

std::string write_fixture(const unstable::TruncatedModule& m, const std::vector<f2::BitMatrix>* u = nullptr);
std::string write_fixture(const fulu::FuluModule& n);
Fixture read_fixture(std::istream& in);
Fixture read_fixture_string(const std::string& text);
Fixture load_fixture(const std::string& path);

}  // namespace r1kit::io
