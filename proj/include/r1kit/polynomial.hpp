#pragma once

// Monomial bookkeeping for F_2[x_1, ..., x_r] with every generator in degree 1.

#include <cstddef>
#include <string>
#include <vector>

namespace r1kit::poly {

using Exponents = std::vector<int>;

// Monomials of the given total degree, lexicographically decreasing
// (x_1^d first).  The returned reference stays valid for the program lifetime.
const std::vector<Exponents>& monomials(int rank, int degree);
std::size_t monomial_index(const Exponents& e);
std::size_t monomial_count(int rank, int degree);

// "1", "t^3", "t1^2t2", ...
std::string monomial_label(const Exponents& e, char variable = 't');

}  // namespace r1kit::poly
