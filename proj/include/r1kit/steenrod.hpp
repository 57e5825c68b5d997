#pragma once

// The mod-2 Steenrod algebra in the admissible (Serre-Cartan) basis.

#include <compare>
#include <string>
#include <vector>

namespace r1kit::steenrod {

// Sq^{i_1} ... Sq^{i_k}, every entry >= 1; the empty word is the unit.
using SqWord = std::vector<int>;

bool is_admissible(const SqWord& w);
int degree(const SqWord& w);
std::string to_string(const SqWord& w);

// binom(n, k) mod 2 by Lucas' theorem; zero outside 0 <= k <= n.
bool binomial_mod2(long n, long k);

class AdmissibleMonomial {
public:
    AdmissibleMonomial() = default;  // the unit
    explicit AdmissibleMonomial(SqWord factors);

    const SqWord& factors() const { return factors_; }
    int degree() const { return steenrod::degree(factors_); }
    // i_1 - (i_2 + ... + i_k); zero for the unit.
    int excess() const;
    std::size_t length() const { return factors_.size(); }
    std::string to_string() const { return steenrod::to_string(factors_); }

    auto operator<=>(const AdmissibleMonomial&) const = default;

private:
    SqWord factors_;
};

inline int excess(const AdmissibleMonomial& m) { return m.excess(); }

// Admissible normal form of a word as a GF(2) sum of admissible monomials,
// sorted ascending.  Memoized; the cache is shared and thread-safe.
std::vector<AdmissibleMonomial> adem_normal_form(const SqWord& w);

// Normal form of the product a * b.
std::vector<AdmissibleMonomial> multiply(const SqWord& a, const SqWord& b);

// All admissible monomials of degree n in lexicographic order of factor sequences.
std::vector<AdmissibleMonomial> admissible_basis(int n);
// Same, restricted to excess <= max_excess.
std::vector<AdmissibleMonomial> admissible_basis(int n, int max_excess);

}  // namespace r1kit::steenrod
