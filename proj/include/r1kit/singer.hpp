#pragma once

// The Singer functor R_1: the F[u]-submodule of F[u] (x) M generated by
// St_1(x) = sum_i u^{|x|-i} (x) Sq^i x.

#include "r1kit/fulu.hpp"

#include <optional>
#include <string>
#include <vector>

namespace r1kit::singer {

using f2::BitMatrix;
using f2::BitVector;
using fulu::FuluMap;
using fulu::FuluRef;
using unstable::ModuleMap;
using unstable::ModuleRef;

// st[d] : M^d -> (F[u] (x) M)^{2d} for 2d <= top.  Not A-linear.
struct St1Map {
    ModuleRef source;
    FuluRef target;
    std::vector<BitMatrix> st;

    int max_degree() const { return static_cast<int>(st.size()) - 1; }
};

St1Map st1(const ModuleRef& m, const FuluRef& extended);
St1Map st1(const ModuleRef& m);

// One element u^k St_1(b_j) of the distinguished basis, b_j in M^d.
struct Generator {
    int k;
    int d;
    std::size_t j;
};

struct SingerModule {
    ModuleRef base;
    FuluRef extended;
    St1Map st1;
    fulu::FuluSubmodule r1;  // basis ordered as `generators` when `distinguished`
    // generators[n]: u^k St_1(b) with k + 2|b| = n, k ascending.
    std::vector<std::vector<Generator>> generators;
    // The family {u^k St_1(b)} is linearly independent (so R_1 M is free on St_1(b)).
    bool distinguished = false;
    int certified = 0;

    const FuluRef& module() const { return r1.module; }
};

SingerModule r1(const ModuleRef& m);

// id (x) f restricted to R_1; throws std::logic_error if the image escapes.
FuluMap r1_on_map(const ModuleMap& f, const SingerModule& source, const SingerModule& target);

struct Rho1 {
    ModuleRef phi;
    ModuleMap rho;                    // R_1 M -> Phi M
    fulu::FuluSubmodule u_r1;         // u R_1 M
    bool surjective = false;
    bool kernel_is_u_multiples = false;
    bool sq0_square_commutes = false;  // Sq_0 rho = eps on R_1 M
    int certified = 0;
    std::string witness;

    bool ok() const { return surjective && kernel_is_u_multiples && sq0_square_commutes; }
};

// Computed in the distinguished basis: rho(u^k St_1(b)) = Phi b if k = 0, else 0.
Rho1 rho1(const SingerModule& r);

struct ProductCertificate {
    fulu::FuluTensor source;  // R_1 M (x)_{F[u]} R_1 N
    ModuleMap map;            // into F[u] (x) (M (x) N)
    bool linear = false;
    bool injective = false;
    bool image_is_r1 = false;
    int certified = 0;
    std::optional<int> failure_degree;

    bool ok() const { return linear && injective && image_is_r1; }
};

// The multiplication R_1 M (x)_{F[u]} R_1 N -> F[u] (x) (M (x) N) and its comparison with R_1(M (x) N).
ProductCertificate product_mu(const SingerModule& m, const SingerModule& n, const SingerModule& mn);

// Image of u^k (x) x times u^l (x) y in F[u] (x) (M (x) N).
BitVector multiply_extended(const FuluRef& em, const FuluRef& en, const FuluRef& emn, int p, const BitVector& v,
                            int q, const BitVector& w);

}  // namespace r1kit::singer
