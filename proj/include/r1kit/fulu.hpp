#pragma once

// F[u]-modules in the category of unstable modules, |u| = 1, Sq^1 u = u^2.

#include "r1kit/unstable.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace r1kit::fulu {

using f2::BitMatrix;
using f2::BitVector;
using f2::Subspace;
using unstable::ModuleMap;
using unstable::ModuleRef;

struct FuluModule {
    ModuleRef module;
    std::vector<BitMatrix> u;  // u[n] : N^n -> N^{n+1}, n < top
    // Set when the module is F[u] (x) base with basis blocks u^k (x) base^{n-k}, k ascending.
    ModuleRef base;

    int top() const { return module->top(); }
    std::size_t dim(int n) const { return module->dim(n); }
    const std::string& name() const { return module->name(); }
    // u : N^n -> N^{n+1}; a zero map into nothing at the top degree.
    BitMatrix u_mul(int n) const;
};

using FuluRef = std::shared_ptr<const FuluModule>;

// Failures of Sq^i(u x) = u Sq^i x + u^2 Sq^{i-1} x.
std::vector<unstable::Violation> fulu_violations(const FuluModule& n);
// Checks shapes and the twisted linearity; throws std::invalid_argument.
FuluRef make_fulu(ModuleRef m, std::vector<BitMatrix> u, ModuleRef base = nullptr);

struct FuluMap {
    FuluRef source;
    FuluRef target;
    ModuleMap map;

    int top() const { return map.top(); }
    const BitMatrix& operator[](int n) const { return map[n]; }
};

// A-linear and u-equivariant; throws std::invalid_argument otherwise.
FuluMap make_fulu_map(FuluRef source, FuluRef target, std::vector<BitMatrix> f);
FuluMap fulu_compose(const FuluMap& g, const FuluMap& f);
FuluMap fulu_add(const FuluMap& f, const FuluMap& g);
FuluMap fulu_identity(const FuluRef& n);

// ---- extension of scalars ------------------------------------------------

FuluRef extend_scalars(const ModuleRef& m);
// Offset of the block u^k (x) M^{n-k} inside (F[u] (x) M)^n.
std::size_t extended_offset(const unstable::TruncatedModule& m, int n, int k);
// id (x) f between extended modules.
FuluMap extend_map(const ModuleMap& f, const FuluRef& source, const FuluRef& target);
// The augmentation F[u] (x) M -> M (u -> 0).
ModuleMap augmentation(const FuluRef& extended);

// ---- subobjects and quotients --------------------------------------------

struct FuluSubmodule {
    FuluRef module;
    FuluRef ambient;
    unstable::Submodule sub;
    FuluMap inclusion;
};

struct FuluQuotient {
    FuluRef module;
    FuluRef ambient;
    unstable::QuotientModule quot;
    FuluMap projection;
};

// Throws std::invalid_argument if the spaces are not stable under Sq and u.
FuluSubmodule fulu_submodule(const FuluRef& ambient, const std::vector<Subspace>& spaces, std::string name = {});
FuluSubmodule fulu_submodule_with_basis(const FuluRef& ambient, std::vector<f2::Basis> basis, std::string name = {},
                                        std::vector<std::vector<std::string>> labels = {});
FuluQuotient fulu_quotient(const FuluRef& ambient, const std::vector<Subspace>& spaces, std::string name = {});
// The smallest Sq- and u-stable subspaces containing the given elements (generators[n] in degree n).
std::vector<Subspace> fulu_closure(const FuluRef& ambient, const std::vector<std::vector<BitVector>>& generators);
FuluSubmodule fulu_kernel(const FuluMap& f, std::string name = {});
FuluSubmodule fulu_image(const FuluMap& f, std::string name = {});
FuluQuotient fulu_cokernel(const FuluMap& f, std::string name = {});
FuluMap fulu_restrict(const FuluMap& f, const FuluSubmodule& source, const FuluSubmodule& target);
FuluMap fulu_corestrict(const FuluMap& f, const FuluSubmodule& target);
FuluMap fulu_induced(const FuluMap& f, const FuluQuotient& source, const FuluQuotient& target);

// ---- indecomposables -----------------------------------------------------

// Q N = N / u N with the induced action.
unstable::QuotientModule indecomposables(const FuluRef& n);
ModuleMap indecomposables_map(const FuluMap& f, const unstable::QuotientModule& source,
                              const unstable::QuotientModule& target);

// ---- verdicts ------------------------------------------------------------

struct Verdict {
    bool holds = true;
    int certified = 0;  // checked degrees 0..certified
    std::optional<int> degree;
    std::string witness;
};

struct FreenessReport {
    Verdict torsion_free;
    bool free = false;
    // Lifts of a basis of Q N, degree by degree, as vectors of N.
    std::vector<std::vector<BitVector>> basis;
    std::vector<std::vector<std::string>> basis_labels;
};

// Non-negatively graded modules are treated as connected: a torsion-free
// module is then free on lifts of Q N, which is re-verified by rank.
FreenessReport freeness_report(const FuluRef& n);

// X inside F[u] (x) M: u y in X implies y in X (degrees below the top).
Verdict saturation_check(const FuluSubmodule& x);

struct GeneratorSpace {
    std::vector<std::vector<BitVector>> w;  // lifts of Q X, as vectors of the ambient
    std::vector<Subspace> eps_image;        // image of W in M
    Verdict eps_injective;
};

GeneratorSpace generator_space(const FuluSubmodule& x);

// N_1 (x)_{F[u]} N_2: the quotient of N_1 (x) N_2 by the image of u (x) 1 + 1 (x) u.
struct FuluTensor {
    FuluRef module;
    ModuleRef product;  // N_1 (x) N_2 over F_2
    unstable::QuotientModule quot;
};

FuluTensor fulu_tensor_presentation(const FuluRef& a, const FuluRef& b);
FuluRef tensor_over_fulu(const FuluRef& a, const FuluRef& b);

}  // namespace r1kit::fulu
