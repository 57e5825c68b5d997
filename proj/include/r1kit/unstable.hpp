#pragma once

// Unstable modules over the mod-2 Steenrod algebra, truncated above a top
// degree D.  Everything stored is exact through degree D: a truncated module
// is the quotient of a genuine unstable module by everything above D.

#include "r1kit/f2.hpp"
#include "r1kit/steenrod.hpp"

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace r1kit::unstable {

using f2::BitMatrix;
using f2::BitVector;
using f2::Subspace;

class TruncatedModule {
public:
    TruncatedModule(std::string name, int top, std::vector<std::size_t> dims);

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    int top() const { return top_; }
    // Zero outside 0 <= n <= top.
    std::size_t dim(int n) const;
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t total_dim() const;

    // Sq^i : M^n -> M^{n+i} for i >= 1, n >= 0, n + i <= top.
    const BitMatrix& sq(int i, int n) const;
    void set_sq(int i, int n, BitMatrix m);
    // Like sq() but also accepts i = 0 (identity).
    BitMatrix op(int i, int n) const;
    // Action of a word (applied right to left) on degree n.
    BitMatrix apply(const steenrod::SqWord& w, int n) const;

    const std::string& label(int n, std::size_t j) const;
    const std::vector<std::string>& labels(int n) const;
    void set_labels(int n, std::vector<std::string> labels);

private:
    void check_op(int i, int n) const;

    std::string name_;
    int top_;
    std::vector<std::size_t> dims_;
    std::vector<std::vector<BitMatrix>> action_;  // action_[n][i-1]
    std::vector<std::vector<std::string>> labels_;
};

using ModuleRef = std::shared_ptr<const TruncatedModule>;

struct Violation {
    std::string kind;  // "instability", "adem", "shape", "linearity"
    int degree = 0;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    std::string to_string() const;
};

ValidationReport validate(const TruncatedModule& m);
// "x+y" in terms of basis labels; "0" for the zero vector.
std::string describe(const TruncatedModule& m, int n, const BitVector& v);
// Throws std::logic_error carrying the report when validation fails.
void assert_valid(const TruncatedModule& m);

// A degreewise linear map between the underlying graded vector spaces.  The
// map is defined in degrees 0..top() with top() = min of the two truncations.
struct GradedLinearMap {
    ModuleRef source;
    ModuleRef target;
    std::vector<BitMatrix> f;

    int top() const { return static_cast<int>(f.size()) - 1; }
    const BitMatrix& operator[](int n) const { return f.at(static_cast<std::size_t>(n)); }
};

// A GradedLinearMap that commutes with every stored Sq^i.
struct ModuleMap : GradedLinearMap {};

GradedLinearMap make_linear_map(ModuleRef source, ModuleRef target, std::vector<BitMatrix> f);
// Checks shapes and A-linearity; throws std::invalid_argument with the first failure.
ModuleMap make_map(ModuleRef source, ModuleRef target, std::vector<BitMatrix> f);
ModuleMap zero_map(ModuleRef source, ModuleRef target);
ModuleMap identity_map(ModuleRef m);

std::vector<Violation> linearity_violations(const GradedLinearMap& f);
ModuleMap compose(const ModuleMap& g, const ModuleMap& f);
ModuleMap add(const ModuleMap& f, const ModuleMap& g);
std::optional<int> first_non_injective_degree(const GradedLinearMap& f);
std::optional<int> first_non_surjective_degree(const GradedLinearMap& f);
bool is_zero(const GradedLinearMap& f);

// ---- constructors --------------------------------------------------------

ModuleRef ground_field(int top);
// F(n): admissible Sq^I i_n with excess(I) <= n.
ModuleRef free_unstable(int n, int top);
// H*((Z/2)^rank) = F_2[t_1, ..., t_rank], |t_i| = 1.
ModuleRef polynomial_module(int rank, int top);
ModuleRef zero_module(int top);
// The map F(n) -> target sending i_n to x (x in target^n).  `fn` must be free_unstable(n, ...).
ModuleMap map_from_free(const ModuleRef& fn, int n, const ModuleRef& target, const BitVector& x);

class NotASuspension : public std::runtime_error {
public:
    NotASuspension(int degree, const std::string& what) : std::runtime_error(what), degree_(degree) {}
    int degree() const { return degree_; }

private:
    int degree_;
};

// Sigma^s M with top raised by s.
ModuleRef suspend(const ModuleRef& m, int s = 1);
// Inverse of suspend; throws NotASuspension naming the failing degree.
ModuleRef desuspend(const ModuleRef& m);
// Phi M with the same top: (Phi M)^{2n} = M^n.
ModuleRef phi(const ModuleRef& m);
// Sq_0 : Phi M -> M, x in degree 2n maps to Sq^n x.
ModuleMap sq0(const ModuleRef& m, const ModuleRef& phi_m);
ModuleMap sq0(const ModuleRef& m);
ModuleRef tensor(const ModuleRef& m, const ModuleRef& n);
ModuleRef direct_sum(const std::vector<ModuleRef>& parts, std::string name = {});
ModuleRef truncate(const ModuleRef& m, int top);
ModuleRef with_name(const ModuleRef& m, std::string name);

// Basis of (M (x) N)^n: blocks M^a (x) N^{n-a} for a ascending, row-major inside a block.
struct TensorLayout {
    const TruncatedModule* left;
    const TruncatedModule* right;
    std::size_t offset(int n, int a) const;
    std::size_t index(int n, int a, std::size_t i, std::size_t j) const;
};

// The swap x (x) y -> y (x) x on M (x) M.
ModuleMap swap_map(const ModuleRef& m, const ModuleRef& mm);
// Structure maps of a direct sum.
ModuleMap sum_inclusion(const ModuleRef& sum, const std::vector<ModuleRef>& parts, std::size_t k);
ModuleMap sum_projection(const ModuleRef& sum, const std::vector<ModuleRef>& parts, std::size_t k);

// ---- subquotients --------------------------------------------------------

struct Submodule {
    ModuleRef module;     // the submodule with its own basis
    ModuleRef ambient;
    std::vector<f2::Basis> basis;  // basis[n] inside ambient^n, ordered as module's basis
    ModuleMap inclusion;

    Subspace span(int n) const { return basis.at(static_cast<std::size_t>(n)).span(); }
    // Coordinates in module's basis of an ambient vector lying in the submodule.
    BitVector coordinates(int n, const BitVector& v) const;
};

struct QuotientModule {
    ModuleRef module;
    ModuleRef ambient;
    std::vector<Subspace> kernel;                 // kernel[n] inside ambient^n
    std::vector<std::vector<std::size_t>> lifts;  // basis element j of module^n lifts to e_{lifts[n][j]}
    ModuleMap projection;

    BitVector lift(int n, const BitVector& coords) const;
};

// Throws std::invalid_argument if the spaces are not Sq-stable.
Submodule submodule(const ModuleRef& ambient, const std::vector<Subspace>& spaces, std::string name = {});
Submodule submodule_with_basis(const ModuleRef& ambient, std::vector<f2::Basis> basis, std::string name = {},
                               std::vector<std::vector<std::string>> labels = {});
QuotientModule quotient(const ModuleRef& ambient, const std::vector<Subspace>& spaces, std::string name = {});

struct Subquotients {
    Submodule kernel;
    Submodule image;
    QuotientModule cokernel;
    ModuleMap corestriction;  // source -> image
};

// Rejects maps that fail A-linearity; re-verifies the short exact sequences.
Subquotients subquotient(const ModuleMap& f);
Submodule kernel(const ModuleMap& f, std::string name = {});
Submodule image(const ModuleMap& f, std::string name = {});
QuotientModule cokernel(const ModuleMap& f, std::string name = {});

// f restricted to submodules (target must contain the image).
ModuleMap restrict_map(const ModuleMap& f, const Submodule& source, const Submodule& target);
// f on quotients (f must carry the source kernel into the target kernel).
ModuleMap induced_map(const ModuleMap& f, const QuotientModule& source, const QuotientModule& target);
// A map into the ambient whose image lies in the submodule, corestricted.
ModuleMap corestrict(const ModuleMap& f, const Submodule& target);
// A map out of the ambient that kills the quotient kernel, factored.
ModuleMap factor_through(const ModuleMap& f, const QuotientModule& source);

// Exactness of A -f-> B -g-> C degreewise through `up_to`; returns the first failing degree.
std::optional<int> exactness_failure(const GradedLinearMap& f, const GradedLinearMap& g, int up_to);

// ---- loop functors -------------------------------------------------------

// 0 -> Sigma Omega_1 M -> Phi M -> M -> Sigma Omega M -> 0
struct FourTermOmega {
    ModuleRef module;
    ModuleRef phi_module;
    ModuleMap sq0;
    Submodule sq0_kernel;          // Sigma Omega_1 M inside Phi M
    QuotientModule sq0_cokernel;   // Sigma Omega M
    ModuleRef omega;
    ModuleRef omega1;
    int certified = 0;
    bool exact = false;
    std::string witness;
};

FourTermOmega omega(const ModuleRef& m);

struct ReducedVerdict {
    bool reduced = true;
    int certified = 0;  // checked degrees 0..certified
    std::optional<int> witness_degree;
    std::string witness;
};

// Checks injectivity of Sq_0 (Sq^n on M^n) for n <= up_to; requires up_to <= top/2.
ReducedVerdict is_reduced(const TruncatedModule& m, int up_to);
ReducedVerdict is_reduced(const TruncatedModule& m);

// ---- symmetric tensors of F(1) -------------------------------------------

struct SymLambda {
    ModuleRef f1;
    ModuleRef f1_squared;
    ModuleRef f2;
    ModuleRef phi_f1;
    Submodule invariants;   // (F(1) (x) F(1))^{S_2}
    ModuleMap f2_to_invariants;
    bool iso_to_f2 = false;
    ModuleMap diag;         // invariants -> Phi F(1)
    Submodule lambda2;      // ker diag, inside invariants
    int certified = 0;
};

// Invariants of the swap on M (x) M.
Submodule symmetric_invariants(const ModuleRef& m, const ModuleRef& mm);
// The coefficient of x_j (x) x_j, sent to Phi x_j.
ModuleMap diagonal_map(const ModuleRef& m, const ModuleRef& mm, const Submodule& invariants, const ModuleRef& phi_m);
SymLambda sym_lambda(int top);

}  // namespace r1kit::unstable
