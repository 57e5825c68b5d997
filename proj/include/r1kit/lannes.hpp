#pragma once

// Lannes' T-functor in closed form on finite sums of suspended polynomial
// modules (the "realm"), and the constructions built from it: sigma, tau,
// tau-bar, R~_1 as an equalizer, Fix on presented objects, and the
// comparison map alpha : Omega M -> T-bar M with its division functors.

#include "r1kit/fulu.hpp"
#include "r1kit/unstable.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace r1kit::lannes {

using f2::BitMatrix;
using f2::BitVector;
using f2::Subspace;
using fulu::FuluMap;
using fulu::FuluRef;
using unstable::ModuleMap;
using unstable::ModuleRef;

// Sigma^s H*((Z/2)^r).
struct Summand {
    int suspension = 0;
    int rank = 0;
};

class RealmObject {
public:
    RealmObject(std::vector<Summand> summands, int top);
    static RealmObject polynomial(int rank, int top) { return RealmObject({{0, rank}}, top); }

    const std::vector<Summand>& summands() const { return summands_; }
    int top() const { return top_; }
    const ModuleRef& module() const { return module_; }
    const ModuleRef& summand_module(std::size_t j) const { return parts_.at(j); }
    // Offset of summand j inside module()^n.
    std::size_t offset(int n, std::size_t j) const;
    std::string name() const { return module_->name(); }

private:
    std::vector<Summand> summands_;
    int top_;
    std::vector<ModuleRef> parts_;
    ModuleRef module_;
};

// Hom(W, V) for dim W = w, dim V = r, encoded as h = sum_i h(e_i) << (r * i).
using HomCode = std::uint64_t;

struct Component {
    std::size_t summand;
    HomCode h;
};

// T_W X (w = dim W) restricted to the components accepted by a filter; with
// every component it is F_2^{Hom(W, V)} (x) X summand by summand.
class TExpansion {
public:
    using Filter = std::function<bool(int rank, HomCode h)>;

    TExpansion(const RealmObject& base, int w, Filter filter, std::string name);

    const RealmObject& base() const { return base_; }
    int w() const { return w_; }
    const ModuleRef& module() const { return module_; }
    const std::vector<Component>& components() const { return components_; }
    // Position of (summand, h) in components(), or npos.
    std::size_t find(std::size_t summand, HomCode h) const;
    std::size_t offset(int n, std::size_t component) const;
    std::size_t component_count(std::size_t summand) const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    RealmObject base_;
    int w_;
    std::vector<Component> components_;
    ModuleRef module_;
};

// T_W X with all components.
TExpansion t_apply(const RealmObject& x, int w);
// T-bar X: components v != 0 of T X.
TExpansion t_bar(const RealmObject& x);
// T T-bar X inside T_{F^2} X: pairs (a, b) with b != 0 (a outer, b inner).
TExpansion t_tbar(const RealmObject& x);
// T-bar^2 X: pairs (a, b) with a, b != 0.
TExpansion tbar_squared(const RealmObject& x);

// The map that sends component h of the source identically to every listed target component
// (targets absent from the expansion are dropped).
using ComponentRule = std::function<std::vector<HomCode>(int rank, HomCode h)>;
ModuleMap component_map(const TExpansion& source, const TExpansion& target, const ComponentRule& rule);

// Maps induced by linear maps of W: phi : W -> W' sends component h to every h' with h' phi = h.
ModuleMap t_induced(const TExpansion& source, const TExpansion& target, const std::vector<std::vector<int>>& phi);

// T X -> T-bar X, (x_v) -> (x_v + x_0)_{v != 0}.
ModuleMap t_bar_projection(const TExpansion& t, const TExpansion& tbar);

// ---- sigma, tau, tau-bar -------------------------------------------------

struct TauSigma {
    FuluRef ext_m;           // F[u] (x) M
    FuluRef ext_tm;          // F[u] (x) T M
    FuluRef ext_tbar;        // F[u] (x) T-bar M
    fulu::FuluSubmodule bar; // F-bar[u] (x) T-bar M  (u-divisible part of ext_tbar)
    FuluMap sigma;
    FuluMap tau;
    FuluMap tau_bar;         // into bar
    FuluMap tau_bar_full;    // into ext_tbar
};

struct LannesContext {
    RealmObject x;
    TExpansion t;
    TExpansion tbar;
    TauSigma maps;

    explicit LannesContext(RealmObject x);
};

// g_v^* on F[u] (x) summand: u -> u, t_i -> t_i + t_i(v) u.  Square matrix on degree n.
BitMatrix gv_matrix(const RealmObject& x, std::size_t summand, int n, std::uint64_t v);

// ---- R~_1, invariants, C_1, C_2 ------------------------------------------

struct Rtilde {
    fulu::FuluSubmodule kernel;      // ker tau-bar
    fulu::FuluSubmodule equalizer;   // ker (sigma + tau)
    bool definitions_agree = false;
};

Rtilde rtilde(const LannesContext& c);

// F[u] (x) H*(V) fixed by g_v for v in a basis of V, computed by substituting one
// variable at a time.  A submodule of extend_scalars(polynomial_module(rank, top)).
unstable::Submodule gv_invariants(int rank, int top);

struct CFunctors {
    fulu::FuluSubmodule c1;  // image of tau-bar
    fulu::FuluQuotient c2;   // cokernel of tau-bar
};

CFunctors c_functors(const LannesContext& c);

// The projection F[u] (x) T M -> F[u] (x) M onto the v = 0 component; it retracts sigma and tau.
FuluMap zero_component_retraction(const LannesContext& c);

// ---- Fix -----------------------------------------------------------------

enum class DefiningMap { sigma, tau, sigma_plus_tau, tau_bar };
enum class PresentationKind { kernel, image, cokernel };

struct PresentedFuluObject {
    PresentationKind kind;
    DefiningMap map;
};

struct FixData {
    TExpansion t0;   // X itself (w = 0)
    TExpansion t1;   // T X
    TExpansion t2;   // T_{F^2} X
    TExpansion ttbar;
    TExpansion tbar2;
    ModuleMap unit;     // X -> T X, diagonal (T_0 -> T_F)
    ModuleMap zero_projection;  // T X -> X
    ModuleMap t_i1;     // T X -> T_{F^2} X, induced by i_1 : F -> F^2
    ModuleMap t_delta;  // induced by the diagonal F -> F^2
    ModuleMap j;        // T X -> T T-bar X, the reduction of T(i_1) + T(delta)
    ModuleMap k;        // T T-bar X -> T-bar^2 X

    explicit FixData(const RealmObject& x);
};

// The defining map on extended objects and the presented object itself.
FuluMap defining_map(const LannesContext& c, DefiningMap map);
FuluRef realize_presented(const LannesContext& c, const PresentedFuluObject& p);

// Fix of the defining map on T-expansions.
ModuleMap fix_of(const FixData& f, DefiningMap map);
// Fix of the presented object, using exactness of Fix.
ModuleRef fix_presented(const FixData& f, const PresentedFuluObject& p);

// ---- alpha and division functors -----------------------------------------

struct Alpha {
    unstable::FourTermOmega omega;
    ModuleRef tbar;          // T-bar M
    ModuleMap unit;          // M -> Sigma T-bar M
    bool kills_sq0 = false;  // unit vanishes on the image of Sq_0
    ModuleMap alpha;         // Omega M -> T-bar M
};

// From M, T-bar M and the map M -> Sigma T-bar M.
Alpha alpha_from_unit(const ModuleRef& m, const ModuleRef& tbar, const ModuleMap& unit);
// The u^1-coefficient of tau-bar, as M -> Sigma T-bar M.
ModuleMap tau_bar_unit(const LannesContext& c);
Alpha alpha(const LannesContext& c);
// Phi F(1) with T-bar Phi F(1) = F in degree 0 and the (necessarily zero) unit.
Alpha alpha_phi_f1(int top);

struct Division {
    unstable::QuotientModule div;  // coker alpha
    unstable::Submodule derived1;  // ker alpha
    ModuleRef derived2;            // Omega_1 M
};

Division division_u2(const Alpha& a);

}  // namespace r1kit::lannes
