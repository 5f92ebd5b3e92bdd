#pragma once
// Jacobi theta functions on the upper half plane, in the two normalisations
// used throughout this library:
//
//   theta_bar    - the bare triple-product part (no eta-style prefactor),
//   jacobi_theta - G(tau) * theta_bar, the classical series normalisation,
//
// where G(tau) = prod_{n>=1} (1 - e^{2 pi i tau n}).  Products are truncated
// once the nome powers drop below ~1e-18 (with an allowance for Im x pushing
// |e^{2ix}| above 1), and the nome powers are memoised per modulus in a
// thread-local slot so tight loops at a fixed tau do not keep re-exponentiating.

#include "common.hpp"

namespace strlens {

enum class ThetaKind : int { k1 = 1, k2 = 2, k3 = 3, k4 = 4 };

struct ModularParam {
    cplx tau;
    // The default floor keeps truncation lengths sane; callers that really
    // need a flatter torus can lower it explicitly.
    explicit ModularParam(cplx t, double min_im = 0.05) : tau(t) {
        if (!(t.imag() >= min_im))
            throw domain_error("ModularParam: Im(tau) = " + std::to_string(t.imag()) +
                               " below the floor " + std::to_string(min_im));
    }
};

cplx theta_bar(ThetaKind kind, cplx x, const ModularParam& tau);
cplx jacobi_theta(ThetaKind kind, cplx x, const ModularParam& tau);
cplx g_product(const ModularParam& tau);

// convenience for the heavy internal users (saddle action, discrete weights)
inline cplx theta_bar(int kind, cplx x, cplx tau) {
    return theta_bar(static_cast<ThetaKind>(kind), x, ModularParam(tau));
}
inline cplx jacobi_theta(int kind, cplx x, cplx tau) {
    return jacobi_theta(static_cast<ThetaKind>(kind), x, ModularParam(tau));
}

enum class ModularTransform { T, S, STS, STS_scaled };

// Predicted value of vartheta_kind(z | f(tau)) assembled purely from theta
// values at tau, where f is the modulus map of the chosen transform:
//   T:  tau + 1        S:  -1/tau
//   STS:  tau/(1-tau)  STS_scaled:  tau/(N(1-tau))   (kind 4 only)
// Comparing against direct evaluation at f(tau) exercises the transformation
// identities at working precision.
cplx theta_via_modular(ModularTransform tr, ThetaKind kind, cplx z,
                       const ModularParam& tau, int N = 1);

// modulus map of the transform, for tests and callers that want the target
cplx transformed_tau(ModularTransform tr, cplx tau, int N = 1);

}  // namespace strlens
