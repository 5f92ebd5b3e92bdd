#pragma once
// Boltzmann weights of the lens model (continuous angle plus discrete
// holonomy at every site) and the numerical verification of the master
// star-triangle relation
//
//   sum_{m0=0}^{r-1} int_0^pi dx0  S(s0) Wb_{a1}(s0,s1) W_{a1+a3}(s0,s2) Wb_{a3}(s0,s3)
//     = R(a1,a3) W_{a1}(s2,s3) Wb_{a1+a3}(s1,s3) W_{a3}(s1,s2),
//
// where Wb_a = W_{eta-a} and eta = -(i pi/2)(tau1+tau2) is the crossing
// parameter.  The x0 integral runs over the real segment [0, pi] exactly as
// the measure dictates; no contour deformation is attempted (a pole close to
// the contour errors out instead).

#include "ellgamma.hpp"
#include "quad.hpp"

namespace strlens {

struct LensSpin {
    double x = 0.0;  // continuous component; integration spins live in [0, pi]
    int m = 0;       // discrete holonomy, defined mod r
};

struct SpectralPair {
    cplx alpha1, alpha3;
};

struct EdgeWeights {
    cplx W, Wbar;
};
struct VertexWeight {
    cplx value;  // theta-product form
    cplx alt;    // gamma-ratio form of the same display
};
struct NormR {
    cplx direct;      // three-gamma ratio
    cplx factorized;  // six-kappa product
};
struct StrResult {
    cplx lhs, rhs;
    double rel_err;
};

struct QuadConfig {
    int nodes = 32;         // Gauss-Legendre nodes per panel
    double rel_tol = 1e-10; // split a panel when it disagrees with its halves by more
    int max_depth = 12;     // halvings of an initial panel before giving up
    bool parallel = true;   // evaluate panels under OpenMP; the accumulation
                            // order is canonical either way, so results match
};

// the four-gamma edge weight W_alpha(si, sj)
cplx edge_w(cplx alpha, const LensSpin& si, const LensSpin& sj, const LensParam& lp);

EdgeWeights edge_weights(cplx alpha, const LensSpin& si, const LensSpin& sj,
                         const LensParam& lp);

VertexWeight vertex_weight(const LensSpin& s, const LensParam& lp);

NormR norm_R(const SpectralPair& alphas, const LensParam& lp);

StrResult str_residual(const LensSpin& s1, const LensSpin& s2, const LensSpin& s3,
                       const SpectralPair& alphas, const LensParam& lp,
                       const QuadConfig& quad = {});

}  // namespace strlens
