#pragma once
// Root-of-unity asymptotics of the lens weights and the classical limit of
// the star-triangle relation.
//
// Pinning tau2 to the ray tau2(hbar) = 1/(rN) + i hbar/(pi r) sends the
// second nome to a primitive 2rN-th root of unity as hbar -> 0, and the
// log of the lens gamma function expands as
//
//   log Gamma(z, m) = Phi^{-1}(z, m)/hbar + log Phi^0(z, m) + O(hbar),
//
// with the leading coefficient a theta integral in the hatted coordinate
// zhat = z + pi m/(rN) at the hatted modulus tauhat = N tau + 1/r.  A linear
// change of variables moves the crossing parameter to pi/2; in the new frame
// the saddle condition of the master relation is a three-leg theta-ratio
// equation, the classical relation equates star and triangle actions, and
// the Gaussian fluctuation around the saddle is a closed theta quotient D.
//
// Conventions fixed here (they matter when comparing against raw formulas):
//  * every log of a theta ratio is phase-continued along its whole path, so
//    integrals pick the branch reaching continuously from the base point;
//  * the ratio theta2(t+z)/theta2(t-z) degenerates to the constant -1 when
//    t = pi/2 mod pi, where the two one-sided continuations give +/- i pi
//    times the path length; the symmetric value 0 is used, which is the
//    unique choice closing the degenerate classical relation at
//    theta1 = theta3 = 0;
//  * fractional powers are principal with a right-half-plane regime check
//    (see frac_pow in common.hpp).

#include <array>
#include <vector>

#include "ellgamma.hpp"
#include "lens_str.hpp"
#include "quad.hpp"
#include "thetafn.hpp"

namespace strlens {

// ---------------------------------------------------------------- expansion

// degeneration data: tau1 survives, tau2 runs along the root-of-unity ray
struct RootOfUnityLimit {
    ModularParam tau;  // the surviving first modulus
    int r = 1;
    int N = 1;
    double hbar = 0.1;  // > 0; the expansion parameter
    RootOfUnityLimit(ModularParam t, int r_, int N_, double hb);
    cplx tau2() const;             // 1/(rN) + i hbar/(pi r)
    cplx degenerate_nome() const;  // e^{i pi tau2} = zeta e^{-hbar/r}, zeta = e^{i pi/(rN)}
};

// the natural variable of the leading-order action
struct HattedCoord {
    cplx xhat;    // z + pi m/(rN)
    cplx tauhat;  // N tau + 1/r
};
HattedCoord hatted(cplx z, int m, const ModularParam& tau, int r, int N);

// Phi^{-1}(z, m) = (i/N) int_0^zhat log theta4bar(N u | tauhat) du,
// integrated along the straight segment with the log phase-continued
cplx phi_leading(cplx z, int m, const ModularParam& tau, int r, int N,
                 const LogTrackOpts& opts = {});

// Phi^0(z, m): exponential prefactor times a finite double theta product with
// fractional exponents, times the |m| correction factors
cplx phi_subleading(cplx z, int m, const ModularParam& tau, int r, int N);

// remainder of log Gamma(z, m) after subtracting Phi^{-1}/hbar + log Phi^0,
// with the nearest integer multiple of 2 pi i dropped.  Halving hbar from
// hbar0 n_halvings times should shrink the remainder by ~1/2 each step (the
// O(hbar) tail dominates).  Requires hbar0 >= 0.05: far below that the
// gamma product itself stops converging in double precision.  Throws
// branch_error if a remainder lands too close to the midpoint between two
// multiples of 2 pi i for the drop to be unambiguous.
struct ExpansionPoint {
    double hbar = 0.0;
    cplx remainder;
};
std::vector<ExpansionPoint> expansion_check(cplx z, int m, const ModularParam& tau,
                                            int r, int N, double hbar0, int n_halvings);

// ---------------------------------------------------- change of variables

// original-frame data: hatted spins zeta, spectral pair, first modulus
struct OriginalVariables {
    std::vector<cplx> zeta;
    SpectralPair alphas;
    cplx tau;
};

// crossing-normalised frame: eta' = pi/2 exactly, by construction
struct ChangedVariables {
    std::vector<cplx> phi;
    cplx theta1, theta3;
    cplx tau_prime;
    static cplx eta_prime() { return cplx(PI / 2, 0); }
};

// phi = (zeta + r pi tau/4) rN/(1 + rN tau), theta = i rN alpha/(1 + rN tau),
// tau' = rN tau/(1 + rN tau).  Throws domain_error when 1 + rN tau is
// numerically zero (the frame degenerates).
ChangedVariables change_of_variables(const OriginalVariables& o, int r, int N);
OriginalVariables invert_change_of_variables(const ChangedVariables& c, int r, int N);

// ------------------------------------------------------- classical actions

// a star problem in the crossing-normalised frame: three spectator spins,
// two spectral angles, the product modulus sigma = r tau' and the two
// degeneration integers.  r defaults to 1; everything in this section
// depends on r and tau' only through sigma, except the explicit 1/(rN^2)
// prefactors.
struct SaddleProblem {
    cplx phi1, phi2, phi3;
    cplx theta1, theta3;
    cplx rtau;  // sigma = r tau'
    int N = 1;
    int r = 1;
    cplx tau_prime() const { return rtau / static_cast<double>(r); }
    // phi-space spacing of the saddle lattice: the image of the hatted-frame
    // step pi/N under the change of variables
    cplx branch_delta() const { return PI * static_cast<double>(r) * (1.0 - tau_prime()); }
    cplx prefactor() const;  // i/(r N^2 (1 - tau'))
};

// C(phi) = -u^2 with u = (2 phi - r pi/2)/(rN(1 - tau')), Re u reduced into
// [0, 2 pi/N) by the lattice period first.  The C terms cancel identically
// between star and triangle in every observable below; the window only
// pins down raw action values.
cplx c_term(cplx phi, const SaddleProblem& pb);

// int_a^b log( thetabar_kind(t + z | sigma) / thetabar_kind(t - z | sigma) ) dz
// (phase-continued; kind 2 at t = pi/2 mod pi returns 0 by the convention
// described at the top of this header)
cplx intlog_ratio(ThetaKind kind, cplx t, cplx a, cplx b, const SaddleProblem& pb,
                  const LogTrackOpts& opts = {});

// edge action Lambda(theta | phi_i, phi_j) and its crossing reflection
// Lambdabar(theta) = Lambda(pi/2 - theta); antisymmetric in theta, symmetric
// in (phi_i, phi_j)
cplx lambda_edge(cplx theta, cplx phi_i, cplx phi_j, const SaddleProblem& pb,
                 const LogTrackOpts& opts = {});
cplx lambda_edge_bar(cplx theta, cplx phi_i, cplx phi_j, const SaddleProblem& pb,
                     const LogTrackOpts& opts = {});

// star action at centre spin phi0 (the C(phi0) well enters with a minus
// sign: the displayed plus sign cannot satisfy the saddle equation, see the
// derivative identity verified in the tests) and the triangle action
cplx a_star(cplx phi0, const SaddleProblem& pb, const LogTrackOpts& opts = {});
cplx a_triangle(const SaddleProblem& pb, const LogTrackOpts& opts = {});

// ------------------------------------------------------------ saddle points

// the pointwise three-leg function whose zeros mod 2 pi i are the saddle
// spins: theta-ratio legs at modulus sigma, or their trigonometric
// degeneration (cosine ratios, the sigma -> i infinity limit used by the
// chiral Potts cross-checks)
enum class ThreeLegKind { theta, cosine };
cplx three_leg(cplx phi0, const SaddleProblem& pb, ThreeLegKind kind = ThreeLegKind::theta);

// d a_star/d phi0 equals prefactor() * three_leg pointwise; solving
// three_leg = 0 mod 2 pi i therefore locates the saddles without quadrature
struct SaddleSolution {
    cplx phi_star;   // root in the fundamental cell around the spectator mean
    cplx zeta_star;  // hatted-frame image; branch spacing is exactly pi/N there
    int branch_n = 0;
    double residual = 0.0;  // |three_leg| at phi_star, nearest 2 pi i removed
};

// All N branches for the theta kind (spaced by branch_delta() in phi, by
// pi/N in zeta); a single solution for the cosine kind, whose degeneration
// pushes the branch lattice off to infinity.  At the lattice-degenerate
// configuration phi_i = pi (integer + nu)/2, nu in {0, 1/2}, every lattice
// point is a saddle and the representative phi1 is returned.
std::vector<SaddleSolution> solve_saddle(const SaddleProblem& pb,
                                         ThreeLegKind kind = ThreeLegKind::theta);

// a_star(phi_star) - a_triangle; vanishes at any saddle (the classical
// star-triangle relation).  Requires sol.residual < 1e-12.
cplx classical_str_residual(const SaddleSolution& sol, const SaddleProblem& pb,
                            const LogTrackOpts& opts = {});

// ------------------------------------------------------------- fluctuation

// the closed-form Gaussian fluctuation quotient
//   D(theta | phi_i, phi_j) = th1(2 theta) th4(2 phi_i) th4(2 phi_j)
//     / ( th4(phi_i+phi_j+theta) th4(phi_i+phi_j-theta)
//         th1(phi_i-phi_j+theta) th1(phi_i-phi_j-theta) )   at sigma
cplx d_ratio(cplx theta, cplx phi_i, cplx phi_j, const SaddleProblem& pb);

// five-point finite-difference second derivative of a_star at the saddle
// against D(theta1|ph*,ph1) D(theta3|ph*,ph3) / D(theta1+theta3|ph1,ph3);
// the ratio of the two is a constant of the modulus alone
struct CurvatureCheck {
    cplx second_derivative;
    cplx d_quotient;
    cplx ratio;
};
CurvatureCheck second_derivative_check(const SaddleSolution& sol, const SaddleProblem& pb,
                                       const LogTrackOpts& opts = {});

// ------------------------------------------------------ hatted-frame action

// the leading-order star action assembled directly in the hatted frame from
// Phi^{-1}-type integrals: minus the two centre-well terms plus the three
// legs in difference and sum coordinates.  Its zeta0-derivative equals
// (i/N) times the three-leg function of the mapped phi spin (mod 2 pi i/N),
// so its critical points are exactly the saddle images.  While every
// integral argument stays inside the strip |Im(N w)| < pi Im(tauhat)/2 --
// in particular for real zeta and real spectral alphas, the physical torus
// -- the action is exactly periodic under zeta0 -> zeta0 + pi/N.  Past the
// zero line of theta4 the phase-continued integrals pick up quasi-periodic
// linear terms; those cancel between the terms up to a constant, so the
// shift difference stays independent of zeta0 but no longer vanishes, and
// it jumps whenever an argument crosses a further zero line.
cplx xhat_star_action(cplx zeta0, const std::array<cplx, 3>& zeta, const SpectralPair& alphas,
                      const ModularParam& tau, int r, int N, const LogTrackOpts& opts = {});

}  // namespace strlens
