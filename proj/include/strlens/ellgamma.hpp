#pragma once
// The elliptic gamma function in the odd-nome-power normalisation
//
//   Gamma(z; P, Q) = prod_{j,k >= 0} (1 - e^{2iz} P^{2j+1} Q^{2k+1})
//                                  / (1 - e^{-2iz} P^{2j+1} Q^{2k+1}),
//
// its lens generalisation carrying a discrete holonomy index m (defined
// mod r), and the kappa constant normalising the lens measure.  The double
// product converges for every z as long as |P|, |Q| < 1, which is why it is
// used directly instead of a logarithmic resummation: the m-shifted
// arguments in the lens function routinely leave the strip where the log
// series converges.

#include "common.hpp"

namespace strlens {

cplx elliptic_gamma(cplx z, cplx P, cplx Q);

// the (r, tau1, tau2) triple every lens-space quantity depends on
struct LensParam {
    int r;
    cplx tau1, tau2;
    LensParam(int r_, cplx t1, cplx t2, double min_im = 0.05) : r(r_), tau1(t1), tau2(t2) {
        if (r < 1) throw domain_error("LensParam: r must be >= 1");
        if (!(t1.imag() >= min_im) || !(t2.imag() >= min_im))
            throw domain_error("LensParam: Im(tau) below the floor " + std::to_string(min_im));
    }
    cplx eta() const { return -IU * PI / 2.0 * (tau1 + tau2); }
};

// lens elliptic gamma; m enters only through m mod r
cplx lens_gamma(cplx z, int m, const LensParam& lp);

// kappa(alpha) = exp of the bilateral sum; converges for
// |4 Re alpha| < 2 pi Im(tau1 + tau2) and throws convergence_error outside
cplx kappa(cplx alpha, const LensParam& lp);

}  // namespace strlens
