#pragma once
// Gauss-Legendre panel quadrature, in the two flavours needed here:
//
//  * plain fixed-panel rules along a straight segment.  Deterministic by
//    construction, which matters because the classical action is finite
//    differenced: a fixed rule makes the (smooth) quadrature error cancel
//    between stencil points instead of jittering with adaptive decisions.
//
//  * branch-tracked integrals of log f along a segment.  The integrand's
//    phase is continued node to node; a jump of pi/2 or more between
//    adjacent nodes means the panels are too coarse (or, in fixed mode,
//    that something is genuinely wrong).  The minimum of |f| along the
//    path is monitored so a zero crossing the contour is reported rather
//    than silently absorbed into a wrong branch.

#include <cmath>
#include <vector>

#include "common.hpp"

namespace strlens {

struct GaussLegendre {
    std::vector<double> x, w;  // nodes/weights on [-1,1], nodes ascending
    explicit GaussLegendre(int n) : x(n), w(n) {
        for (int i = 0; i < n; ++i) {
            // Newton from the Chebyshev-like initial guess
            double t = std::cos(PI * (i + 0.75) / (n + 0.5));
            double p0 = 0.0, dp = 0.0;
            for (int it = 0; it < 64; ++it) {
                p0 = 1.0;
                double p1 = 0.0;
                for (int k = 0; k < n; ++k) {
                    double p2 = p1;
                    p1 = p0;
                    p0 = ((2 * k + 1) * t * p1 - k * p2) / (k + 1);
                }
                dp = n * (t * p0 - p1) / (t * t - 1.0);
                double dt = p0 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            x[n - 1 - i] = t;  // guesses come out descending
            w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
    }
};

inline const GaussLegendre& gl32() {
    static const GaussLegendre g(32);
    return g;
}
inline const GaussLegendre& gl16() {
    static const GaussLegendre g(16);
    return g;
}

// \int f along the straight segment [a,b], fixed equal panels.
template <class F>
cplx integrate_segment(F&& f, cplx a, cplx b, int panels = 1,
                       const GaussLegendre& g = gl32()) {
    const cplx h = (b - a) / double(panels);
    cplx acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const cplx mid = a + h * (p + 0.5);
        for (std::size_t k = 0; k < g.x.size(); ++k)
            acc += g.w[k] * f(mid + 0.5 * h * g.x[k]);
    }
    return acc * 0.5 * h;
}

struct LogTrackOpts {
    int panels = 8;         // initial panel count
    int max_panels = 4096;  // refinement cap (doubling)
    bool refine = true;     // false: fixed panels, a large phase jump throws
    double zero_rel = 1e-12;  // min |f| relative to max |f| before giving up
};

// \int log f along the straight segment [a,b] with the log branch continued
// point to point.  Returns the branch reached by that continuation (which is
// the whole point: principal logs would tear at every phase wrap).
template <class F>
cplx integrate_log_segment(F&& f, cplx a, cplx b, LogTrackOpts opts = {}) {
    if (a == b) return 0.0;
    const GaussLegendre& g = gl32();
    int panels = opts.panels;
    for (;;) {
        const cplx h = (b - a) / double(panels);
        cplx acc = 0.0;
        double prev_phase = 0.0;
        bool first = true;
        double max_jump = 0.0, fmax = 0.0, fmin = 0.0;
        for (int p = 0; p < panels; ++p) {
            const cplx mid = a + h * (p + 0.5);
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                const cplx v = f(mid + 0.5 * h * g.x[k]);
                const double av = std::abs(v);
                if (first) {
                    fmax = fmin = av;
                } else {
                    if (av > fmax) fmax = av;
                    if (av < fmin) fmin = av;
                }
                double ph = std::arg(v);
                if (!first) {
                    ph += 2.0 * PI * std::round((prev_phase - ph) / (2.0 * PI));
                    const double jump = std::abs(ph - prev_phase);
                    if (jump > max_jump) max_jump = jump;
                }
                first = false;
                prev_phase = ph;
                acc += g.w[k] * cplx(std::log(av), ph);
            }
        }
        if (fmin < opts.zero_rel * std::max(1.0, fmax))
            throw pole_error("integrate_log_segment: integrand vanishes on the path");
        if (max_jump < PI / 2.0) return acc * 0.5 * h;
        if (!opts.refine)
            throw quadrature_error("integrate_log_segment: phase jump on fixed panels");
        panels *= 2;
        if (panels > opts.max_panels)
            throw quadrature_error("integrate_log_segment: refinement cap hit while chasing the branch");
    }
}

}  // namespace strlens
