#include "strlens/lens_str.hpp"

#include <algorithm>
#include <exception>
#include <vector>

#include "strlens/thetafn.hpp"

namespace strlens {

cplx edge_w(cplx alpha, const LensSpin& si, const LensSpin& sj, const LensParam& lp) {
    const cplx ia = IU * alpha;
    const cplx d = si.x - sj.x, s = si.x + sj.x;
    const int dm = si.m - sj.m, sm = si.m + sj.m;
    // the four lens gammas reuse the same two nome base pairs, which the
    // power memoisation inside elliptic_gamma turns into pure product loops
    return lens_gamma(d + ia, dm, lp) * lens_gamma(s + ia, sm, lp) /
           (lens_gamma(d - ia, dm, lp) * lens_gamma(s - ia, sm, lp));
}

EdgeWeights edge_weights(cplx alpha, const LensSpin& si, const LensSpin& sj,
                         const LensParam& lp) {
    return {edge_w(alpha, si, sj, lp), edge_w(lp.eta() - alpha, si, sj, lp)};
}

VertexWeight vertex_weight(const LensSpin& s, const LensParam& lp) {
    const cplx eta = lp.eta();
    const double r = lp.r;
    const ModularParam rt1(double(lp.r) * lp.tau1), rt2(double(lp.r) * lp.tau2);

    const cplx pref = std::exp(eta * r / 2.0 - 8.0 * eta * double(s.m) * double(s.m) / r) /
                      (2.0 * PI);
    const cplx value = pref *
                       jacobi_theta(ThetaKind::k1, 2.0 * (s.x - PI * double(s.m) * lp.tau1), rt1) *
                       jacobi_theta(ThetaKind::k1, 2.0 * (s.x + PI * double(s.m) * lp.tau2), rt2);

    const cplx alt = g_product(rt1) * g_product(rt2) / (2.0 * PI) /
                     (lens_gamma(2.0 * s.x + IU * eta, 2 * s.m, lp) *
                      lens_gamma(-2.0 * s.x + IU * eta, -2 * s.m, lp));
    return {value, alt};
}

NormR norm_R(const SpectralPair& al, const LensParam& lp) {
    const cplx eta = lp.eta();
    const cplx a1 = al.alpha1, a3 = al.alpha3;
    const cplx direct = lens_gamma(IU * (eta - 2.0 * a1), 0, lp) *
                        lens_gamma(IU * (eta - 2.0 * a3), 0, lp) /
                        lens_gamma(IU * (eta - 2.0 * (a1 + a3)), 0, lp);
    const cplx factorized = kappa(eta - a1, lp) / kappa(a1, lp) * kappa(eta - a3, lp) /
                            kappa(a3, lp) * kappa(a1 + a3, lp) / kappa(eta - a1 - a3, lp);
    return {direct, factorized};
}

namespace {

struct Panel {
    int m0;
    double a, b;
    int depth;
    cplx whole;  // rule estimate over [a, b]
};

struct Accepted {
    int m0;
    double a;
    cplx val;
};

const GaussLegendre& rule_for(int nodes) {
    if (nodes == 32) return gl32();
    if (nodes == 16) return gl16();
    thread_local GaussLegendre custom(2);
    thread_local int custom_n = 2;
    if (custom_n != nodes) {
        custom = GaussLegendre(nodes);
        custom_n = nodes;
    }
    return custom;
}

}  // namespace

StrResult str_residual(const LensSpin& s1, const LensSpin& s2, const LensSpin& s3,
                       const SpectralPair& al, const LensParam& lp, const QuadConfig& quad) {
    if (quad.nodes < 2) throw domain_error("str_residual: need at least 2 nodes per panel");
    const GaussLegendre& g = rule_for(quad.nodes);

    const cplx eta = lp.eta();
    const cplx a1 = al.alpha1, a3 = al.alpha3, a13 = al.alpha1 + al.alpha3;

    const auto integrand = [&](double x0, int m0) -> cplx {
        const LensSpin s0{x0, m0};
        return vertex_weight(s0, lp).value * edge_w(eta - a1, s0, s1, lp) *
               edge_w(a13, s0, s2, lp) * edge_w(eta - a3, s0, s3, lp);
    };

    const auto eval_panel = [&](int m0, double a, double b) -> cplx {
        const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
        cplx acc = 0.0;
        for (std::size_t k = 0; k < g.x.size(); ++k) acc += g.w[k] * integrand(mid + h * g.x[k], m0);
        return acc * h;
    };

    // initial panels: [0, pi/2] and [pi/2, pi] for every m0 sector
    std::vector<Panel> work;
    for (int m0 = 0; m0 < lp.r; ++m0) {
        work.push_back({m0, 0.0, PI / 2.0, 0, 0.0});
        work.push_back({m0, PI / 2.0, PI, 0, 0.0});
    }

    std::exception_ptr eptr = nullptr;
    const auto guarded = [&](auto&& fn) {
        try {
            fn();
        } catch (...) {
#ifdef STRLENS_HAVE_OPENMP
#pragma omp critical(strlens_quad_err)
#endif
            if (!eptr) eptr = std::current_exception();
        }
    };

#ifdef STRLENS_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (quad.parallel)
#endif
    for (std::size_t i = 0; i < work.size(); ++i)
        guarded([&] { work[i].whole = eval_panel(work[i].m0, work[i].a, work[i].b); });
    if (eptr) std::rethrow_exception(eptr);

    double scale = 0.0;
    for (const Panel& p : work) scale = std::max(scale, std::abs(p.whole));

    std::vector<Accepted> accepted;
    while (!work.empty()) {
        std::vector<std::array<cplx, 2>> halves(work.size());
#ifdef STRLENS_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (quad.parallel)
#endif
        for (std::size_t i = 0; i < work.size(); ++i)
            guarded([&] {
                const Panel& p = work[i];
                const double mid = 0.5 * (p.a + p.b);
                halves[i] = {eval_panel(p.m0, p.a, mid), eval_panel(p.m0, mid, p.b)};
            });
        if (eptr) std::rethrow_exception(eptr);

        std::vector<Panel> next;
        for (std::size_t i = 0; i < work.size(); ++i) {
            const Panel& p = work[i];
            const cplx ih = halves[i][0] + halves[i][1];
            const double err = std::abs(p.whole - ih);
            const double ref = std::max(std::abs(ih), 1e-2 * scale);
            if (err > quad.rel_tol * ref) {
                if (p.depth + 1 > quad.max_depth)
                    throw quadrature_error(
                        "str_residual: panel refinement exhausted at depth " +
                        std::to_string(p.depth) + " (m0 = " + std::to_string(p.m0) + ")");
                const double mid = 0.5 * (p.a + p.b);
                next.push_back({p.m0, p.a, mid, p.depth + 1, halves[i][0]});
                next.push_back({p.m0, mid, p.b, p.depth + 1, halves[i][1]});
            } else {
                accepted.push_back({p.m0, p.a, ih});
            }
        }
        work = std::move(next);
    }

    // canonical accumulation order: by sector, then by position.  This makes
    // the sum independent of how panels were scheduled across threads.
    std::sort(accepted.begin(), accepted.end(), [](const Accepted& u, const Accepted& v) {
        return u.m0 != v.m0 ? u.m0 < v.m0 : u.a < v.a;
    });
    cplx lhs = 0.0;
    for (const Accepted& t : accepted) lhs += t.val;

    const cplx rhs = norm_R(al, lp).direct * edge_w(a1, s2, s3, lp) *
                     edge_w(eta - a13, s1, s3, lp) * edge_w(a3, s1, s2, lp);
    return {lhs, rhs, std::abs(lhs - rhs) / std::abs(rhs)};
}

}  // namespace strlens
