#include "strlens/saddle_asym.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace strlens {

// --------------------------------------------------------------- expansion

RootOfUnityLimit::RootOfUnityLimit(ModularParam t, int r_, int N_, double hb)
    : tau(t), r(r_), N(N_), hbar(hb) {
    if (r < 1 || N < 1) throw domain_error("RootOfUnityLimit: r and N must be >= 1");
    if (!(hbar > 0.0)) throw domain_error("RootOfUnityLimit: hbar must be positive");
}

cplx RootOfUnityLimit::tau2() const {
    return {1.0 / (static_cast<double>(r) * N), hbar / (PI * r)};
}

cplx RootOfUnityLimit::degenerate_nome() const { return std::exp(IU * PI * tau2()); }

HattedCoord hatted(cplx z, int m, const ModularParam& tau, int r, int N) {
    if (r < 1 || N < 1) throw domain_error("hatted: r and N must be >= 1");
    const double rN = static_cast<double>(r) * N;
    return {z + PI * static_cast<double>(m) / rN,
            static_cast<double>(N) * tau.tau + 1.0 / static_cast<double>(r)};
}

cplx phi_leading(cplx z, int m, const ModularParam& tau, int r, int N,
                 const LogTrackOpts& opts) {
    const HattedCoord h = hatted(z, m, tau, r, N);
    const ModularParam th(h.tauhat);
    const cplx val = integrate_log_segment(
        [&](cplx u) { return theta_bar(ThetaKind::k4, static_cast<double>(N) * u, th); },
        cplx(0.0), h.xhat, opts);
    return IU / static_cast<double>(N) * val;
}

cplx phi_subleading(cplx z, int m, const ModularParam& tau, int r, int N) {
    const HattedCoord h = hatted(z, m, tau, r, N);
    const double rN = static_cast<double>(r) * N;
    const cplx t = tau.tau;
    const ModularParam rt(static_cast<double>(r) * t);
    // exponential prefactor; vanishes identically for m = 0 mod r
    cplx out = std::exp(IU * static_cast<double>(m) * static_cast<double>(r - m) /
                        (6.0 * r * r * N) *
                        (6.0 * rN * z + PI * static_cast<double>(r - 2 * m) * (rN * (t - 1.0) - 1.0)));
    for (int k1 = 0; k1 < N; ++k1)
        for (int k2 = 0; k2 < r; ++k2) {
            const cplx arg = h.xhat + PI * static_cast<double>(k1 + 1) / static_cast<double>(N) -
                             PI * h.tauhat * static_cast<double>(2 * k2 + 1) / (2.0 * N) +
                             PI * static_cast<double>(r) * t / 2.0;
            const double e =
                (rN - 2.0 * r * (k1 + 1) + 2.0 * k2 - 2.0 * m + 1.0) / (2.0 * rN);
            out *= frac_pow(theta_bar(ThetaKind::k4, arg, rt), e);
        }
    // the |m| sign-split correction factors carry integer exponents
    const int eps = m >= 0 ? 1 : -1;
    for (int k = 0; k < std::abs(m); ++k) {
        const cplx arg = h.xhat -
                         static_cast<double>(eps) * PI * h.tauhat * static_cast<double>(2 * k + 1) /
                             (2.0 * N) +
                         PI * static_cast<double>(r) * t / 2.0;
        const cplx v = theta_bar(ThetaKind::k4, arg, rt);
        out *= (eps == 1) ? v : 1.0 / v;
    }
    return out;
}

std::vector<ExpansionPoint> expansion_check(cplx z, int m, const ModularParam& tau, int r,
                                            int N, double hbar0, int n_halvings) {
    if (!(hbar0 >= 0.05))
        throw domain_error("expansion_check: hbar0 must be >= 0.05 (the gamma product "
                           "loses double-precision convergence below that)");
    if (n_halvings < 0) throw domain_error("expansion_check: n_halvings must be >= 0");
    const int mr = ((m % r) + r) % r;  // the gamma side only sees m mod r
    const cplx lead = phi_leading(z, mr, tau, r, N);
    const cplx sub = std::log(phi_subleading(z, mr, tau, r, N));
    std::vector<ExpansionPoint> out;
    out.reserve(n_halvings + 1);
    double hb = hbar0;
    for (int k = 0; k <= n_halvings; ++k, hb *= 0.5) {
        const RootOfUnityLimit lim(tau, r, N, hb);
        const LensParam lp(r, tau.tau, lim.tau2(), 1e-6);
        const cplx rem_raw = std::log(lens_gamma(z, mr, lp)) - lead / hb - sub;
        // the raw remainder is only defined mod 2 pi i; refuse to guess when it
        // sits near the midpoint between two multiples
        const double y = rem_raw.imag() / (2.0 * PI);
        const double frac = std::abs(y - std::round(y));
        if (2.0 * PI * (1.0 - 2.0 * frac) < 0.1)
            throw branch_error("expansion_check: remainder ambiguous between two 2 pi i branches");
        out.push_back({hb, drop_2pii(rem_raw)});
    }
    return out;
}

// ------------------------------------------------------ change of variables

ChangedVariables change_of_variables(const OriginalVariables& o, int r, int N) {
    if (r < 1 || N < 1) throw domain_error("change_of_variables: r and N must be >= 1");
    const double rN = static_cast<double>(r) * N;
    const cplx den = 1.0 + rN * o.tau;
    if (std::abs(den) < 1e-6)
        throw domain_error("change_of_variables: 1 + rN tau is numerically zero");
    ChangedVariables c;
    c.tau_prime = rN * o.tau / den;
    const cplx scale = rN / den;
    c.phi.reserve(o.zeta.size());
    for (cplx zt : o.zeta)
        c.phi.push_back((zt + static_cast<double>(r) * PI * o.tau / 4.0) * scale);
    c.theta1 = IU * rN * o.alphas.alpha1 / den;
    c.theta3 = IU * rN * o.alphas.alpha3 / den;
    return c;
}

OriginalVariables invert_change_of_variables(const ChangedVariables& c, int r, int N) {
    if (r < 1 || N < 1) throw domain_error("invert_change_of_variables: r and N must be >= 1");
    const double rN = static_cast<double>(r) * N;
    const cplx om = 1.0 - c.tau_prime;
    if (std::abs(om) < 1e-6)
        throw domain_error("invert_change_of_variables: tau' is numerically 1");
    OriginalVariables o;
    o.tau = c.tau_prime / (rN * om);
    o.zeta.reserve(c.phi.size());
    for (cplx ph : c.phi)
        o.zeta.push_back(ph / (rN * om) - static_cast<double>(r) * PI * o.tau / 4.0);
    o.alphas.alpha1 = -IU * c.theta1 / (rN * om);
    o.alphas.alpha3 = -IU * c.theta3 / (rN * om);
    return o;
}

// -------------------------------------------------------- classical actions

cplx SaddleProblem::prefactor() const {
    return IU / (static_cast<double>(r) * N * N * (1.0 - tau_prime()));
}

cplx c_term(cplx phi, const SaddleProblem& pb) {
    const double rN = static_cast<double>(pb.r) * pb.N;
    cplx u = (2.0 * phi - static_cast<double>(pb.r) * PI / 2.0) / (rN * (1.0 - pb.tau_prime()));
    const double period = 2.0 * PI / pb.N;
    u -= period * std::floor(u.real() / period);
    return -u * u;
}

cplx intlog_ratio(ThetaKind kind, cplx t, cplx a, cplx b, const SaddleProblem& pb,
                  const LogTrackOpts& opts) {
    if (kind == ThetaKind::k2) {
        // the ratio degenerates to the constant -1 at t = pi/2 mod pi; the
        // symmetric branch assignment makes the integral vanish
        const cplx k = (t - PI / 2.0) / PI;
        if (std::abs(k - std::round(k.real())) < 1e-12) return 0.0;
    }
    const ModularParam sig(pb.rtau);
    return integrate_log_segment(
        [&](cplx zz) { return theta_bar(kind, t + zz, sig) / theta_bar(kind, t - zz, sig); },
        a, b, opts);
}

cplx lambda_edge(cplx theta, cplx phi_i, cplx phi_j, const SaddleProblem& pb,
                 const LogTrackOpts& opts) {
    const cplx wells = c_term(phi_i, pb) + c_term(phi_j, pb);
    const cplx sum_leg = intlog_ratio(ThetaKind::k3, theta,
                                      static_cast<double>(pb.r) * PI / 2.0, phi_i + phi_j, pb, opts);
    const cplx diff_leg = intlog_ratio(ThetaKind::k2, theta, cplx(0.0), phi_i - phi_j, pb, opts);
    return (theta / PI) * wells + pb.prefactor() * (sum_leg + diff_leg);
}

cplx lambda_edge_bar(cplx theta, cplx phi_i, cplx phi_j, const SaddleProblem& pb,
                     const LogTrackOpts& opts) {
    return lambda_edge(PI / 2.0 - theta, phi_i, phi_j, pb, opts);
}

cplx a_star(cplx phi0, const SaddleProblem& pb, const LogTrackOpts& opts) {
    // the centre well enters with a minus sign; the leg wells contribute
    // exactly +C(phi0) in total, so a_star is C-window independent in phi0
    return lambda_edge_bar(pb.theta1, phi0, pb.phi1, pb, opts) +
           lambda_edge(pb.theta1 + pb.theta3, phi0, pb.phi2, pb, opts) +
           lambda_edge_bar(pb.theta3, phi0, pb.phi3, pb, opts) - c_term(phi0, pb);
}

cplx a_triangle(const SaddleProblem& pb, const LogTrackOpts& opts) {
    return lambda_edge(pb.theta1, pb.phi2, pb.phi3, pb, opts) +
           lambda_edge_bar(pb.theta1 + pb.theta3, pb.phi1, pb.phi3, pb, opts) +
           lambda_edge(pb.theta3, pb.phi1, pb.phi2, pb, opts);
}

// ------------------------------------------------------------ saddle points

cplx three_leg(cplx phi0, const SaddleProblem& pb, ThreeLegKind kind) {
    const std::array<std::pair<cplx, cplx>, 3> legs{{
        {PI / 2.0 - pb.theta1, pb.phi1},
        {pb.theta1 + pb.theta3, pb.phi2},
        {PI / 2.0 - pb.theta3, pb.phi3},
    }};
    cplx acc = 0.0;
    if (kind == ThreeLegKind::cosine) {
        for (const auto& [th, pl] : legs) {
            const cplx d = phi0 - pl;
            acc += std::log(std::cos(th + d) / std::cos(th - d));
        }
    } else {
        const ModularParam sig(pb.rtau);
        for (const auto& [th, pl] : legs) {
            const cplx s = phi0 + pl, d = phi0 - pl;
            acc += std::log(theta_bar(ThetaKind::k3, th + s, sig) /
                            theta_bar(ThetaKind::k3, th - s, sig)) +
                   std::log(theta_bar(ThetaKind::k2, th + d, sig) /
                            theta_bar(ThetaKind::k2, th - d, sig));
        }
    }
    if (!std::isfinite(acc.real()) || !std::isfinite(acc.imag()))
        throw pole_error("three_leg: a leg ratio is singular at this spin");
    return acc;
}

namespace {

// damped Newton on drop_2pii(three_leg); returns success
bool newton_polish(cplx& phi, const SaddleProblem& pb, ThreeLegKind kind, double tol) {
    cplx x = phi;
    cplx f;
    try {
        f = drop_2pii(three_leg(x, pb, kind));
    } catch (const numeric_error&) {
        return false;
    }
    for (int it = 0; it < 80 && std::abs(f) > tol; ++it) {
        const double h = 1e-6 * (1.0 + std::abs(x));
        cplx df;
        try {
            df = drop_2pii(three_leg(x + h, pb, kind) - three_leg(x - h, pb, kind)) / (2.0 * h);
        } catch (const numeric_error&) {
            return false;
        }
        if (!(std::abs(df) > 0.0)) return false;
        const cplx step = f / df;
        double lam = 1.0;
        bool moved = false;
        for (int halve = 0; halve < 25; ++halve, lam *= 0.5) {
            const cplx xn = x - lam * step;
            cplx fn;
            try {
                fn = drop_2pii(three_leg(xn, pb, kind));
            } catch (const numeric_error&) {
                continue;
            }
            if (std::abs(fn) < std::abs(f)) {
                x = xn;
                f = fn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    phi = x;
    return std::abs(f) <= tol;
}

double residual_at(cplx phi, const SaddleProblem& pb, ThreeLegKind kind) {
    return std::abs(drop_2pii(three_leg(phi, pb, kind)));
}

cplx zeta_of_phi(cplx phi, const SaddleProblem& pb) {
    const double rN = static_cast<double>(pb.r) * pb.N;
    const cplx om = 1.0 - pb.tau_prime();
    const cplx tau = pb.tau_prime() / (rN * om);
    return phi / (rN * om) - static_cast<double>(pb.r) * PI * tau / 4.0;
}

}  // namespace

std::vector<SaddleSolution> solve_saddle(const SaddleProblem& pb, ThreeLegKind kind) {
    const double tol = 1e-13;
    const cplx centre = (pb.phi1 + pb.phi2 + pb.phi3) / 3.0;

    // lattice-degenerate configuration: every spectator at pi (integer+nu)/2.
    // There the three-leg function vanishes on the whole spin lattice, the
    // root is not isolated, and phi1 is the declared representative.
    bool degenerate = false;
    for (double nu : {0.0, 0.5}) {
        bool all = true;
        for (cplx p : {pb.phi1, pb.phi2, pb.phi3}) {
            const cplx zt = 2.0 * p / PI - nu;
            if (std::abs(zt - std::round(zt.real())) > 1e-12) {
                all = false;
                break;
            }
        }
        if (all) {
            degenerate = true;
            break;
        }
    }

    cplx root;
    if (degenerate) {
        root = pb.phi1;
    } else {
        // seed a damped Newton from a coarse scan of one period of the
        // three-leg function (it is exactly pi-periodic) through the
        // spectator mean, best seeds first
        std::vector<std::pair<double, cplx>> seeds;
        seeds.reserve(64);
        for (int k = 0; k < 64; ++k) {
            const cplx x = centre + (-PI / 2.0 + PI * (k + 0.5) / 64.0);
            try {
                seeds.emplace_back(residual_at(x, pb, kind), x);
            } catch (const numeric_error&) {
            }
        }
        std::sort(seeds.begin(), seeds.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        bool found = false;
        for (const auto& [score, seed] : seeds) {
            cplx x = seed;
            if (newton_polish(x, pb, kind, tol)) {
                root = x;
                found = true;
                break;
            }
        }
        if (!found)
            throw convergence_error("solve_saddle: no root of the three-leg function found "
                                    "in the fundamental cell");
        // pull the root into the cell around the spectator mean
        root -= PI * std::round((root.real() - centre.real()) / PI);
    }

    const int n_branches = (kind == ThreeLegKind::theta) ? pb.N : 1;
    const cplx delta = pb.branch_delta();
    std::vector<SaddleSolution> out;
    out.reserve(n_branches);
    for (int n = 0; n < n_branches; ++n) {
        cplx x = root + static_cast<double>(n) * delta;
        if (!degenerate && n > 0) {
            if (!newton_polish(x, pb, kind, tol) ||
                std::abs(x - (root + static_cast<double>(n) * delta)) > 1e-8)
                throw convergence_error("solve_saddle: branch " + std::to_string(n) +
                                        " drifted off the saddle lattice");
        }
        SaddleSolution sol;
        sol.phi_star = x;
        sol.zeta_star = zeta_of_phi(x, pb);
        sol.branch_n = n;
        sol.residual = residual_at(x, pb, kind);
        out.push_back(sol);
    }
    return out;
}

cplx classical_str_residual(const SaddleSolution& sol, const SaddleProblem& pb,
                            const LogTrackOpts& opts) {
    if (!(sol.residual < 1e-12))
        throw domain_error("classical_str_residual: saddle residual " +
                           std::to_string(sol.residual) + " too large to trust");
    return a_star(sol.phi_star, pb, opts) - a_triangle(pb, opts);
}

// ------------------------------------------------------------- fluctuation

cplx d_ratio(cplx theta, cplx phi_i, cplx phi_j, const SaddleProblem& pb) {
    const ModularParam sig(pb.rtau);
    const cplx den = theta_bar(ThetaKind::k4, phi_i + phi_j + theta, sig) *
                     theta_bar(ThetaKind::k4, phi_i + phi_j - theta, sig) *
                     theta_bar(ThetaKind::k1, phi_i - phi_j + theta, sig) *
                     theta_bar(ThetaKind::k1, phi_i - phi_j - theta, sig);
    if (std::abs(den) == 0.0) throw pole_error("d_ratio: denominator vanishes");
    return theta_bar(ThetaKind::k1, 2.0 * theta, sig) *
           theta_bar(ThetaKind::k4, 2.0 * phi_i, sig) *
           theta_bar(ThetaKind::k4, 2.0 * phi_j, sig) / den;
}

CurvatureCheck second_derivative_check(const SaddleSolution& sol, const SaddleProblem& pb,
                                       const LogTrackOpts& opts) {
    if (!(sol.residual < 1e-12))
        throw domain_error("second_derivative_check: saddle residual too large to trust");
    // h ~ (quadrature tol)^(1/4) balances stencil truncation against the
    // noise floor of the integrals inside a_star
    const double h = std::pow(1e-10, 0.25) * (1.0 + std::abs(sol.phi_star));
    const cplx x = sol.phi_star;
    const cplx f0 = a_star(x, pb, opts);
    const cplx fp = a_star(x + h, pb, opts);
    const cplx fm = a_star(x - h, pb, opts);
    const cplx fp2 = a_star(x + 2.0 * h, pb, opts);
    const cplx fm2 = a_star(x - 2.0 * h, pb, opts);
    CurvatureCheck out;
    out.second_derivative = (-fp2 + 16.0 * fp - 30.0 * f0 + 16.0 * fm - fm2) / (12.0 * h * h);
    out.d_quotient = d_ratio(pb.theta1, sol.phi_star, pb.phi1, pb) *
                     d_ratio(pb.theta3, sol.phi_star, pb.phi3, pb) /
                     d_ratio(pb.theta1 + pb.theta3, pb.phi1, pb.phi3, pb);
    if (std::abs(out.d_quotient) == 0.0)
        throw pole_error("second_derivative_check: fluctuation quotient vanishes");
    out.ratio = out.second_derivative / out.d_quotient;
    return out;
}

// ------------------------------------------------------ hatted-frame action

cplx xhat_star_action(cplx zeta0, const std::array<cplx, 3>& zeta, const SpectralPair& alphas,
                      const ModularParam& tau, int r, int N, const LogTrackOpts& opts) {
    if (r < 1 || N < 1) throw domain_error("xhat_star_action: r and N must be >= 1");
    const cplx that = static_cast<double>(N) * tau.tau + 1.0 / static_cast<double>(r);
    const cplx eta = -IU * PI / 2.0 * (tau.tau + 1.0 / (static_cast<double>(r) * N));
    const ModularParam th(that);
    // each term is the phase-continued integral along the straight path from
    // the origin; past the theta4 zero line this is the analytic continuation
    // of the in-strip branch (a path through an actual zero raises pole_error
    // inside the integrator)
    auto leading = [&](cplx w) {
        return IU / static_cast<double>(N) *
               integrate_log_segment(
                   [&](cplx u) { return theta_bar(ThetaKind::k4, static_cast<double>(N) * u, th); },
                   cplx(0.0), w, opts);
    };
    const std::array<cplx, 3> alpha_hat{eta - alphas.alpha1, alphas.alpha1 + alphas.alpha3,
                                        eta - alphas.alpha3};
    cplx acc = -(leading(2.0 * zeta0 + IU * eta) + leading(-2.0 * zeta0 + IU * eta));
    for (int l = 0; l < 3; ++l) {
        const cplx d = zeta0 - zeta[l];
        const cplx s = zeta0 + zeta[l];
        acc += leading(d + IU * alpha_hat[l]) + leading(s + IU * alpha_hat[l]) -
               leading(d - IU * alpha_hat[l]) - leading(s - IU * alpha_hat[l]);
    }
    return acc;
}

}  // namespace strlens
