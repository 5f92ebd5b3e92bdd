#include "strlens/ellgamma.hpp"

#include <array>
#include <vector>

namespace strlens {
namespace {

constexpr double EPS_POLE = 1e-12;
constexpr double LOG_CUT = 41.45;  // -log(1e-18)

// The STR integrands evaluate thousands of gammas at the same one or two
// (P, Q) base pairs, so the odd powers are memoised per pair.  Four slots
// with round-robin eviction cover every access pattern in this code base.
struct PowTable {
    cplx P{2.0, 0.0}, Q{2.0, 0.0};  // sentinel: outside the unit disc
    std::vector<cplx> podd, qodd;   // P^{2j+1}, Q^{2k+1}
};

thread_local std::array<PowTable, 4> tl_pows;
thread_local std::size_t tl_evict = 0;

void extend(std::vector<cplx>& v, cplx base, std::size_t n) {
    const cplx b2 = base * base;
    while (v.size() < n) v.push_back(v.empty() ? base : v.back() * b2);
}

PowTable& table_for(cplx P, cplx Q, std::size_t nj, std::size_t nk) {
    PowTable* t = nullptr;
    for (PowTable& s : tl_pows)
        if (s.P == P && s.Q == Q) t = &s;
    if (!t) {
        t = &tl_pows[tl_evict++ % tl_pows.size()];
        t->P = P;
        t->Q = Q;
        t->podd.clear();
        t->qodd.clear();
    }
    extend(t->podd, P, nj);
    extend(t->qodd, Q, nk);
    return *t;
}

}  // namespace

cplx elliptic_gamma(cplx z, cplx P, cplx Q) {
    const double ap = std::abs(P), aq = std::abs(Q);
    if (!(ap < 1.0) || !(aq < 1.0))
        throw domain_error("elliptic_gamma: nome bases must lie inside the unit disc");

    // row (j, k) contributes factors of size |P|^{2j+1} |Q|^{2k+1} e^{2|Im z|};
    // truncate once that drops below 1e-18
    const double lp = -std::log(ap), lq = -std::log(aq);
    const double budget = LOG_CUT + 2.0 * std::abs(z.imag());
    // keep indices with (2n+1) l <= budget - spent
    const auto count = [budget](double l, double spent) {
        const double room = (budget - spent) / l;
        return room <= 1.0 ? std::size_t(0) : std::size_t((room - 1.0) / 2.0) + 1;
    };
    const std::size_t nj = count(lp, 0.0), nk0 = count(lq, 0.0);
    if (double(nj) * double(nk0) > 5e5)
        throw convergence_error("elliptic_gamma: nome bases too close to the unit circle (" +
                                std::to_string(nj) + " x " + std::to_string(nk0) + " factors)");

    const PowTable& pt = table_for(P, Q, nj, nk0);
    const cplx ep = std::exp(2.0 * IU * z);
    const cplx em = 1.0 / ep;

    cplx out = 1.0;
    for (std::size_t j = 0; j < nj; ++j) {
        const std::size_t nk = count(lq, (2.0 * j + 1.0) * lp);
        if (nk == 0) break;
        const cplx pj = pt.podd[j];
        for (std::size_t k = 0; k < nk; ++k) {
            const cplx t = pj * pt.qodd[k];
            const cplx den = 1.0 - em * t;
            if (std::abs(den) < EPS_POLE)
                throw pole_error("elliptic_gamma: argument within " + std::to_string(EPS_POLE) +
                                 " of a pole");
            out *= (1.0 - ep * t) / den;
        }
    }
    return out;
}

cplx lens_gamma(cplx z, int m, const LensParam& lp) {
    const int r = lp.r;
    m = ((m % r) + r) % r;
    const cplx p = std::exp(IU * PI * lp.tau1);
    const cplx q = std::exp(IU * PI * lp.tau2);
    const cplx pr = std::exp(IU * PI * double(r) * lp.tau1);
    const cplx qr = std::exp(IU * PI * double(r) * lp.tau2);
    const cplx pref = std::exp(IU * double(m * (r - m)) / (6.0 * r) *
                               (6.0 * z + PI * double(r - 2 * m) * (lp.tau1 - lp.tau2 - 1.0)));
    const cplx sh = (0.5 * r - m) * PI;
    return pref * elliptic_gamma(z + sh * lp.tau1, p * q, pr) *
           elliptic_gamma(z - sh * lp.tau2, p * q, qr);
}

cplx kappa(cplx alpha, const LensParam& lp) {
    const auto pw = [](cplx tau, double e) { return std::exp(IU * PI * tau * e); };
    const cplx t12 = lp.tau1 + lp.tau2;
    const double r = lp.r;
    cplx s = 0.0;
    for (int n = 1; n <= 4000; ++n) {
        double mx = 0.0;
        for (int sgn : {1, -1}) {
            const double nn = sgn * n;
            const cplx num = std::exp(4.0 * alpha * nn) * (pw(t12, r * nn) - pw(t12, -r * nn));
            const cplx den = nn * (pw(t12, 2.0 * nn) - pw(t12, -2.0 * nn)) *
                             (pw(lp.tau1, r * nn) - pw(lp.tau1, -r * nn)) *
                             (pw(lp.tau2, r * nn) - pw(lp.tau2, -r * nn));
            const cplx t = num / den;
            s += t;
            mx = std::max(mx, std::abs(t));
        }
        if (mx < 1e-18) return std::exp(s);
        if (!(mx < 1e30))
            throw convergence_error("kappa: terms grow; alpha outside the convergence strip");
    }
    throw convergence_error("kappa: bilateral sum did not settle in 4000 terms");
}

}  // namespace strlens
