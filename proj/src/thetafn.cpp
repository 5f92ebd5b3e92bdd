#include "strlens/thetafn.hpp"

#include <vector>

namespace strlens {
namespace {

// One cache slot per thread.  The workloads here hammer a handful of moduli
// in long inner loops, so "remember the last tau" already removes nearly all
// of the repeated exponentiation; a map would just add lookup cost.
struct NomeCache {
    cplx tau{0.0, -1.0};       // sentinel: never a valid modulus
    cplx q;                    // e^{i pi tau}
    std::vector<cplx> q_even;  // q^{2n},   n = 1, 2, ...
    std::vector<cplx> q_odd;   // q^{2n-1}, n = 1, 2, ...
    cplx g;
    bool g_ready = false;
};

thread_local NomeCache tl_cache;

NomeCache& cache_for(cplx tau) {
    NomeCache& c = tl_cache;
    if (c.tau != tau) {
        c.tau = tau;
        c.q = std::exp(IU * PI * tau);
        c.q_even.clear();
        c.q_odd.clear();
        c.g_ready = false;
    }
    return c;
}

void grow(NomeCache& c, std::size_t n) {
    const cplx q2 = c.q * c.q;
    while (c.q_even.size() < n) {
        c.q_even.push_back(c.q_even.empty() ? q2 : c.q_even.back() * q2);
        c.q_odd.push_back(c.q_odd.empty() ? c.q : c.q_odd.back() * q2);
    }
}

// Truncation: |q|^{2n} = e^{-2 pi Im(tau) n} below 1e-18 plus margin, and an
// extra allowance when Im x inflates |e^{+-2ix}|.
int n_terms(double im_tau, double im_x) {
    int n = int(std::ceil(std::log(1e-18) / (-2.0 * PI * im_tau))) + 4;
    if (im_x != 0.0) n += int(std::ceil(std::abs(im_x) / (PI * im_tau)));
    return n;
}

}  // namespace

cplx theta_bar(ThetaKind kind, cplx x, const ModularParam& mt) {
    NomeCache& c = cache_for(mt.tau);
    const int k = static_cast<int>(kind);
    const int n = n_terms(mt.tau.imag(), x.imag());
    grow(c, n);

    const cplx e2p = std::exp(2.0 * IU * x);
    const cplx e2m = 1.0 / e2p;
    const double sgn = (k == 2 || k == 3) ? +1.0 : -1.0;
    const std::vector<cplx>& pw = (k <= 2) ? c.q_even : c.q_odd;

    cplx out = 1.0;
    for (int i = 0; i < n; ++i) {
        const cplx t = pw[i];
        out *= (1.0 + sgn * t * e2p) * (1.0 + sgn * t * e2m);
    }
    if (k == 1)
        out *= 2.0 * std::exp(IU * PI * mt.tau / 4.0) * std::sin(x);
    else if (k == 2)
        out *= 2.0 * std::exp(IU * PI * mt.tau / 4.0) * std::cos(x);
    return out;
}

cplx g_product(const ModularParam& mt) {
    NomeCache& c = cache_for(mt.tau);
    if (!c.g_ready) {
        const int n = n_terms(mt.tau.imag(), 0.0);
        grow(c, n);
        cplx g = 1.0;
        for (int i = 0; i < n; ++i) g *= (1.0 - c.q_even[i]);  // e^{2 pi i tau n} = q^{2n}
        c.g = g;
        c.g_ready = true;
    }
    return c.g;
}

cplx jacobi_theta(ThetaKind kind, cplx x, const ModularParam& mt) {
    return g_product(mt) * theta_bar(kind, x, mt);
}

cplx transformed_tau(ModularTransform tr, cplx tau, int N) {
    switch (tr) {
        case ModularTransform::T: return tau + 1.0;
        case ModularTransform::S: return -1.0 / tau;
        case ModularTransform::STS: return tau / (1.0 - tau);
        case ModularTransform::STS_scaled: return tau / (double(N) * (1.0 - tau));
    }
    throw domain_error("transformed_tau: unknown transform");
}

cplx theta_via_modular(ModularTransform tr, ThetaKind kind, cplx z,
                       const ModularParam& mt, int N) {
    const cplx tau = mt.tau;
    const int k = static_cast<int>(kind);
    switch (tr) {
        case ModularTransform::T: {
            if (k == 1 || k == 2)
                return std::exp(IU * PI / 4.0) * jacobi_theta(kind, z, mt);
            // kinds 3 and 4 swap with no phase
            return jacobi_theta(k == 3 ? ThetaKind::k4 : ThetaKind::k3, z, mt);
        }
        case ModularTransform::S: {
            // sqrt(tau/i) stays in the right half plane for Im tau > 0, so the
            // principal square root is the correct branch throughout
            const cplx c = std::sqrt(tau / IU) * std::exp(IU * tau * z * z / PI);
            switch (k) {
                case 1: return -IU * c * jacobi_theta(ThetaKind::k1, z * tau, mt);
                case 2: return c * jacobi_theta(ThetaKind::k4, z * tau, mt);
                case 3: return c * jacobi_theta(ThetaKind::k3, z * tau, mt);
                default: return c * jacobi_theta(ThetaKind::k2, z * tau, mt);
            }
        }
        case ModularTransform::STS: {
            const cplx d = std::sqrt(1.0 - tau) * std::exp(IU * z * z * (tau - 1.0) / PI);
            const cplx zz = z * (tau - 1.0);
            switch (k) {
                case 1: return -std::exp(IU * PI / 4.0) * d * jacobi_theta(ThetaKind::k1, zz, mt);
                case 2: return d * jacobi_theta(ThetaKind::k3, zz, mt);
                case 3: return d * jacobi_theta(ThetaKind::k2, zz, mt);
                default: return std::exp(IU * PI / 4.0) * d * jacobi_theta(ThetaKind::k4, zz, mt);
            }
        }
        case ModularTransform::STS_scaled: {
            if (kind != ThetaKind::k4)
                throw domain_error("theta_via_modular: the N-scaled variant exists for kind 4 only");
            if (N < 1) throw domain_error("theta_via_modular: N must be >= 1");
            const cplx d = std::exp(IU * PI * double(N) / 4.0) * std::sqrt(1.0 - tau) *
                           std::exp(IU * double(N) * z * z * (tau - 1.0) / PI);
            return d * jacobi_theta(ThetaKind::k4, z * (tau - 1.0),
                                    ModularParam(tau / double(N)));
        }
    }
    throw domain_error("theta_via_modular: unknown transform");
}

}  // namespace strlens
