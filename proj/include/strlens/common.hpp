#pragma once
// Shared scalar types, constants and the error taxonomy.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace strlens {

using cplx = std::complex<double>;

inline constexpr double PI = 3.141592653589793238462643383279502884;
inline constexpr cplx IU{0.0, 1.0};

// Every numeric failure derives from numeric_error so callers can catch the
// whole family at once; the concrete type says what went wrong.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// invalid inputs: wrong half-plane, spin out of range, bad configuration
struct domain_error : numeric_error { using numeric_error::numeric_error; };
// a series/product/iteration ran out of budget or its terms stopped decaying
struct convergence_error : numeric_error { using numeric_error::numeric_error; };
// evaluation landed on (or too close to) a pole or a zero that is divided by
struct pole_error : numeric_error { using numeric_error::numeric_error; };
// a principal branch cut was hit where branch consistency is required
struct branch_error : numeric_error { using numeric_error::numeric_error; };
// adaptive integration exhausted its refinement budget
struct quadrature_error : numeric_error { using numeric_error::numeric_error; };

namespace detail {
inline thread_local bool frac_pow_left_halfplane = false;
}

// v^e with the principal logarithm.  The fractional powers in the discrete
// weights and the saddle products are only branch-consistent while every base
// stays in the right half plane: a base on the negative real cut is a hard
// error, and a base that merely drifts into the left half plane raises a
// thread-local flag so a caller can inspect it after a long product.
inline cplx frac_pow(cplx v, double e) {
    if (v.real() == 0.0 && v.imag() == 0.0)
        throw pole_error("frac_pow: zero base");
    if (v.real() <= 0.0 && std::abs(v.imag()) < 1e-9 * -v.real())
        throw branch_error("frac_pow: base on the negative real axis");
    if (v.real() < 0.0)
        detail::frac_pow_left_halfplane = true;
    return std::exp(e * std::log(v));
}

inline void reset_branch_flag() { detail::frac_pow_left_halfplane = false; }
inline bool branch_flag_raised() { return detail::frac_pow_left_halfplane; }

// drop the nearest integer multiple of 2*pi*i (log-branch bookkeeping)
inline cplx drop_2pii(cplx w) {
    double n = std::round(w.imag() / (2.0 * PI));
    return {w.real(), w.imag() - 2.0 * PI * n};
}

}  // namespace strlens
