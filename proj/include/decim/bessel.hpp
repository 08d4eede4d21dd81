#pragma once

// Bessel functions of the first kind, integer order, complex argument.
// Ascending series for small |z| (or order large against |z|^2/4), Miller
// backward recurrence normalized by the generating-function sum otherwise.

#include <cmath>
#include <complex>
#include <string>

#include "complex_utils.hpp"
#include "errors.hpp"

namespace decim {

inline constexpr int bessel_max_order = 1000;
inline constexpr double bessel_max_abs = 1000.0;

/// J_n(z) represented as exp(log_scale) * mantissa, so that values far below
/// the double range survive when combined with large prefactors.
struct ScaledValue {
    cplx mantissa;
    double log_scale = 0.0;

    cplx value() const { return mantissa == cplx(0.0) ? cplx(0.0) : mantissa * std::exp(log_scale); }
};

namespace detail {

inline void check_bessel_domain(int n, cplx z)
{
    if (n < 0 || n > bessel_max_order)
        throw BesselDomainError("Bessel order " + std::to_string(n) + " outside [0, 1000]");
    if (!is_finite(z) || std::abs(z) > bessel_max_abs)
        throw BesselDomainError("Bessel argument modulus above 1000");
}

/// sum_k (-q)^k / (k! (n+1)_k), i.e. n! J_n(z) / (z/2)^n with q = z^2/4.
inline cplx bessel_reduced_series(int n, cplx q)
{
    cplx term = 1.0, sum = 1.0;
    for (int k = 1; k < 2000; ++k) {
        term *= -q / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

inline bool use_series(int n, cplx z)
{
    const double q = std::norm(z) / 4.0;
    return std::abs(z) <= 4.0 || q <= n + 1.0;
}

/// Miller recurrence. Returns J_n(z) in scaled form; z != 0.
inline ScaledValue bessel_miller(int n, cplx z)
{
    const double az = std::abs(z);
    const int start = std::max(n, static_cast<int>(std::ceil(az))) + 30 +
                      15 * static_cast<int>(std::ceil(std::cbrt(az)));
    const double big = 1e250;
    // Normalize with the growing exponential: exp(-iz) for Im z >= 0, exp(iz) otherwise.
    const cplx unit = z.imag() >= 0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);

    cplx f_next = 0.0, f = 1.0;
    cplx f_n = 0.0;
    int rescales_since_n = 0;
    bool have_n = (start == n);
    if (have_n) f_n = f;
    // Partial sum 2 sum_{k>=1} unit^k f_k, built from the top down.
    cplx sum = 2.0 * ipow(unit, start) * f;
    cplx unit_k = ipow(unit, start);
    const cplx unit_inv = 1.0 / unit;
    for (int k = start; k >= 1; --k) {
        const cplx f_prev = (2.0 * k / z) * f - f_next;
        f_next = f;
        f = f_prev;
        unit_k *= unit_inv;
        if (k - 1 == n) {
            f_n = f;
            have_n = true;
        }
        if (k - 1 >= 1) sum += 2.0 * unit_k * f;
        if (std::abs(f) > big) {
            f /= big;
            f_next /= big;
            sum /= big;
            if (have_n && k - 1 != n) {
                ++rescales_since_n;
            } else if (have_n) {
                f_n /= big;
            }
        }
    }
    sum += f;  // k = 0 term
    // exp(unit z) kept in log form; its modulus overflows for |Im z| > ~709.
    const cplx uz = unit * z;
    ScaledValue out;
    out.mantissa = f_n / sum * std::polar(1.0, uz.imag());
    out.log_scale = uz.real() - rescales_since_n * std::log(big);
    return out;
}

}  // namespace detail

/// J_n(z) in scaled form; domain 0 <= n <= 1000, |z| <= 1000.
inline ScaledValue bessel_j_scaled(int n, cplx z)
{
    detail::check_bessel_domain(n, z);
    if (z == cplx(0.0)) return {n == 0 ? cplx(1.0) : cplx(0.0), 0.0};
    if (detail::use_series(n, z)) {
        const cplx s = detail::bessel_reduced_series(n, z * z / 4.0);
        // (z/2)^n / n!
        const cplx lz = std::log(z / 2.0);
        const cplx lead = static_cast<double>(n) * lz - std::lgamma(n + 1.0);
        return {s * std::exp(cplx(0.0, lead.imag())), lead.real()};
    }
    return detail::bessel_miller(n, z);
}

inline cplx bessel_j_complex(int n, cplx z) { return bessel_j_scaled(n, z).value(); }

/// n! J_n(z) / (z/2)^n: an entire function of z^2, so free of root branches.
inline ScaledValue bessel_j_reduced(int n, cplx z)
{
    detail::check_bessel_domain(n, z);
    if (z == cplx(0.0) || detail::use_series(n, z)) return {detail::bessel_reduced_series(n, z * z / 4.0), 0.0};
    ScaledValue j = detail::bessel_miller(n, z);
    const cplx lz = std::log(z / 2.0);
    const cplx shift = std::lgamma(n + 1.0) - static_cast<double>(n) * lz;
    j.mantissa *= std::exp(cplx(0.0, shift.imag()));
    j.log_scale += shift.real();
    return j;
}

}  // namespace decim
