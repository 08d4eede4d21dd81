#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace decim {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

/// Integer power by repeated squaring; exact for 0^0 = 1 and 0^n = 0.
inline cplx ipow(cplx base, long long n)
{
    if (n < 0) return 1.0 / ipow(base, -n);
    cplx result{1.0, 0.0};
    while (n > 0) {
        if (n & 1) result *= base;
        base *= base;
        n >>= 1;
    }
    return result;
}

/// Relative distance |a-b| / max(|a|,|b|, floor).
inline double rel_diff(cplx a, cplx b, double floor = 0.0)
{
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Continue a sequence of phases (principal values) so consecutive entries differ by less than pi.
inline std::vector<double> unwrap_phase(const std::vector<double>& principal)
{
    std::vector<double> out(principal);
    double offset = 0.0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        const double jump = principal[k] - principal[k - 1];
        if (jump > std::numbers::pi) offset -= 2.0 * std::numbers::pi;
        else if (jump < -std::numbers::pi) offset += 2.0 * std::numbers::pi;
        out[k] = principal[k] + offset;
    }
    return out;
}

}  // namespace decim
