#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

// Complete elliptic integrals of the second and third kind through Carlson's
// duplication algorithms.  Arguments follow the modulus convention:
//   E(k)    = \int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt
//   Pi(n,m) = \int_0^{pi/2} dt / ((1 - n sin^2 t) sqrt(1 - m sin^2 t))

namespace kext {

namespace detail {

inline double carlson_rf(double x, double y, double z)
{
    constexpr double errtol = 0.0025;
    double xt = x, yt = y, zt = z;
    double ave, dx, dy, dz;
    do {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        ave = (xt + yt + zt) / 3.0;
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
    } while (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) > errtol);
    const double e2 = dx * dy - dz * dz;
    const double e3 = dx * dy * dz;
    return (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) /
           std::sqrt(ave);
}

inline double carlson_rc(double x, double y)
{
    constexpr double errtol = 0.0012;
    double xt = x, yt = y;
    double ave, s;
    do {
        const double lam = 2.0 * std::sqrt(xt) * std::sqrt(yt) + yt;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        ave = (xt + yt + yt) / 3.0;
        s = (yt - ave) / ave;
    } while (std::abs(s) > errtol);
    return (1.0 +
            s * s * (0.3 + s * (1.0 / 7.0 + s * (0.375 + s * 9.0 / 22.0)))) /
           std::sqrt(ave);
}

inline double carlson_rd(double x, double y, double z)
{
    constexpr double errtol = 0.0015;
    constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 6.0, c3 = 9.0 / 22.0,
                     c4 = 3.0 / 26.0, c5 = 0.25 * c3, c6 = 1.5 * c4;
    double xt = x, yt = y, zt = z;
    double sum = 0.0, fac = 1.0;
    double ave, dx, dy, dz;
    do {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (zt + lam));
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        ave = 0.2 * (xt + yt + 3.0 * zt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
    } while (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) > errtol);
    const double ea = dx * dy;
    const double eb = dz * dz;
    const double ec = ea - eb;
    const double ed = ea - 6.0 * eb;
    const double ee = ed + ec + ec;
    return 3.0 * sum +
           fac *
               (1.0 + ed * (-c1 + c5 * ed - c6 * dz * ee) +
                dz * (c2 * ee + dz * (-c3 * ec + dz * c4 * ea))) /
               (ave * std::sqrt(ave));
}

inline double carlson_rj(double x, double y, double z, double p)
{
    constexpr double errtol = 0.0015;
    constexpr double c1 = 3.0 / 14.0, c2 = 1.0 / 3.0, c3 = 3.0 / 22.0,
                     c4 = 3.0 / 26.0, c5 = 0.75 * c3, c6 = 1.5 * c4,
                     c7 = 0.5 * c2, c8 = c3 + c3;
    if (p <= 0.0)
        throw std::domain_error("carlson_rj: p must be positive");
    double xt = x, yt = y, zt = z, pt = p;
    double sum = 0.0, fac = 1.0;
    double ave, dx, dy, dz, dp;
    do {
        const double sx = std::sqrt(xt), sy = std::sqrt(yt), sz = std::sqrt(zt);
        const double lam = sx * (sy + sz) + sy * sz;
        const double alpha = pt * (sx + sy + sz) + sx * sy * sz;
        const double beta = pt * (pt + lam) * (pt + lam);
        sum += fac * carlson_rc(alpha * alpha, beta);
        fac *= 0.25;
        xt = 0.25 * (xt + lam);
        yt = 0.25 * (yt + lam);
        zt = 0.25 * (zt + lam);
        pt = 0.25 * (pt + lam);
        ave = 0.2 * (xt + yt + zt + 2.0 * pt);
        dx = (ave - xt) / ave;
        dy = (ave - yt) / ave;
        dz = (ave - zt) / ave;
        dp = (ave - pt) / ave;
    } while (std::max({std::abs(dx), std::abs(dy), std::abs(dz),
                       std::abs(dp)}) > errtol);
    const double ea = dx * (dy + dz) + dy * dz;
    const double eb = dx * dy * dz;
    const double ec = dp * dp;
    const double ed = ea - 3.0 * ec;
    const double ee = eb + 2.0 * dp * (ea - ec);
    return 3.0 * sum +
           fac *
               (1.0 + ed * (-c1 + c5 * ed - c6 * ee) +
                eb * (c7 + dp * (-c8 + dp * c4)) + dp * ea * (c2 - dp * c3) -
                c2 * dp * ec) /
               (ave * std::sqrt(ave));
}

} // namespace detail

/// Complete elliptic integral of the second kind, modulus k in [0, 1).
inline double elliptic_E(double k)
{
    if (!(k >= 0.0 && k < 1.0))
        throw std::domain_error("elliptic_E: modulus must lie in [0,1)");
    if (k == 0.0)
        return 0.5 * std::numbers::pi;
    const double m = k * k;
    return detail::carlson_rf(0.0, 1.0 - m, 1.0) -
           (m / 3.0) * detail::carlson_rd(0.0, 1.0 - m, 1.0);
}

/// Complete elliptic integral of the first kind, modulus k in [0, 1).
inline double elliptic_K(double k)
{
    if (!(k >= 0.0 && k < 1.0))
        throw std::domain_error("elliptic_K: modulus must lie in [0,1)");
    const double m = k * k;
    return detail::carlson_rf(0.0, 1.0 - m, 1.0);
}

/// Complete elliptic integral of the third kind with characteristic n < 1
/// and parameter m in [0, 1).
inline double elliptic_Pi(double n, double m)
{
    if (!(n < 1.0))
        throw std::domain_error("elliptic_Pi: characteristic must be < 1");
    if (!(m >= 0.0 && m < 1.0))
        throw std::domain_error("elliptic_Pi: parameter must lie in [0,1)");
    double value = detail::carlson_rf(0.0, 1.0 - m, 1.0);
    if (n != 0.0)
        value += (n / 3.0) * detail::carlson_rj(0.0, 1.0 - m, 1.0, 1.0 - n);
    return value;
}

} // namespace kext
