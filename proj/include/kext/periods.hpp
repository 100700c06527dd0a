#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kext/dynsys.hpp"
#include "kext/quadrature.hpp"
#include "kext/separation.hpp"

// Complete hyperelliptic periods of the separated coordinates,
//   T_u(p) = 2 \int_{I1} ds / sqrt(P(s)),   T_v(p) = 2 \int_{I2} ds / sqrt(P(s)),
// evaluated after factoring out the endpoint roots, so the quadrature only
// ever sees smooth positive integrands.  T_v additionally has the form
// 2 \int_0^{1/2} dr / sqrt(Q(r)) under s = (3-8p^2) r - 3/2 + 2p^2, which
// stays regular where the two inner roots of P collide (p = sqrt(3/8)).

namespace kext {

struct PeriodPair {
    double p;
    double t_u;
    double t_v;
    double err_u;
    double err_v;

    double ratio() const { return t_v / t_u; }
    double ratio_error() const
    {
        return ratio() * (err_u / t_u + err_v / t_v);
    }
};

struct TransformedQuintic {
    double p;

    // Q(r) = 2 r (1-2r) A(r) B(r) C(r)
    double factor_a(double r) const
    {
        return 2.0 * p * p + (3.0 - 8.0 * p * p) * r;
    }
    double factor_b(double r) const
    {
        return 2.0 - 2.0 * p * p - (3.0 - 8.0 * p * p) * r;
    }
    double factor_c(double r) const
    {
        return 3.0 - 4.0 * p * p - 2.0 * (3.0 - 8.0 * p * p) * r;
    }
    double eval(double r) const
    {
        return 2.0 * r * (1.0 - 2.0 * r) * factor_a(r) * factor_b(r) *
               factor_c(r);
    }
    /// Q(r) / (r (1/2 - r)), smooth and positive on [0, 1/2] for p < sqrt3/2.
    double smooth_factor(double r) const
    {
        return 4.0 * factor_a(r) * factor_b(r) * factor_c(r);
    }
    /// Image of r under the substitution back into s.
    double s_of_r(double r) const
    {
        return (3.0 - 8.0 * p * p) * r - 1.5 + 2.0 * p * p;
    }
};

inline TransformedQuintic transformed_quintic(const InitParam& p)
{
    return TransformedQuintic{p.p};
}

namespace detail {

// P(s) with the two endpoint roots of the given oscillation interval taken
// out:  P(s) = (s - a)(b - s) * h(s)  with h smooth positive inside.

inline double smooth_u_low(double s, double psq) // I1 = [0, 1/2], p^2 < 3/4
{
    return 2.0 * (3.0 + 2.0 * s) * (2.0 * psq + s) *
           (3.0 - 4.0 * psq + 2.0 * s);
}

inline double smooth_u_high(double s, double psq) // I1 = [2p^2-3/2, 1/2]
{
    return 4.0 * s * (3.0 + 2.0 * s) * (2.0 * psq + s);
}

inline double smooth_v_mid(double s, double /*psq*/) // I2 between inner roots
{
    return -2.0 * s * (1.0 - 2.0 * s) * (3.0 + 2.0 * s);
}

inline double smooth_v_high(double s, double psq) // I2 = [-3/2, 0]
{
    return -2.0 * (1.0 - 2.0 * s) * (2.0 * psq + s) *
           (3.0 - 4.0 * psq + 2.0 * s);
}

} // namespace detail

/// Period of u: 2 \int_{alpha0}^{1/2} ds / sqrt(P(s)).
inline QuadResult period_u_result(const InitParam& p, double rel_tol = 1e-12)
{
    if (p.is_sqrt32)
        throw std::domain_error("period_u: diverges at p = sqrt(3)/2");
    const double psq = p.p * p.p;
    const OscillationIntervals iv = intervals(p);
    QuadResult r;
    if (psq < 0.75) {
        r = sqrt_endpoint_integral(
            [psq](double s) {
                return 1.0 / std::sqrt(detail::smooth_u_low(s, psq));
            },
            iv.alpha0, 0.5, rel_tol);
    } else {
        r = sqrt_endpoint_integral(
            [psq](double s) {
                return 1.0 / std::sqrt(detail::smooth_u_high(s, psq));
            },
            iv.alpha0, 0.5, rel_tol);
    }
    r.value *= 2.0;
    r.error *= 2.0;
    return r;
}

inline double period_u(const InitParam& p) { return period_u_result(p).value; }

/// Period of v through the regular Q-form (p < sqrt3/2) or the direct
/// P-integral over [-3/2, 0] (p > sqrt3/2).
inline QuadResult period_v_result(const InitParam& p, double rel_tol = 1e-12)
{
    if (p.is_sqrt32)
        throw std::domain_error("period_v: diverges at p = sqrt(3)/2");
    const double psq = p.p * p.p;
    QuadResult r;
    if (psq < 0.75) {
        const TransformedQuintic tq{p.p};
        r = sqrt_endpoint_integral(
            [&tq](double rr) { return 1.0 / std::sqrt(tq.smooth_factor(rr)); },
            0.0, 0.5, rel_tol);
    } else {
        r = sqrt_endpoint_integral(
            [psq](double s) {
                return 1.0 / std::sqrt(detail::smooth_v_high(s, psq));
            },
            -1.5, 0.0, rel_tol);
    }
    r.value *= 2.0;
    r.error *= 2.0;
    return r;
}

inline double period_v(const InitParam& p) { return period_v_result(p).value; }

/// Independent route for T_v: the defining integral over I2 = [a0, a1] in
/// the s variable.  Ill-conditioned near p = sqrt(3/8) where a0 and a1
/// collide; serves as the cross-check of the Q-form.
inline QuadResult period_v_direct_result(const InitParam& p,
                                         double rel_tol = 1e-12)
{
    if (p.is_sqrt32)
        throw std::domain_error("period_v_direct: diverges at p = sqrt(3)/2");
    const double psq = p.p * p.p;
    const OscillationIntervals iv = intervals(p);
    QuadResult r;
    if (psq < 0.75) {
        r = sqrt_endpoint_integral(
            [psq](double s) {
                return 1.0 / std::sqrt(detail::smooth_v_mid(s, psq));
            },
            iv.a0, iv.a1, rel_tol);
    } else {
        r = sqrt_endpoint_integral(
            [psq](double s) {
                return 1.0 / std::sqrt(detail::smooth_v_high(s, psq));
            },
            iv.a0, iv.a1, rel_tol);
    }
    r.value *= 2.0;
    r.error *= 2.0;
    return r;
}

inline PeriodPair periods(const InitParam& p, double rel_tol = 1e-12)
{
    const QuadResult u = period_u_result(p, rel_tol);
    const QuadResult v = period_v_result(p, rel_tol);
    return PeriodPair{p.p, u.value, v.value, u.error, v.error};
}

/// R(p) = T_v(p) / T_u(p).
inline double ratio(const InitParam& p, double rel_tol = 1e-12)
{
    return periods(p, rel_tol).ratio();
}

// First moments 2 \int s ds / sqrt(P(s)) over each oscillation interval.
// Together with the periods they convert tau-periods into y-lengths:
// integrating dy = (u - v) dtau over q u-cycles and m v-cycles gives
//   y-length = q * moment_u - m * moment_v.

inline double moment_u(const InitParam& p, double rel_tol = 1e-12)
{
    const double psq = p.p * p.p;
    const OscillationIntervals iv = intervals(p);
    auto g = [psq](double s) {
        const double h = (psq < 0.75) ? detail::smooth_u_low(s, psq)
                                      : detail::smooth_u_high(s, psq);
        return s / std::sqrt(h);
    };
    return 2.0 * sqrt_endpoint_integral(g, iv.alpha0, 0.5, rel_tol).value;
}

inline double moment_v(const InitParam& p, double rel_tol = 1e-12)
{
    const double psq = p.p * p.p;
    if (psq < 0.75) {
        const TransformedQuintic tq{p.p};
        auto g = [&tq](double r) {
            return tq.s_of_r(r) / std::sqrt(tq.smooth_factor(r));
        };
        return 2.0 * sqrt_endpoint_integral(g, 0.0, 0.5, rel_tol).value;
    }
    auto g = [psq](double s) {
        return s / std::sqrt(detail::smooth_v_high(s, psq));
    };
    return 2.0 * sqrt_endpoint_integral(g, -1.5, 0.0, rel_tol).value;
}

/// y-length of q u-cycles interleaved with m v-cycles (the (u, v) period
/// when R(p) = q/m).  The (phi1, phi2) period is twice this.
inline double uv_period_y_length(const InitParam& p, long q, long m)
{
    return static_cast<double>(q) * moment_u(p) -
           static_cast<double>(m) * moment_v(p);
}

/// y-length of a single u-cycle when v is frozen at -3/4 (p = sqrt(3/8)).
inline double u_period_y_length_deg(const InitParam& p)
{
    return moment_u(p) + 0.75 * period_u(p);
}

} // namespace kext
