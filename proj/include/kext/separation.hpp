#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kext/dynsys.hpp"
#include "kext/quadrature.hpp"

// Hamiltonian variables q = (phi1/sqrt2, sqrt2 phi2), the parabolic
// separation q1^2 = -(2/3) u v, q2^2 = (1/6)(3+2u)(3+2v), the quintic
//   P(s) = s (1-2s) (3+2s) (2p^2+s) (3-4p^2+2s),
// oscillation intervals, and the time rescaling d tau / dy = 1/(u-v).

namespace kext {

inline constexpr double kSqrt2 = 1.4142135623730950488016887242097;

struct QState {
    double q1 = 0.0;
    double q2 = 0.0;
    double dq1 = 0.0;
    double dq2 = 0.0;
};

struct SeparatedState {
    double u = 0.0;
    double v = 0.0;
    double du = 0.0;  // du/dtau
    double dv = 0.0;  // dv/dtau
    double tau = 0.0;
};

inline QState to_q(const PhaseState& s)
{
    return QState{s.phi1 / kSqrt2, kSqrt2 * s.phi2, s.dphi1 / kSqrt2,
                  kSqrt2 * s.dphi2};
}

inline PhaseState from_q(const QState& q, double y = 0.0)
{
    return PhaseState{y, kSqrt2 * q.q1, q.q2 / kSqrt2, kSqrt2 * q.dq1,
                      q.dq2 / kSqrt2};
}

/// Gradient form of the q-dynamics: (q1'', q2'') = -grad V.
inline std::array<double, 2> q_accel(const QState& q)
{
    const double r2 = q.q1 * q.q1 + q.q2 * q.q2;
    return {(1.0 - 4.0 * r2) * q.q1, 4.0 * (1.0 - r2) * q.q2};
}

inline double hamiltonian(const QState& q)
{
    const double r2 = q.q1 * q.q1 + q.q2 * q.q2;
    const double V = r2 * r2 - 0.5 * q.q1 * q.q1 - 2.0 * q.q2 * q.q2;
    return 0.5 * (q.dq1 * q.dq1 + q.dq2 * q.dq2) + V;
}

// u and v are the two roots of  s^2 - (q1^2+q2^2-3/2) s - (3/2) q1^2 = 0,
// with u = larger root >= 0 >= v >= -3/2.
inline SeparatedState to_uv(const QState& q)
{
    const double b = q.q1 * q.q1 + q.q2 * q.q2 - 1.5;
    const double disc = b * b + 6.0 * q.q1 * q.q1;
    const double root = std::sqrt(disc);
    SeparatedState s;
    s.u = 0.5 * (b + root);
    s.v = 0.5 * (b - root);
    if (s.u == s.v)
        throw std::domain_error("to_uv: singular point u == v");
    // tau-derivatives come out polynomial in the phase variables
    s.du = q.q1 * q.dq1 * (3.0 + 2.0 * s.u) + 2.0 * q.q2 * q.dq2 * s.u;
    s.dv = -(q.q1 * q.dq1 * (3.0 + 2.0 * s.v) + 2.0 * q.q2 * q.dq2 * s.v);
    return s;
}

inline SeparatedState to_uv(const PhaseState& s) { return to_uv(to_q(s)); }

inline QState from_uv(const SeparatedState& s, int sign_q1, int sign_q2)
{
    if (!(s.u >= 0.0 && s.v <= 0.0 && s.v >= -1.5))
        throw std::domain_error("from_uv: (u, v) outside the patch");
    if (s.u == s.v)
        throw std::domain_error("from_uv: singular point u == v");
    const double q1sq = -(2.0 / 3.0) * s.u * s.v;
    const double q2sq = (1.0 / 6.0) * (3.0 + 2.0 * s.u) * (3.0 + 2.0 * s.v);
    QState q;
    q.q1 = (sign_q1 >= 0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, q1sq));
    q.q2 = (sign_q2 >= 0 ? 1.0 : -1.0) * std::sqrt(std::max(0.0, q2sq));
    const double umv = s.u - s.v;
    const double uy = s.du / umv; // du/dy
    const double vy = s.dv / umv;
    if (q.q1 != 0.0)
        q.dq1 = -(uy * s.v + s.u * vy) / (3.0 * q.q1);
    else if (s.du != 0.0 || s.dv != 0.0)
        throw std::domain_error("from_uv: derivative reconstruction at q1 = 0");
    if (q.q2 != 0.0)
        q.dq2 = (uy * (3.0 + 2.0 * s.v) + vy * (3.0 + 2.0 * s.u)) /
                (6.0 * q.q2);
    else if (s.du != 0.0 || s.dv != 0.0)
        throw std::domain_error("from_uv: derivative reconstruction at q2 = 0");
    return q;
}

struct QuinticPolynomial {
    double p;
    std::array<double, 5> roots;  // sorted ascending
    std::array<double, 6> coeff;  // coeff[k] multiplies s^k

    double eval_factored(double s) const
    {
        const double psq = p * p;
        return s * (1.0 - 2.0 * s) * (3.0 + 2.0 * s) * (2.0 * psq + s) *
               (3.0 - 4.0 * psq + 2.0 * s);
    }

    double eval_expanded(double s) const
    {
        double acc = coeff[5];
        for (int k = 4; k >= 0; --k)
            acc = acc * s + coeff[k];
        return acc;
    }

    double derivative(double s) const
    {
        double acc = 5.0 * coeff[5];
        for (int k = 4; k >= 1; --k)
            acc = acc * s + static_cast<double>(k) * coeff[k];
        return acc;
    }
};

inline QuinticPolynomial quintic(const InitParam& p)
{
    QuinticPolynomial out;
    out.p = p.p;
    const double psq = p.p * p.p;
    out.roots = {0.0, 0.5, -1.5, -2.0 * psq, 2.0 * psq - 1.5};
    std::sort(out.roots.begin(), out.roots.end());

    // multiply out the linear factors (c0 + c1 s)
    const double factors[5][2] = {{0.0, 1.0},
                                  {1.0, -2.0},
                                  {3.0, 2.0},
                                  {2.0 * psq, 1.0},
                                  {3.0 - 4.0 * psq, 2.0}};
    std::array<double, 6> c{};
    c[0] = 1.0;
    int deg = 0;
    for (const auto& f : factors) {
        std::array<double, 6> next{};
        for (int k = 0; k <= deg; ++k) {
            next[k] += c[k] * f[0];
            next[k + 1] += c[k] * f[1];
        }
        c = next;
        ++deg;
    }
    out.coeff = c;
    return out;
}

struct OscillationIntervals {
    double alpha0;      // left endpoint of I1 = [alpha0, 1/2]
    double a0, a1;      // I2 = [a0, a1]

    bool i1_degenerate() const { return alpha0 >= 0.5 - 1e-15; }
    bool i2_degenerate() const { return a1 - a0 < 1e-15; }
};

inline OscillationIntervals intervals(const InitParam& p)
{
    if (p.is_sqrt32)
        throw std::domain_error(
            "intervals: degenerate case p = sqrt(3)/2 (orbit decays)");
    const double psq = p.p * p.p;
    OscillationIntervals iv{};
    if (psq < 0.75) {
        iv.alpha0 = 0.0;
        if (psq <= 0.375) {
            iv.a0 = 2.0 * psq - 1.5;
            iv.a1 = -2.0 * psq;
        } else {
            iv.a0 = -2.0 * psq;
            iv.a1 = 2.0 * psq - 1.5;
        }
    } else {
        iv.alpha0 = 2.0 * psq - 1.5;
        iv.a0 = -1.5;
        iv.a1 = 0.0;
    }
    return iv;
}

/// Starting point (u(0), v(0)); both components are roots of P.
inline std::array<double, 2> separated_initial_point(const InitParam& p)
{
    const double psq = p.p * p.p;
    if (psq < 0.75)
        return {0.0, 2.0 * psq - 1.5};
    return {2.0 * psq - 1.5, 0.0};
}

/// y-accelerations (u''(0), v''(0)) of the separated coordinates.
inline std::array<double, 2> accelerations_at_zero(const InitParam& p)
{
    const double psq = p.p * p.p;
    if (std::abs(psq - 0.75) < kClassifyEps)
        throw std::domain_error(
            "accelerations_at_zero: singular at p^2 = 3/4");
    const double denom = 3.0 - 4.0 * psq;
    const double first = 12.0 * psq / denom;
    const double second =
        16.0 * psq * (1.0 - psq) * (3.0 - 8.0 * psq) / denom;
    if (psq < 0.75)
        return {first, second};
    return {second, first};
}

struct QuadricValues {
    double w1, w2, w3, w4, delta;
};

inline QuadricValues quadrics(double phi1, double phi2, const InitParam& p)
{
    const double psq = p.p * p.p;
    const double a = phi1 * phi1, b = phi2 * phi2;
    QuadricValues q;
    q.w1 = a + b - 1.0;
    q.w2 = psq * a - (3.0 - 4.0 * psq) * b + psq * (3.0 - 4.0 * psq);
    q.w3 = -(3.0 - 4.0 * psq) * a + 16.0 * psq * b -
           4.0 * psq * (3.0 - 4.0 * psq);
    const double f = a + 4.0 * b;
    q.w4 = f * f - 12.0 * b;
    q.delta = -64.0 * a * b * q.w1 * q.w2 * q.w3;
    return q;
}

/// Orbit in separated coordinates, parameterized both by y and by tau.
struct SeparatedTrajectory {
    std::vector<double> y;
    std::vector<SeparatedState> states;

    double tau_end() const { return states.back().tau; }
};

/// Rescales an integrated orbit to the separated picture.  tau is obtained
/// by quadrature of 1/(u - v) on the dense output; the derivative entries
/// come from the closed-form pushforward, not finite differences.
inline SeparatedTrajectory reparameterize(const Trajectory& traj,
                                          std::size_t n_samples = 4000)
{
    if (n_samples < 2)
        throw std::invalid_argument("reparameterize: need at least 2 samples");
    SeparatedTrajectory out;
    out.y.reserve(n_samples);
    out.states.reserve(n_samples);

    auto inv_gap = [&](double yy) {
        const SeparatedState s = to_uv(traj.at(yy));
        const double gap = s.u - s.v;
        if (gap < 1e-9)
            throw std::domain_error("reparameterize: u - v collapsed");
        return 1.0 / gap;
    };

    const double a = traj.y_begin(), b = traj.y_end();
    double tau = 0.0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double yy = a + (b - a) * static_cast<double>(i) /
                                  static_cast<double>(n_samples - 1);
        if (i > 0) {
            const double prev = a + (b - a) * static_cast<double>(i - 1) /
                                        static_cast<double>(n_samples - 1);
            tau += integrate(inv_gap, prev, yy, 1e-12, 1e-15).value;
        }
        SeparatedState s = to_uv(traj.at(yy));
        s.tau = tau;
        out.y.push_back(yy);
        out.states.push_back(s);
    }
    return out;
}

/// Inverts the monotone tau(y) map: the bracketing sample pair comes from
/// the tabulated trajectory and the remainder is refined by bisection on the
/// quadrature increment.  Needed because uniform-y samples can be far apart
/// in tau where u - v is small.
inline double y_at_tau(const Trajectory& traj, const SeparatedTrajectory& st,
                       double tau_target)
{
    if (st.states.empty() || tau_target < 0.0 ||
        tau_target > st.states.back().tau)
        throw std::out_of_range("y_at_tau: tau outside the tabulated range");
    std::size_t lo = 0, hi = st.states.size() - 1;
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (st.states[mid].tau <= tau_target)
            lo = mid;
        else
            hi = mid;
    }
    auto inv_gap = [&](double yy) {
        const SeparatedState s = to_uv(traj.at(yy));
        return 1.0 / (s.u - s.v);
    };
    double y_lo = st.y[lo], y_hi = st.y[hi];
    double tau_lo = st.states[lo].tau;
    for (int it = 0; it < 80 && y_hi - y_lo > 1e-13; ++it) {
        const double y_mid = 0.5 * (y_lo + y_hi);
        const double tau_mid =
            tau_lo + integrate(inv_gap, y_lo, y_mid, 1e-12, 1e-15).value;
        if (tau_mid <= tau_target) {
            y_lo = y_mid;
            tau_lo = tau_mid;
        } else {
            y_hi = y_mid;
        }
    }
    return 0.5 * (y_lo + y_hi);
}

/// Largest violation of (du/dtau)^2 = P(u) and (dv/dtau)^2 = P(v) along a
/// separated trajectory.
inline double separation_residual(const SeparatedTrajectory& st,
                                  const QuinticPolynomial& poly)
{
    double worst = 0.0;
    for (const SeparatedState& s : st.states) {
        worst = std::max(worst,
                         std::abs(s.du * s.du - poly.eval_factored(s.u)));
        worst = std::max(worst,
                         std::abs(s.dv * s.dv - poly.eval_factored(s.v)));
    }
    return worst;
}

} // namespace kext
