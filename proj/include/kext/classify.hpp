#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kext/dynsys.hpp"
#include "kext/periods.hpp"
#include "kext/rational.hpp"
#include "kext/separation.hpp"

// Orbit classification: periodicity through rationality of R(p) = T_v/T_u,
// zero counts of phi1 per period, positivity of phi2, and the shape taxonomy
// read off the parities of the detected fraction.

namespace kext {

enum class SolutionKind { Decaying, Phi2Vanishes, Periodic, QuasiPeriodic };

enum class OrbitShape {
    None,
    OscillatingAA,      // endpoints A and A'
    OscillatingBB,      // endpoints B and B'
    ClosedThroughAxis,  // closed orbit through (0, sqrt(3/4 - p^2))
    DegenerateHyperbola // p = sqrt(3/8), arc of phi1^2 - 4 phi2^2 + 3/2 = 0
};

inline const char* to_string(SolutionKind k)
{
    switch (k) {
    case SolutionKind::Decaying: return "decaying";
    case SolutionKind::Phi2Vanishes: return "phi2_vanishes";
    case SolutionKind::Periodic: return "periodic";
    case SolutionKind::QuasiPeriodic: return "quasi_periodic";
    }
    return "?";
}

inline const char* to_string(OrbitShape s)
{
    switch (s) {
    case OrbitShape::None: return "none";
    case OrbitShape::OscillatingAA: return "oscillating_AA'";
    case OrbitShape::OscillatingBB: return "oscillating_BB'";
    case OrbitShape::ClosedThroughAxis: return "closed_through_axis";
    case OrbitShape::DegenerateHyperbola: return "degenerate_hyperbola";
    }
    return "?";
}

struct RatioResult {
    double p;
    double value;
    double uncertainty;
    std::optional<Fraction> rational;
};

struct CriticalPoints {
    double ax, ay; // A
    double bx, by; // B  (A', B' are the phi2-axis mirror images)
};

inline CriticalPoints critical_points(const InitParam& p)
{
    const double psq = p.p * p.p;
    if (!(psq < 0.75))
        throw std::domain_error("critical_points: defined for p < sqrt(3)/2");
    const double c = 2.0 * p.p / std::sqrt(3.0);
    const double s = std::sqrt(1.0 - 4.0 * psq / 3.0);
    return CriticalPoints{c, s, s, c};
}

struct ZeroCount {
    long zeros_phi1 = 0;       // per (phi1, phi2)-period (or per window)
    double phi2_min = 0.0;
    double period_y = 0.0;     // length of the window in y
    std::vector<double> zero_locations;
};

namespace detail {

inline double refine_zero(const Trajectory& traj, double lo, double hi)
{
    double flo = traj.at(lo).phi1;
    for (int it = 0; it < 80 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = traj.at(mid).phi1;
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

inline ZeroCount count_zeros_window(const Trajectory& traj, double window,
                                    std::size_t n_samples)
{
    ZeroCount out;
    out.period_y = window;
    const double min_sep = 1e-3 * window;

    double prev_y = 0.0;
    double prev_phi1 = traj.at(0.0).phi1;
    out.phi2_min = traj.at(0.0).phi2;
    std::vector<double> zeros;
    for (std::size_t i = 1; i < n_samples; ++i) {
        const double yy = window * static_cast<double>(i) /
                          static_cast<double>(n_samples - 1);
        const PhaseState s = traj.at(yy);
        out.phi2_min = std::min(out.phi2_min, s.phi2);
        if (prev_phi1 != 0.0 && s.phi1 != 0.0 &&
            (prev_phi1 < 0.0) != (s.phi1 < 0.0)) {
            const double z = refine_zero(traj, prev_y, yy);
            if (zeros.empty() || z - zeros.back() > min_sep)
                zeros.push_back(z);
        }
        prev_y = yy;
        prev_phi1 = s.phi1;
    }
    // phi1(0) = 0 is itself a zero; drop a detected crossing that is the
    // period-end copy of it.
    while (!zeros.empty() && zeros.back() > window - min_sep)
        zeros.pop_back();
    zeros.insert(zeros.begin(), 0.0);
    out.zero_locations = std::move(zeros);
    out.zeros_phi1 = static_cast<long>(out.zero_locations.size());
    return out;
}

} // namespace detail

/// Zeros of phi1 and the minimum of phi2 over one (phi1, phi2)-period.
/// For p > sqrt(3)/2 the window is one v-cycle instead (phi2 must vanish
/// there); `fraction` is required for periodic p other than sqrt(3/8).
inline ZeroCount count_zeros_per_period(const InitParam& p,
                                        std::optional<Fraction> fraction = {},
                                        double rel_tol = 1e-10)
{
    double window = 0.0;
    std::size_t samples_per_cycle = 160;
    long cycles = 1;
    if (p.is_sqrt32)
        throw std::domain_error("count_zeros_per_period: decaying orbit");
    if (p.p > kSqrt32) {
        // one v-cycle: u - v <= 2 bounds its y-length by 2 T_v
        window = 2.0 * period_v(p);
        cycles = 2;
    } else if (p.is_sqrt38) {
        window = 2.0 * u_period_y_length_deg(p);
        cycles = 2;
    } else {
        if (!fraction)
            throw std::invalid_argument(
                "count_zeros_per_period: fraction required for p in P");
        window = 2.0 * uv_period_y_length(p, fraction->num, fraction->den);
        cycles = 2 * fraction->num;
    }
    const std::size_t n = std::max<std::size_t>(
        4000, samples_per_cycle * static_cast<std::size_t>(cycles));
    Trajectory traj = integrate(p, window * (1.0 + 1e-9), rel_tol,
                                rel_tol * 1e-2);
    return detail::count_zeros_window(traj, window, n);
}

/// Classification options: rational detection window and denominator cap.
struct ClassifyOptions {
    double rational_eps = 1e-9;
    std::int64_t denom_cap = 1000;
    double period_rel_tol = 1e-12;
    bool count_zeros = true;
};

struct SolutionClass {
    double p = 0.0;
    SolutionKind kind = SolutionKind::QuasiPeriodic;
    OrbitShape shape = OrbitShape::None;
    std::optional<RatioResult> ratio;
    double period_tau = 0.0; // (u, v) period in tau, q T_u
    double period_y = 0.0;   // (phi1, phi2) period in y
    long zeros_phi1 = 0;
    double phi2_min = 0.0;
    bool phi2_positive = false;

    bool condition9() const { return zeros_phi1 == 2 && phi2_positive; }
};

/// Half-period endpoint of the separated coordinates for R(p) = q/m and the
/// shape it implies.  u returns to alpha0 for even q and sits at 1/2 for odd
/// q; v sits at its start 2p^2 - 3/2 for even m and at the opposite
/// turning point -2p^2 for odd m.
inline OrbitShape shape_from_parity(const InitParam& p, const Fraction& f)
{
    const double psq = p.p * p.p;
    if (!(psq < 0.75))
        throw std::domain_error("shape_from_parity: defined for p < sqrt(3)/2");
    const bool q_odd = (f.num % 2) != 0;
    const bool m_odd = (f.den % 2) != 0;
    if (!q_odd) {
        // irreducible, so m is odd here: closed orbit through the phi2-axis
        return OrbitShape::ClosedThroughAxis;
    }
    const double v_end = m_odd ? -2.0 * psq : 2.0 * psq - 1.5;
    // u_end = 1/2 lies on the unit circle; v_end selects A or B
    return (v_end == -2.0 * psq) ? OrbitShape::OscillatingAA
                                 : OrbitShape::OscillatingBB;
}

/// phi2-axis crossing of a closed (q even) orbit: (0, sqrt(3/4 - p^2)),
/// the intersection of the quadric w3 = 0 with the phi2-axis.
inline double axis_crossing_phi2(const InitParam& p)
{
    return std::sqrt(0.75 - p.p * p.p);
}

inline SolutionClass classify(const InitParam& p,
                              const ClassifyOptions& opt = {})
{
    SolutionClass out;
    out.p = p.p;
    if (p.is_sqrt32) {
        out.kind = SolutionKind::Decaying;
        return out;
    }
    if (p.p > kSqrt32) {
        out.kind = SolutionKind::Phi2Vanishes;
        if (opt.count_zeros) {
            const ZeroCount zc = count_zeros_per_period(p);
            out.phi2_min = zc.phi2_min;
            out.zeros_phi1 = zc.zeros_phi1;
            out.phi2_positive = zc.phi2_min > 0.0;
        }
        return out;
    }

    const PeriodPair pp = periods(p, opt.period_rel_tol);
    RatioResult rr{p.p, pp.ratio(), std::max(pp.ratio_error(), 1e-13), {}};

    if (p.is_sqrt38) {
        out.kind = SolutionKind::Periodic;
        out.shape = OrbitShape::DegenerateHyperbola;
        out.period_tau = pp.t_u;
        out.period_y = 2.0 * u_period_y_length_deg(p);
        out.ratio = rr;
        if (opt.count_zeros) {
            const ZeroCount zc = count_zeros_per_period(p);
            out.zeros_phi1 = zc.zeros_phi1;
            out.phi2_min = zc.phi2_min;
            out.phi2_positive = zc.phi2_min > 0.0;
        }
        return out;
    }

    const double eps = std::max(opt.rational_eps, 10.0 * rr.uncertainty);
    rr.rational = detect_rational(rr.value, eps, opt.denom_cap);
    out.ratio = rr;
    if (!rr.rational) {
        out.kind = SolutionKind::QuasiPeriodic;
        return out;
    }

    const Fraction f = *rr.rational;
    out.kind = SolutionKind::Periodic;
    out.shape = shape_from_parity(p, f);
    out.period_tau = static_cast<double>(f.num) * pp.t_u;
    out.period_y = 2.0 * uv_period_y_length(p, f.num, f.den);
    if (opt.count_zeros) {
        const ZeroCount zc = count_zeros_per_period(p, f);
        out.zeros_phi1 = zc.zeros_phi1;
        out.phi2_min = zc.phi2_min;
        out.phi2_positive = zc.phi2_min > 0.0;
    }
    return out;
}

/// Sampled graph of R over (0, sqrt(3)/2), used to bracket roots of
/// R(p) = target.
struct RatioGrid {
    std::vector<double> p;
    std::vector<double> r;
};

inline RatioGrid build_ratio_grid(std::size_t n = 600, double p_lo = 0.01,
                                  double p_hi = kSqrt32 - 0.004,
                                  double rel_tol = 1e-12)
{
    RatioGrid g;
    g.p.reserve(n);
    g.r.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double pv = p_lo + (p_hi - p_lo) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
        g.p.push_back(pv);
        g.r.push_back(ratio(InitParam(pv), rel_tol));
    }
    return g;
}

/// All p in the open interval with R(p) = q/m, located by bracketing on the
/// grid and bisection to |R - q/m| < 1e-10.
inline std::vector<double> solve_ratio_equation(const Fraction& target,
                                                const RatioGrid& grid)
{
    const double t = target.value();
    std::vector<double> roots;
    if (!(t > 1.0 && t < 2.0))
        return roots;
    for (std::size_t i = 0; i + 1 < grid.p.size(); ++i) {
        const double f0 = grid.r[i] - t;
        const double f1 = grid.r[i + 1] - t;
        if (f0 == 0.0) {
            roots.push_back(grid.p[i]);
            continue;
        }
        if ((f0 < 0.0) == (f1 < 0.0))
            continue;
        double lo = grid.p[i], hi = grid.p[i + 1];
        double flo = f0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = ratio(InitParam(mid)) - t;
            if (std::abs(fm) < 1e-10) {
                lo = hi = mid;
                break;
            }
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push_back(0.5 * (lo + hi));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

inline std::vector<double> solve_ratio_equation(const Fraction& target)
{
    return solve_ratio_equation(target, build_ratio_grid());
}

} // namespace kext
