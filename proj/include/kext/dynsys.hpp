#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "kext/ode.hpp"

// The planar second-order system
//   phi1'' = (1 - 2 phi1^2 - 8 phi2^2) phi1
//   phi2'' = (4 - 2 phi1^2 - 8 phi2^2) phi2
// with initial data phi1(0) = 0, phi2(0) = p, phi1'(0) = 2p, phi2'(0) = 0,
// together with its two conserved quantities.

namespace kext {

inline constexpr double kSqrt38 = 0.61237243569579452454932101867647; // sqrt(3/8)
inline constexpr double kSqrt32 = 0.86602540378443864676372317075294; // sqrt(3)/2
inline constexpr double kClassifyEps = 1e-12;

struct PhaseState {
    double y = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
    double dphi1 = 0.0;
    double dphi2 = 0.0;
};

struct InitParam {
    double p;
    bool is_sqrt38;
    bool is_sqrt32;
    bool high_regime; // p^2 > 3/4

    explicit InitParam(double value) : p(value)
    {
        if (!(p > 0.0 && p <= 1.0))
            throw std::domain_error("InitParam: p must lie in (0, 1]");
        is_sqrt38 = std::abs(p - kSqrt38) < kClassifyEps;
        is_sqrt32 = std::abs(p - kSqrt32) < kClassifyEps;
        high_regime = p * p > 0.75;
    }

    /// Common constant of both first integrals, -4p^2(3-4p^2).
    double k_expected() const { return -4.0 * p * p * (3.0 - 4.0 * p * p); }
};

struct FirstIntegralValues {
    double h1;
    double h2;
    double k_expected;
};

inline StateVec<4> rhs(const StateVec<4>& s)
{
    const double phi1 = s[0], phi2 = s[1], v1 = s[2], v2 = s[3];
    const double twof = 2.0 * phi1 * phi1 + 8.0 * phi2 * phi2;
    return {v1, v2, (1.0 - twof) * phi1, (4.0 - twof) * phi2};
}

inline StateVec<4> rhs(const PhaseState& s)
{
    return rhs(StateVec<4>{s.phi1, s.phi2, s.dphi1, s.dphi2});
}

inline PhaseState initial_state(const InitParam& p)
{
    return PhaseState{0.0, 0.0, p.p, 2.0 * p.p, 0.0};
}

inline FirstIntegralValues first_integrals(const PhaseState& s,
                                           const InitParam& p)
{
    const double phi1 = s.phi1, phi2 = s.phi2, v1 = s.dphi1, v2 = s.dphi2;
    const double f = phi1 * phi1 + 4.0 * phi2 * phi2;
    const double h1 = f * f - phi1 * phi1 - 16.0 * phi2 * phi2 + v1 * v1 +
                      4.0 * v2 * v2;
    const double h2 = 12.0 * phi2 * phi2 * (phi2 * phi2 - 1.0) +
                      3.0 * phi1 * phi1 * phi2 * phi2 +
                      phi2 * phi2 * v1 * v1 -
                      2.0 * phi1 * v1 * phi2 * v2 +
                      (3.0 + phi1 * phi1) * v2 * v2;
    return {h1, h2, p.k_expected()};
}

/// Directional derivatives of both conserved quantities along the vector
/// field, from the closed-form gradients.  Identically zero in exact
/// arithmetic; evaluating them exercises the implemented formulas.
inline std::array<double, 2> first_integral_rates(const StateVec<4>& s)
{
    const double phi1 = s[0], phi2 = s[1], v1 = s[2], v2 = s[3];
    const StateVec<4> d = rhs(s);
    const double a1 = d[2], a2 = d[3];
    const double f = phi1 * phi1 + 4.0 * phi2 * phi2;

    const double dh1 = v1 * (4.0 * phi1 * f - 2.0 * phi1) +
                       v2 * (16.0 * phi2 * f - 32.0 * phi2) +
                       a1 * 2.0 * v1 + a2 * 8.0 * v2;

    const double g_phi1 = 6.0 * phi1 * phi2 * phi2 - 2.0 * v1 * phi2 * v2 +
                          2.0 * phi1 * v2 * v2;
    const double g_phi2 = 48.0 * phi2 * phi2 * phi2 - 24.0 * phi2 +
                          6.0 * phi1 * phi1 * phi2 + 2.0 * phi2 * v1 * v1 -
                          2.0 * phi1 * v1 * v2;
    const double g_v1 = 2.0 * phi2 * phi2 * v1 - 2.0 * phi1 * phi2 * v2;
    const double g_v2 = -2.0 * phi1 * v1 * phi2 +
                        2.0 * (3.0 + phi1 * phi1) * v2;
    const double dh2 = v1 * g_phi1 + v2 * g_phi2 + a1 * g_v1 + a2 * g_v2;
    return {dh1, dh2};
}

/// Integrated orbit with dense output and per-step conservation monitoring.
class Trajectory {
public:
    Trajectory(const InitParam& p, DenseSolution<4> sol, double rel_tol,
               double abs_tol)
        : param_(p), sol_(std::move(sol)), rel_tol_(rel_tol), abs_tol_(abs_tol)
    {
        const double k = param_.k_expected();
        for (const auto& st : sol_.steps) {
            const PhaseState ps = state_from(st.x0, st.r1);
            const FirstIntegralValues fi = first_integrals(ps, param_);
            max_drift_ = std::max({max_drift_, std::abs(fi.h1 - k),
                                   std::abs(fi.h2 - k)});
        }
        const PhaseState last = at(sol_.x_end);
        const FirstIntegralValues fi = first_integrals(last, param_);
        max_drift_ = std::max({max_drift_, std::abs(fi.h1 - k),
                               std::abs(fi.h2 - k)});
    }

    const InitParam& param() const { return param_; }
    double y_begin() const { return sol_.x_begin; }
    double y_end() const { return sol_.x_end; }
    double max_drift() const { return max_drift_; }
    double rel_tol() const { return rel_tol_; }
    std::size_t step_count() const { return sol_.steps.size(); }

    PhaseState at(double y) const { return state_from(y, sol_.eval(y)); }

    /// Phase states at the accepted step nodes plus the final point.
    std::vector<PhaseState> nodes() const
    {
        std::vector<PhaseState> out;
        out.reserve(sol_.steps.size() + 1);
        for (const auto& st : sol_.steps)
            out.push_back(state_from(st.x0, st.r1));
        out.push_back(at(sol_.x_end));
        return out;
    }

    /// Uniform sampling with n points over [y_begin, y_end].
    std::vector<PhaseState> sample_uniform(std::size_t n) const
    {
        std::vector<PhaseState> out;
        out.reserve(n);
        const double a = y_begin(), b = y_end();
        for (std::size_t i = 0; i < n; ++i) {
            const double y = a + (b - a) * static_cast<double>(i) /
                                     static_cast<double>(n - 1);
            out.push_back(at(y));
        }
        return out;
    }

private:
    static PhaseState state_from(double y, const StateVec<4>& v)
    {
        return PhaseState{y, v[0], v[1], v[2], v[3]};
    }

    InitParam param_;
    DenseSolution<4> sol_;
    double rel_tol_;
    double abs_tol_;
    double max_drift_ = 0.0;
};

inline Trajectory integrate(const InitParam& p, double y_end,
                            double rel_tol = 1e-10, double abs_tol = 1e-12)
{
    if (!(rel_tol > 0.0) || !std::isfinite(y_end))
        throw std::invalid_argument("integrate: bad tolerance or endpoint");
    OdeControls ctl;
    ctl.rel_tol = rel_tol;
    ctl.abs_tol = abs_tol;
    const PhaseState s0 = initial_state(p);
    auto f = [](double, const StateVec<4>& s) { return rhs(s); };
    DenseSolution<4> sol = integrate_dense<4>(
        f, StateVec<4>{s0.phi1, s0.phi2, s0.dphi1, s0.dphi2}, 0.0, y_end, ctl);
    return Trajectory(p, std::move(sol), rel_tol, abs_tol);
}

/// sup-norm residual of the sphere-map identity
///   phi0'^2 + phi1'^2 + phi2'^2 = phi1^2 + 4 phi2^2,
/// with phi0 = sqrt(1 - phi1^2 - phi2^2).  Where phi0 is small the identity
/// multiplied through by phi0^2 is used instead of dividing.
inline double isometry_residual(const Trajectory& traj,
                                std::size_t n_samples = 2000)
{
    double worst = 0.0;
    const auto samples = traj.sample_uniform(n_samples);
    for (const PhaseState& s : samples) {
        const double r2 = s.phi1 * s.phi1 + s.phi2 * s.phi2;
        const double phi0_sq = 1.0 - r2;
        if (phi0_sq < -1e-9)
            throw std::domain_error(
                "isometry_residual: state outside the unit disk");
        const double cross = s.phi1 * s.dphi1 + s.phi2 * s.dphi2;
        const double f = s.phi1 * s.phi1 + 4.0 * s.phi2 * s.phi2;
        const double poly =
            cross * cross +
            phi0_sq * (s.dphi1 * s.dphi1 + s.dphi2 * s.dphi2 - f);
        // Dividing by phi0^2 amplifies state error without bound near the
        // unit circle, so the polynomial form is kept below the threshold.
        const double resid = (phi0_sq > 0.1) ? std::abs(poly) / phi0_sq
                                             : std::abs(poly);
        worst = std::max(worst, resid);
    }
    return worst;
}

} // namespace kext
