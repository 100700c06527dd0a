#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Embedded Dormand-Prince 5(4) integrator with a 4th-order continuous
// extension.  The propagated solution is the 5th-order one; the dense
// polynomial is stored per accepted step so trajectories can be sampled
// anywhere afterwards.

namespace kext {

struct IntegrationError : std::runtime_error {
    double where;
    explicit IntegrationError(const std::string& msg, double y)
        : std::runtime_error(msg + " at y = " + std::to_string(y)), where(y)
    {
    }
};

template <std::size_t N>
using StateVec = std::array<double, N>;

template <std::size_t N>
struct DenseStep {
    double x0 = 0.0;
    double h = 0.0;
    // contd5 coefficients: u(t) = r1 + t(r2 + (1-t)(r3 + t(r4 + (1-t) r5)))
    StateVec<N> r1{}, r2{}, r3{}, r4{}, r5{};

    StateVec<N> eval(double x) const
    {
        const double t = (x - x0) / h;
        const double s = 1.0 - t;
        StateVec<N> out;
        for (std::size_t i = 0; i < N; ++i)
            out[i] = r1[i] + t * (r2[i] + s * (r3[i] + t * (r4[i] + s * r5[i])));
        return out;
    }
};

template <std::size_t N>
class DenseSolution {
public:
    double x_begin = 0.0;
    double x_end = 0.0;
    std::vector<DenseStep<N>> steps;

    bool forward() const { return x_end >= x_begin; }

    StateVec<N> eval(double x) const
    {
        if (steps.empty())
            throw std::logic_error("DenseSolution: empty");
        const double lo = std::min(x_begin, x_end);
        const double hi = std::max(x_begin, x_end);
        if (x < lo - 1e-9 * (1.0 + hi - lo) || x > hi + 1e-9 * (1.0 + hi - lo))
            throw std::out_of_range("DenseSolution: x outside integration range");
        x = std::clamp(x, lo, hi);
        // binary search over step start points
        std::size_t a = 0, b = steps.size() - 1;
        if (forward()) {
            while (a < b) {
                const std::size_t m = (a + b + 1) / 2;
                if (steps[m].x0 <= x)
                    a = m;
                else
                    b = m - 1;
            }
        } else {
            while (a < b) {
                const std::size_t m = (a + b + 1) / 2;
                if (steps[m].x0 >= x)
                    a = m;
                else
                    b = m - 1;
            }
        }
        return steps[a].eval(x);
    }
};

struct OdeControls {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;       // 0 -> automatic
    std::size_t max_steps = 20'000'000;
};

namespace detail {

// Dormand-Prince coefficients
inline constexpr double dp_c2 = 1.0 / 5.0, dp_c3 = 3.0 / 10.0,
                        dp_c4 = 4.0 / 5.0, dp_c5 = 8.0 / 9.0;
inline constexpr double dp_a21 = 1.0 / 5.0;
inline constexpr double dp_a31 = 3.0 / 40.0, dp_a32 = 9.0 / 40.0;
inline constexpr double dp_a41 = 44.0 / 45.0, dp_a42 = -56.0 / 15.0,
                        dp_a43 = 32.0 / 9.0;
inline constexpr double dp_a51 = 19372.0 / 6561.0, dp_a52 = -25360.0 / 2187.0,
                        dp_a53 = 64448.0 / 6561.0, dp_a54 = -212.0 / 729.0;
inline constexpr double dp_a61 = 9017.0 / 3168.0, dp_a62 = -355.0 / 33.0,
                        dp_a63 = 46732.0 / 5247.0, dp_a64 = 49.0 / 176.0,
                        dp_a65 = -5103.0 / 18656.0;
inline constexpr double dp_a71 = 35.0 / 384.0, dp_a73 = 500.0 / 1113.0,
                        dp_a74 = 125.0 / 192.0, dp_a75 = -2187.0 / 6784.0,
                        dp_a76 = 11.0 / 84.0;
inline constexpr double dp_e1 = 71.0 / 57600.0, dp_e3 = -71.0 / 16695.0,
                        dp_e4 = 71.0 / 1920.0, dp_e5 = -17253.0 / 339200.0,
                        dp_e6 = 22.0 / 525.0, dp_e7 = -1.0 / 40.0;
// dense-output weights
inline constexpr double dp_d1 = -12715105075.0 / 11282082432.0;
inline constexpr double dp_d3 = 87487479700.0 / 32700410799.0;
inline constexpr double dp_d4 = -10690763975.0 / 1880347072.0;
inline constexpr double dp_d5 = 701980252875.0 / 199316789632.0;
inline constexpr double dp_d6 = -1453857185.0 / 822651844.0;
inline constexpr double dp_d7 = 69997945.0 / 29380423.0;

} // namespace detail

template <std::size_t N, class RHS>
DenseSolution<N> integrate_dense(RHS&& rhs, StateVec<N> y, double x0,
                                 double x1, const OdeControls& ctl = {})
{
    using namespace detail;
    DenseSolution<N> sol;
    sol.x_begin = x0;
    sol.x_end = x1;
    if (x0 == x1) {
        DenseStep<N> st;
        st.x0 = x0;
        st.h = 1.0;
        st.r1 = y;
        sol.steps.push_back(st);
        return sol;
    }
    const double dir = (x1 > x0) ? 1.0 : -1.0;
    double x = x0;
    StateVec<N> k1 = rhs(x, y);

    double h = ctl.initial_step;
    if (h == 0.0) {
        double sc = ctl.abs_tol;
        for (std::size_t i = 0; i < N; ++i)
            sc = std::max(sc, std::abs(y[i]) * ctl.rel_tol);
        double d = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            d = std::max(d, std::abs(k1[i]));
        h = (d > 0.0) ? 0.01 / d : 1e-4;
        h = std::min(h, std::abs(x1 - x0));
    }
    h = std::abs(h) * dir;

    StateVec<N> k2, k3, k4, k5, k6, k7, ynew;
    std::size_t nsteps = 0;
    while (dir * (x1 - x) > 0.0) {
        if (++nsteps > ctl.max_steps)
            throw IntegrationError("integrate_dense: step budget exhausted", x);
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x)))
            throw IntegrationError("integrate_dense: step size underflow", x);
        if (dir * (x + h - x1) > 0.0)
            h = x1 - x;

        StateVec<N> yt;
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * dp_a21 * k1[i];
        k2 = rhs(x + dp_c2 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (dp_a31 * k1[i] + dp_a32 * k2[i]);
        k3 = rhs(x + dp_c3 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (dp_a41 * k1[i] + dp_a42 * k2[i] + dp_a43 * k3[i]);
        k4 = rhs(x + dp_c4 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (dp_a51 * k1[i] + dp_a52 * k2[i] +
                                dp_a53 * k3[i] + dp_a54 * k4[i]);
        k5 = rhs(x + dp_c5 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (dp_a61 * k1[i] + dp_a62 * k2[i] +
                                dp_a63 * k3[i] + dp_a64 * k4[i] + dp_a65 * k5[i]);
        k6 = rhs(x + h, yt);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (dp_a71 * k1[i] + dp_a73 * k3[i] +
                                  dp_a74 * k4[i] + dp_a75 * k5[i] + dp_a76 * k6[i]);
        k7 = rhs(x + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (dp_e1 * k1[i] + dp_e3 * k3[i] + dp_e4 * k4[i] +
                                  dp_e5 * k5[i] + dp_e6 * k6[i] + dp_e7 * k7[i]);
            const double sc = ctl.abs_tol +
                              ctl.rel_tol * std::max(std::abs(y[i]),
                                                     std::abs(ynew[i]));
            err += (e / sc) * (e / sc);
        }
        err = std::sqrt(err / static_cast<double>(N));

        if (err <= 1.0) {
            DenseStep<N> st;
            st.x0 = x;
            st.h = h;
            for (std::size_t i = 0; i < N; ++i) {
                const double ydiff = ynew[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                st.r1[i] = y[i];
                st.r2[i] = ydiff;
                st.r3[i] = bspl;
                st.r4[i] = ydiff - h * k7[i] - bspl;
                st.r5[i] = h * (dp_d1 * k1[i] + dp_d3 * k3[i] + dp_d4 * k4[i] +
                                dp_d5 * k5[i] + dp_d6 * k6[i] + dp_d7 * k7[i]);
            }
            sol.steps.push_back(st);
            x += h;
            y = ynew;
            k1 = k7; // FSAL
        }

        double fac = 0.9 * std::pow(std::max(err, 1e-32), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        h *= fac;
    }
    sol.x_end = x;
    return sol;
}

} // namespace kext
