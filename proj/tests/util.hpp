#pragma once

// Shared helpers for the test binaries: trajectory extremum refinement and
// observed coordinate ranges.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "kext/dynsys.hpp"
#include "kext/separation.hpp"

namespace kext::testutil {

// ternary search for an extremum of g on [lo, hi]
inline double refine_extremum(const std::function<double(double)>& g,
                              double lo, double hi, bool maximize)
{
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        const bool keep_left = maximize ? (g(m1) > g(m2)) : (g(m1) < g(m2));
        if (keep_left)
            hi = m2;
        else
            lo = m1;
    }
    return 0.5 * (lo + hi);
}

struct Range {
    double min = 1e300;
    double max = -1e300;
};

// observed min/max of u and v along a trajectory, with the coarse-grid
// extrema refined so turning points are not missed between samples
inline std::pair<Range, Range> observed_uv_range(const Trajectory& traj,
                                                 std::size_t n = 4000)
{
    auto u_of = [&](double y) { return to_uv(traj.at(y)).u; };
    auto v_of = [&](double y) { return to_uv(traj.at(y)).v; };
    const double a = traj.y_begin(), b = traj.y_end();
    std::vector<double> ys(n), us(n), vs(n);
    for (std::size_t i = 0; i < n; ++i) {
        ys[i] = a + (b - a) * static_cast<double>(i) /
                        static_cast<double>(n - 1);
        us[i] = u_of(ys[i]);
        vs[i] = v_of(ys[i]);
    }
    Range ru, rv;
    auto sweep = [&](const std::vector<double>& vals,
                     const std::function<double(double)>& g, Range& r) {
        for (std::size_t i = 0; i < n; ++i) {
            r.min = std::min(r.min, vals[i]);
            r.max = std::max(r.max, vals[i]);
            if (i > 0 && i + 1 < n) {
                const bool loc_max =
                    vals[i] >= vals[i - 1] && vals[i] >= vals[i + 1];
                const bool loc_min =
                    vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1];
                if (loc_max || loc_min) {
                    const double y =
                        refine_extremum(g, ys[i - 1], ys[i + 1], loc_max);
                    const double val = g(y);
                    r.min = std::min(r.min, val);
                    r.max = std::max(r.max, val);
                }
            }
        }
    };
    sweep(us, u_of, ru);
    sweep(vs, v_of, rv);
    return {ru, rv};
}

} // namespace kext::testutil
