// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// fail.  Each block states what it measures and the tolerance it enforces.

#include <climits>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kext/kext.hpp"
#include "util.hpp"

using namespace kext;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool ok,
            const std::string& detail)
{
    std::printf("[%s] criterion %2d: %s — %s\n", ok ? "PASS" : "FAIL", idx,
                name.c_str(), detail.c_str());
    if (!ok)
        ++failures;
}

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// 1. Conservation of both first integrals at tol 1e-10 over [0, 50].
void criterion1()
{
    double worst = 0.0;
    for (double p : {0.2, 0.5, kSqrt38, 0.75, 0.9, 1.0}) {
        Trajectory traj = integrate(InitParam(p), 50.0, 1e-10, 1e-12);
        worst = std::max(worst, traj.max_drift());
    }
    report(1, "first-integral conservation", worst < 1e-8,
           fmt("max |H_i + 4p^2(3-4p^2)| = %.3e (< 1e-8)", worst));
}

// 2. Closed-form period anchors at p = sqrt(3/8).
void criterion2()
{
    InitParam p38(kSqrt38);
    const double tu = period_u(p38);
    const double au = 0.8 * elliptic_Pi(0.4, 0.25);
    const double ru = std::abs(tu - au) / au;
    const double tv = period_v(p38);
    const double av = 8.0 * std::numbers::pi / (3.0 * std::sqrt(10.0));
    const double rv = std::abs(tv - av) / av;
    report(2, "period anchors (4/5)Pi(2/5,1/4) and 8pi/(3 sqrt10)",
           ru < 1e-9 && rv < 1e-9,
           fmt("rel err T_u %.2e, T_v %.2e (< 1e-9)", ru, rv));
}

// 3. Ratio enclosure on a 400-point grid plus the p -> 0 endpoint trend.
void criterion3()
{
    double rmin = 10.0, rmax = 0.0;
    bool in_12 = true;
    for (int i = 0; i < 400; ++i) {
        const double p = 0.01 + (0.856 - 0.01) * i / 399.0;
        const double r = ratio(InitParam(p));
        rmin = std::min(rmin, r);
        rmax = std::max(rmax, r);
        in_12 = in_12 && r > 1.0 && r < 2.0;
    }
    const double d3 = std::abs(ratio(InitParam(1e-3)) - 1.5);
    const double d4 = std::abs(ratio(InitParam(1e-4)) - 1.5);
    const bool enclosure = rmin >= 1.480473 && rmax <= 1.507784;
    const bool trend = d3 < 0.03 && d4 < d3;
    report(3, "ratio enclosure [1.480473, 1.507784]",
           enclosure && in_12 && trend,
           fmt("R in [%.9f, %.9f]; |R(1e-3)-3/2| = %.4f, |R(1e-4)-3/2| ="
               " %.4f",
               rmin, rmax, d3, d4));
}

// 4. Logarithmic divergence rates.  Near p = 0 the one-way integrals
// int ds/sqrt(P) ~ -(2/3) ln p and int dr/sqrt(Q) ~ -ln p (each half of the
// corresponding period); near p = sqrt3/2 the full periods carry those
// rates.  Both are enforced at the 15% band with improvement from 1e-3 to
// 1e-4.
void criterion4()
{
    auto band = [](double x) { return x >= 0.85 && x <= 1.15; };
    const double u3 =
        0.5 * period_u(InitParam(1e-3)) / (-(2.0 / 3.0) * std::log(1e-3));
    const double u4 =
        0.5 * period_u(InitParam(1e-4)) / (-(2.0 / 3.0) * std::log(1e-4));
    const double v3 = 0.5 * period_v(InitParam(1e-3)) / (-std::log(1e-3));
    const double v4 = 0.5 * period_v(InitParam(1e-4)) / (-std::log(1e-4));
    const bool near0 = band(u4) && band(v4) &&
                       std::abs(u4 - 1.0) < std::abs(u3 - 1.0) &&
                       std::abs(v4 - 1.0) < std::abs(v3 - 1.0);

    auto su = [](double d) {
        return period_u(InitParam(kSqrt32 - d)) /
               (-(2.0 / 3.0) * std::log(d));
    };
    auto sv = [](double d) {
        return period_v(InitParam(kSqrt32 - d)) / (-std::log(d));
    };
    const double w3 = su(1e-3), w4 = su(1e-4);
    const double x3 = sv(1e-3), x4 = sv(1e-4);
    const bool near32 = band(w4) && band(x4) &&
                        std::abs(w4 - 1.0) < std::abs(w3 - 1.0) &&
                        std::abs(x4 - 1.0) < std::abs(x3 - 1.0);
    report(4, "logarithmic divergence of the periods", near0 && near32,
           fmt("p->0 ratios (%.3f, %.3f)->(%.3f, %.3f); sqrt3/2 ratios"
               " (%.3f, %.3f)->(%.3f, %.3f)",
               u3, v3, u4, v4, w3, x3, w4, x4));
}

// 5. Special orbits.  For p = sqrt3/2 the orbit is homoclinic: the ellipse
// residual is certified while the state is away from the saddle at the
// origin (norm >= 1e-2) and the decay certificate is the first passage of
// the norm below 1e-3, which must happen by y = 60 (it happens near
// y = 8.2; double precision cannot shadow the separatrix past the closest
// approach, local errors grow like e^{2y}).
void criterion5()
{
    bool ok = true;
    std::string detail;
    {
        InitParam ip(kSqrt32);
        Trajectory traj = integrate(ip, 60.0, 1e-12, 1e-14);
        double first_below = -1.0, resid_far = 0.0;
        for (const PhaseState& s : traj.sample_uniform(12000)) {
            const double n = std::hypot(s.phi1, s.phi2);
            if (first_below < 0.0 && n < 1e-3)
                first_below = s.y;
            if (first_below < 0.0 && n >= 1e-2)
                resid_far = std::max(
                    resid_far, std::abs(s.phi1 * s.phi1 + 4.0 * s.phi2 * s.phi2 -
                                        2.0 * std::sqrt(3.0) * s.phi2));
        }
        ok = ok && resid_far < 1e-8 && first_below > 0.0 &&
             first_below <= 60.0;
        detail += fmt("sqrt3/2: ellipse %.2e, norm<1e-3 at y=%.2f; ",
                      resid_far, first_below);
    }
    {
        InitParam ip(1.0);
        Trajectory traj = integrate(ip, 50.0, 1e-11, 1e-13);
        double worst = 0.0;
        for (const PhaseState& s : traj.sample_uniform(8000))
            worst = std::max(worst, std::abs(s.phi1 * s.phi1 +
                                             s.phi2 * s.phi2 - 1.0));
        ok = ok && worst < 1e-8;
        detail += fmt("p=1 circle %.2e; ", worst);
    }
    {
        InitParam ip(kSqrt38);
        Trajectory traj = integrate(ip, 50.0, 1e-11, 1e-13);
        double worst_h = 0.0, worst_v = 0.0;
        for (const PhaseState& s : traj.sample_uniform(8000)) {
            worst_h = std::max(worst_h, std::abs(s.phi1 * s.phi1 -
                                                 4.0 * s.phi2 * s.phi2 + 1.5));
            worst_v = std::max(worst_v, std::abs(to_uv(s).v + 0.75));
        }
        ok = ok && worst_h < 1e-8 && worst_v < 1e-9;
        detail += fmt("sqrt(3/8): hyperbola %.2e, |v+3/4| %.2e", worst_h,
                      worst_v);
    }
    report(5, "special orbits", ok, detail);
}

// 6. phi2 vanishes within one v-cycle for p > sqrt3/2.
void criterion6()
{
    bool ok = true;
    std::string detail;
    for (double p : {0.88, 0.95, 1.0}) {
        InitParam ip(p);
        const double tv = period_v(ip);
        Trajectory traj = integrate(ip, 2.0 * tv + 1.0, 1e-11, 1e-13);
        // first sign change of phi2, refined by bisection
        const std::size_t n = 8000;
        double zero_y = -1.0;
        double prev_y = 0.0, prev = traj.at(0.0).phi2;
        for (std::size_t i = 1; i < n && zero_y < 0.0; ++i) {
            const double y = (2.0 * tv + 1.0) * static_cast<double>(i) /
                             static_cast<double>(n - 1);
            const double cur = traj.at(y).phi2;
            if ((prev > 0.0) != (cur > 0.0)) {
                double lo = prev_y, hi = y;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    ((traj.at(mid).phi2 > 0.0) == (prev > 0.0) ? lo : hi) =
                        mid;
                }
                zero_y = 0.5 * (lo + hi);
            }
            prev_y = y;
            prev = cur;
        }
        double tau_at_zero = 1e300;
        if (zero_y > 0.0) {
            auto inv_gap = [&](double yy) {
                const SeparatedState s = to_uv(traj.at(yy));
                return 1.0 / (s.u - s.v);
            };
            tau_at_zero = integrate(inv_gap, 0.0, zero_y, 1e-11).value;
        }
        const bool this_ok = zero_y > 0.0 && tau_at_zero <= tv * (1.0 + 1e-9);
        ok = ok && this_ok;
        detail += fmt("p=%.2f: zero at y=%.3f, tau=%.3f (T_v=%.3f); ", p,
                      zero_y, tau_at_zero, tv);
    }
    report(6, "phi2 vanishes within one v-period", ok, detail);
}

// 7. Desk-scale uniqueness: all irreducible q/m with m <= 50 inside the
// enclosure, root-solved and zero-counted.
void criterion7()
{
    const RatioGrid grid = build_ratio_grid(600);
    std::vector<Fraction> targets;
    for (std::int64_t m = 2; m <= 50; ++m)
        for (std::int64_t q = static_cast<std::int64_t>(
                 std::ceil(1.480473 * static_cast<double>(m)));
             q <= static_cast<std::int64_t>(
                      std::floor(1.507784 * static_cast<double>(m)));
             ++q)
            if (std::gcd(q, m) == 1)
                targets.push_back(Fraction{q, m});

    std::size_t roots_total = 0, cond9 = 0;
    long min_zeros = LONG_MAX;
    bool all_others_six = true;
    for (const Fraction& f : targets) {
        for (double p : solve_ratio_equation(f, grid)) {
            ++roots_total;
            InitParam ip(p);
            if (std::abs(p - kSqrt38) < 1e-6)
                continue; // handled by the constant-v branch below
            const ZeroCount zc = count_zeros_per_period(ip, f);
            min_zeros = std::min(min_zeros, zc.zeros_phi1);
            if (zc.zeros_phi1 < 6)
                all_others_six = false;
            if (zc.zeros_phi1 == 2 && zc.phi2_min > 0.0)
                ++cond9;
        }
    }

    // the constant-v orbit at p = sqrt(3/8)
    const ZeroCount zc38 = count_zeros_per_period(InitParam(kSqrt38));
    const bool sqrt38_ok = zc38.zeros_phi1 == 2 &&
                           zc38.phi2_min * zc38.phi2_min >= 0.375 - 1e-9;
    if (sqrt38_ok)
        ++cond9;

    report(7, "uniqueness of the Condition-(9) solution (m <= 50)",
           all_others_six && sqrt38_ok && cond9 == 1,
           fmt("%zu fractions, %zu roots, min zeros elsewhere = %ld,"
               " condition-(9) count = %zu",
               targets.size(), roots_total, min_zeros, cond9));
}

// 8. Spectral certificate at N = 4096.
void criterion8()
{
    InitParam p38(kSqrt38);
    const MetricProfile mp = build_metric_from_ode(p38, 4096);
    const SpectralReport rep = verify_extremal(mp, 4096);
    const MetricProfile cf = build_metric_closed_form(4096);
    const SpectralReport rep_cf = verify_extremal(cf, 4096);

    const auto k0 = sturm_liouville_eigs(mp, 0, Parity::Even, 2, 4096);
    const auto k1 = sturm_liouville_eigs(mp, 1, Parity::Odd, 1, 4096);
    const auto k2 = sturm_liouville_eigs(mp, 2, Parity::Even, 1, 4096);
    const bool nodal_ok = nodal_count(k2, 0) == 0 && nodal_count(k1, 0) == 2 &&
                          nodal_count(k0, 1) == 2;

    const double lam_err = std::abs(rep.lambda1 - 2.0);
    const double prod_err =
        std::abs(rep.product - rep.target_12piE) / rep.target_12piE;
    const double cross_err =
        std::abs(rep.product - rep_cf.product) / rep.product;
    const bool ok = lam_err < 1e-4 && rep.multiplicity_at_2 == 5 &&
                    nodal_ok && prod_err < 1e-3 && cross_err < 1e-4;
    report(8, "spectral certificate lambda1 = 2, lambda1 A = 12 pi E", ok,
           fmt("|lambda1-2| = %.2e, mult = %d, nodal %s, product rel err ="
               " %.2e, pipelines differ by %.2e",
               lam_err, rep.multiplicity_at_2, nodal_ok ? "ok" : "BAD",
               prod_err, cross_err));
}

// 9. Separation fidelity on 10 seeded random p.
void criterion9()
{
    std::mt19937 rng(20240831);
    std::uniform_real_distribution<double> dp(0.08, 0.84);
    bool ok = true;
    double worst_resid = 0.0, worst_range = 0.0;
    int done = 0;
    while (done < 10) {
        const double p = dp(rng);
        if (std::abs(p - kSqrt38) < 0.02)
            continue; // degenerate I2, range check needs a finite interval
        InitParam ip(p);
        Trajectory traj = integrate(ip, 60.0, 1e-11, 1e-13);
        const SeparatedTrajectory st = reparameterize(traj, 6000);
        const QuinticPolynomial P = quintic(ip);
        worst_resid = std::max(worst_resid, separation_residual(st, P));

        const OscillationIntervals iv = intervals(ip);
        const auto [ru, rv] = testutil::observed_uv_range(traj, 6000);
        const double range_err =
            std::max({std::abs(ru.min - iv.alpha0), std::abs(ru.max - 0.5),
                      std::abs(rv.min - iv.a0), std::abs(rv.max - iv.a1)});
        worst_range = std::max(worst_range, range_err);
        ++done;
    }
    ok = worst_resid < 1e-8 && worst_range < 1e-6;
    report(9, "separation fidelity on random p", ok,
           fmt("max |udot^2 - P(u)| = %.2e (< 1e-8), range mismatch = %.2e"
               " (< 1e-6)",
               worst_resid, worst_range));
}

// 10. Oracle equivalence of the two T_v routes.
void criterion10()
{
    std::mt19937 rng(5150);
    std::uniform_real_distribution<double> dp(0.05, 0.85);
    double worst = 0.0;
    int done = 0;
    while (done < 10) {
        const double p = dp(rng);
        if (std::abs(p - kSqrt38) < 0.02)
            continue; // direct route has colliding endpoints there
        InitParam ip(p);
        const double a = period_v(ip);
        const double b = period_v_direct_result(ip).value;
        worst = std::max(worst, std::abs(a - b) / a);
        ++done;
    }
    report(10, "T_v via Q-integral vs direct P-integral", worst < 1e-9,
           fmt("max rel difference = %.2e (< 1e-9)", worst));
}

} // namespace

int main()
{
    std::printf("acceptance suite\n");
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    std::printf("%s (%d failed)\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures);
    return failures == 0 ? 0 : 1;
}
