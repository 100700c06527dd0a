#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "kext/dynsys.hpp"
#include "kext/elliptic.hpp"
#include "kext/periods.hpp"
#include "kext/quadrature.hpp"

// Spectral verification of the extremal metric.  The conformal factor f is
// rebuilt either from the integrated orbit at p = sqrt(3/8) (where
// f = phi1^2 + 4 phi2^2) or from the closed-form metric of revolution
//   g0 = (9 + w^2)/w (du^2 + dv^2/w),  w = 1 + 8 cos^2 v,
// brought to conformal-over-flat shape by y(v) = \int_0^v dt / sqrt(w(t)).
// Fourier mode k then leads to the generalized eigenproblem
//   -psi'' + kappa^2 psi = lambda f psi
// on the parity class, discretized with symmetric second differences.

namespace kext {

enum class Parity { Even, Odd };

enum class MetricProvenance { FromODE, ClosedForm };

struct MetricProfile {
    double period = 0.0;    // period of f in the conformal coordinate
    double x_period = 0.0;  // circumference of the covering torus in x
    MetricProvenance provenance = MetricProvenance::FromODE;
    std::vector<double> samples; // f on a uniform grid over [0, period)
    std::function<double(double)> f_eval;
    std::shared_ptr<const Trajectory> source; // set for FromODE profiles

    /// Fourier wavenumber of mode index k on the covering torus.
    double wavenumber(int k) const
    {
        return static_cast<double>(k) * 2.0 * std::numbers::pi / x_period;
    }
};

inline MetricProfile make_profile(double period, double x_period,
                                  std::function<double(double)> f,
                                  std::size_t grid_size,
                                  MetricProvenance prov)
{
    MetricProfile mp;
    mp.period = period;
    mp.x_period = x_period;
    mp.provenance = prov;
    mp.f_eval = std::move(f);
    mp.samples.resize(grid_size);
    for (std::size_t i = 0; i < grid_size; ++i)
        mp.samples[i] = mp.f_eval(period * static_cast<double>(i) /
                                  static_cast<double>(grid_size));
    return mp;
}

/// Conformal factor f = phi1^2 + 4 phi2^2 of the Condition-(9) orbit,
/// sampled from the integrated trajectory over one (phi1, phi2)-period.
inline MetricProfile build_metric_from_ode(const InitParam& p,
                                           std::size_t grid_size = 4096)
{
    if (!p.is_sqrt38)
        throw std::domain_error(
            "build_metric_from_ode: requires the p = sqrt(3/8) orbit");
    const double a = 2.0 * u_period_y_length_deg(p);
    auto traj = std::make_shared<const Trajectory>(
        integrate(p, a * (1.0 + 1e-12), 1e-12, 1e-14));
    auto f = [traj, a](double y) {
        y = std::fmod(y, a);
        if (y < 0.0)
            y += a;
        const PhaseState s = traj->at(y);
        return s.phi1 * s.phi1 + 4.0 * s.phi2 * s.phi2;
    };
    MetricProfile mp =
        make_profile(a, 2.0 * std::numbers::pi, f, grid_size,
                     MetricProvenance::FromODE);
    mp.source = traj;
    return mp;
}

/// Closed-form profile F(y) = (9 + w^2)/w with w = 1 + 8 cos^2 v(y); the
/// v -> y change of variable is tabulated once and inverted by Newton steps
/// on a cubic Hermite interpolant.
inline MetricProfile build_metric_closed_form(std::size_t grid_size = 4096)
{
    if (grid_size < 16)
        throw std::invalid_argument("build_metric_closed_form: grid too small");

    struct Table {
        std::vector<double> v, y;
        double period;
    };
    auto tab = std::make_shared<Table>();
    const std::size_t n = 8192;
    tab->v.resize(n + 1);
    tab->y.resize(n + 1);
    auto speed = [](double v) {
        const double c = std::cos(v);
        return 1.0 / std::sqrt(1.0 + 8.0 * c * c);
    };
    double acc = 0.0;
    tab->v[0] = 0.0;
    tab->y[0] = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double v0 = std::numbers::pi * static_cast<double>(i - 1) /
                          static_cast<double>(n);
        const double v1 = std::numbers::pi * static_cast<double>(i) /
                          static_cast<double>(n);
        acc += integrate(speed, v0, v1, 1e-13, 1e-16).value;
        tab->v[i] = v1;
        tab->y[i] = acc;
    }
    tab->period = acc;

    auto v_of_y = [tab, speed](double y) {
        y = std::fmod(y, tab->period);
        if (y < 0.0)
            y += tab->period;
        const auto it = std::upper_bound(tab->y.begin(), tab->y.end(), y);
        std::size_t i = static_cast<std::size_t>(
            std::max<std::ptrdiff_t>(0, it - tab->y.begin() - 1));
        i = std::min(i, tab->v.size() - 2);
        double v = tab->v[i] +
                   (tab->v[i + 1] - tab->v[i]) * (y - tab->y[i]) /
                       (tab->y[i + 1] - tab->y[i]);
        for (int it2 = 0; it2 < 4; ++it2) {
            // dy/dv = speed(v); local correction from the table node
            const double yi = tab->y[i] +
                              integrate(speed, tab->v[i], v, 1e-14, 1e-16).value;
            v -= (yi - y) / speed(v);
        }
        return v;
    };

    // The deck transformation that makes the quotient a Klein bottle
    // reflects y about the minimum of F (reached at v = pi/3, a quarter
    // period in y), so that point is the parity origin.  Shift it to y = 0.
    const double y_origin = 0.25 * tab->period;
    auto f = [v_of_y, y_origin](double y) {
        const double c = std::cos(v_of_y(y + y_origin));
        const double w = 1.0 + 8.0 * c * c;
        return (9.0 + w * w) / w;
    };
    return make_profile(tab->period, std::numbers::pi, f, grid_size,
                        MetricProvenance::ClosedForm);
}

struct SturmLiouvilleResult {
    Parity parity;
    double kappa = 0.0;
    std::size_t intervals = 0;
    std::vector<double> nodes;       // y-positions of the unknowns
    std::vector<double> mass;        // diagonal mass entries (f with weights)
    std::vector<double> eigenvalues; // lowest `count`, ascending
    std::vector<std::vector<double>> eigenvectors; // mass-normalized
};

namespace detail {

// eigenvalues of a symmetric tridiagonal matrix by Sturm bisection
inline long sturm_count(const std::vector<double>& d,
                        const std::vector<double>& e, double x)
{
    long cnt = 0;
    double q = 1.0; // kept nonzero by the guard below
    const std::size_t n = d.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double e2 = (i == 0) ? 0.0 : e[i - 1] * e[i - 1];
        q = d[i] - x - e2 / q;
        if (q == 0.0)
            q = -1e-300;
        if (q < 0.0)
            ++cnt;
    }
    return cnt;
}

inline std::vector<double> tridiag_lowest_eigenvalues(
    const std::vector<double>& d, const std::vector<double>& e,
    std::size_t count)
{
    const std::size_t n = d.size();
    double lo = d[0], hi = d[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(e[i - 1]) : 0.0) +
                         (i + 1 < n ? std::abs(e[i]) : 0.0);
        lo = std::min(lo, d[i] - r);
        hi = std::max(hi, d[i] + r);
    }
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t j = 0; j < count && j < n; ++j) {
        double a = lo, b = hi;
        for (int it = 0; it < 120 && b - a > 1e-15 * std::max(1.0, std::abs(b));
             ++it) {
            const double m = 0.5 * (a + b);
            if (sturm_count(d, e, m) >= static_cast<long>(j + 1))
                b = m;
            else
                a = m;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

// one inverse-iteration eigenvector of (tridiag - sigma I), partial pivoting
inline std::vector<double> tridiag_inverse_iteration(
    const std::vector<double>& d, const std::vector<double>& e, double sigma)
{
    const std::size_t n = d.size();
    std::vector<double> x(n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = 1.0 + 1e-3 * static_cast<double>((i * 2654435761u) % 97);

    for (int sweep = 0; sweep < 3; ++sweep) {
        // factor/solve with partial pivoting, three-band storage
        std::vector<double> a(n), b(n, 0.0), c(n, 0.0), rhs = x;
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = d[i] - sigma;
            if (i + 1 < n)
                b[i] = e[i]; // superdiagonal
        }
        std::vector<double> sub(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            sub[i + 1] = e[i];
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(sub[i + 1]) > std::abs(a[i])) {
                std::swap(a[i], sub[i + 1]);
                const double t = b[i];
                b[i] = a[i + 1];
                a[i + 1] = t;
                std::swap(c[i], b[i + 1]);
                std::swap(rhs[i], rhs[i + 1]);
            }
            if (a[i] == 0.0)
                a[i] = 1e-300;
            const double m = sub[i + 1] / a[i];
            a[i + 1] -= m * b[i];
            b[i + 1] -= m * c[i];
            rhs[i + 1] -= m * rhs[i];
        }
        if (a[n - 1] == 0.0)
            a[n - 1] = 1e-300;
        x[n - 1] = rhs[n - 1] / a[n - 1];
        if (n >= 2)
            x[n - 2] = (rhs[n - 2] - b[n - 2] * x[n - 1]) / a[n - 2];
        for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(n) - 3; i >= 0; --i)
            x[i] = (rhs[i] - b[i] * x[i + 1] - c[i] * x[i + 2]) / a[i];
        double norm = 0.0;
        for (double t : x)
            norm = std::max(norm, std::abs(t));
        for (double& t : x)
            t /= norm;
    }
    return x;
}

} // namespace detail

/// Lowest `count` eigenvalues (and eigenvectors) of
///   -psi'' + kappa^2 psi = lambda f psi
/// for the a-periodic parity class of mode k, reduced to [0, a/2] with
/// Neumann (even) or Dirichlet (odd) conditions.
inline SturmLiouvilleResult sturm_liouville_eigs(const MetricProfile& profile,
                                                 int k, Parity parity,
                                                 std::size_t count,
                                                 std::size_t intervals = 2048)
{
    if (count < 1 || intervals < 8)
        throw std::invalid_argument("sturm_liouville_eigs: bad sizes");
    const double L = 0.5 * profile.period;
    const double h = L / static_cast<double>(intervals);
    const double kappa = profile.wavenumber(k);
    const double k2 = kappa * kappa;

    SturmLiouvilleResult res;
    res.parity = parity;
    res.kappa = kappa;
    res.intervals = intervals;

    std::vector<double> diag, off, mass, nodes;
    if (parity == Parity::Even) {
        const std::size_t n = intervals + 1;
        diag.resize(n);
        off.assign(n - 1, -1.0 / (h * h));
        mass.resize(n);
        nodes.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            nodes[j] = h * static_cast<double>(j);
            const double f = profile.f_eval(nodes[j]);
            if (!(f > 0.0))
                throw std::domain_error("sturm_liouville_eigs: f must be > 0");
            const bool endpoint = (j == 0 || j == n - 1);
            diag[j] = (endpoint ? 1.0 : 2.0) / (h * h) +
                      (endpoint ? 0.5 : 1.0) * k2;
            mass[j] = (endpoint ? 0.5 : 1.0) * f;
        }
    } else {
        const std::size_t n = intervals - 1;
        diag.resize(n);
        off.assign(n - 1, -1.0 / (h * h));
        mass.resize(n);
        nodes.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            nodes[j] = h * static_cast<double>(j + 1);
            const double f = profile.f_eval(nodes[j]);
            if (!(f > 0.0))
                throw std::domain_error("sturm_liouville_eigs: f must be > 0");
            diag[j] = 2.0 / (h * h) + k2;
            mass[j] = f;
        }
    }

    // fold the diagonal mass into a standard symmetric tridiagonal problem
    const std::size_t n = diag.size();
    std::vector<double> d(n), e(n ? n - 1 : 0);
    for (std::size_t j = 0; j < n; ++j)
        d[j] = diag[j] / mass[j];
    for (std::size_t j = 0; j + 1 < n; ++j)
        e[j] = off[j] / std::sqrt(mass[j] * mass[j + 1]);

    res.eigenvalues = detail::tridiag_lowest_eigenvalues(d, e, count);
    res.nodes = nodes;
    res.mass = mass;
    for (double lam : res.eigenvalues) {
        const double sigma = lam * (1.0 + 1e-12) + 1e-14;
        std::vector<double> z = detail::tridiag_inverse_iteration(d, e, sigma);
        // undo the similarity transform and mass-normalize
        double norm = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            z[j] /= std::sqrt(mass[j]);
            norm += mass[j] * z[j] * z[j];
        }
        norm = std::sqrt(norm * h);
        double sgn = 0.0;
        for (std::size_t j = 0; j < n && sgn == 0.0; ++j)
            if (std::abs(z[j]) > 1e-8)
                sgn = (z[j] > 0.0) ? 1.0 : -1.0;
        for (double& t : z)
            t *= sgn / norm;
        res.eigenvectors.push_back(std::move(z));
    }
    return res;
}

/// Sign changes of an eigenfunction over one full period [0, a), after
/// unfolding the parity reduction.
inline int nodal_count(const SturmLiouvilleResult& r, std::size_t index)
{
    if (index >= r.eigenvectors.size())
        throw std::out_of_range("nodal_count: no such eigenvector");
    const std::vector<double>& half = r.eigenvectors[index];
    std::vector<double> full;
    if (r.parity == Parity::Even) {
        full.assign(half.begin(), half.end());
        for (std::size_t j = half.size() - 1; j-- > 1;)
            full.push_back(half[j]);
    } else {
        full.push_back(0.0);
        full.insert(full.end(), half.begin(), half.end());
        full.push_back(0.0);
        for (std::size_t j = half.size(); j-- > 0;)
            full.push_back(-half[j]);
    }
    std::size_t j0 = 0;
    while (j0 < full.size() && std::abs(full[j0]) < 1e-9)
        ++j0;
    if (j0 == full.size())
        return 0;
    int changes = 0;
    double prev = full[j0];
    for (std::size_t t = 1; t <= full.size(); ++t) {
        const double val = full[(j0 + t) % full.size()];
        if (std::abs(val) < 1e-9)
            continue;
        if ((val < 0.0) != (prev < 0.0))
            ++changes;
        prev = val;
    }
    return changes;
}

struct ModeEigenvalues {
    int k = 0;
    Parity parity = Parity::Even;
    int weight = 1;
    std::vector<double> coarse;
    std::vector<double> fine;
    std::vector<double> extrapolated;
};

struct SpectralReport {
    double lambda1 = 0.0;
    int multiplicity_at_2 = 0;
    double area = 0.0;
    double product = 0.0;
    double product_over_pi = 0.0;
    double target_12piE = 0.0;
    std::vector<ModeEigenvalues> modes;
};

/// Assembles the spectral certificate: extrapolated lowest eigenvalues of
/// the admissible (k, parity) classes, the first positive eigenvalue, the
/// multiplicity near 2 counting the cos/sin degeneracy, and lambda1 * area.
inline SpectralReport verify_extremal(const MetricProfile& profile,
                                      std::size_t grid = 4096,
                                      double mult_tol = 0.05)
{
    SpectralReport rep;
    rep.target_12piE =
        12.0 * std::numbers::pi * elliptic_E(2.0 * std::sqrt(2.0) / 3.0);

    const struct {
        int k;
        Parity parity;
        int weight;
        std::size_t count;
    } classes[] = {{0, Parity::Even, 1, 3},
                   {1, Parity::Odd, 2, 2},
                   {2, Parity::Even, 2, 2}};

    rep.lambda1 = std::numeric_limits<double>::infinity();
    for (const auto& cl : classes) {
        ModeEigenvalues me;
        me.k = cl.k;
        me.parity = cl.parity;
        me.weight = cl.weight;
        me.coarse =
            sturm_liouville_eigs(profile, cl.k, cl.parity, cl.count, grid / 2)
                .eigenvalues;
        me.fine = sturm_liouville_eigs(profile, cl.k, cl.parity, cl.count, grid)
                      .eigenvalues;
        for (std::size_t i = 0; i < me.fine.size(); ++i) {
            const double c = (i < me.coarse.size()) ? me.coarse[i] : me.fine[i];
            me.extrapolated.push_back(me.fine[i] +
                                      (me.fine[i] - c) / 3.0);
        }
        for (double lam : me.extrapolated) {
            if (lam > 1e-6)
                rep.lambda1 = std::min(rep.lambda1, lam);
            if (std::abs(lam - 2.0) < mult_tol)
                rep.multiplicity_at_2 += cl.weight;
        }
        rep.modes.push_back(std::move(me));
    }

    rep.area = 0.5 * profile.x_period *
               integrate(profile.f_eval, 0.0, profile.period, 1e-11, 1e-13)
                   .value;
    rep.product = rep.lambda1 * rep.area;
    rep.product_over_pi = rep.product / std::numbers::pi;
    return rep;
}

} // namespace kext
