#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>

// Adaptive Gauss-Kronrod quadrature plus a sin^2 substitution for integrals
// with inverse-square-root endpoint singularities.

namespace kext {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;   // absolute error estimate
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
inline constexpr double gk15_x[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double gk15_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline QuadResult gk15(const F& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * gk15_x[i]);
        fv[14 - i] = f(c + h * gk15_x[i]);
    }
    fv[7] = f(c);

    double kron = gk15_wk[7] * fv[7];
    double gauss = gk15_wg[3] * fv[7];
    for (int i = 0; i < 7; ++i) {
        kron += gk15_wk[i] * (fv[i] + fv[14 - i]);
        if (i % 2 == 1)
            gauss += gk15_wg[i / 2] * (fv[i] + fv[14 - i]);
    }
    QuadResult r;
    r.value = kron * h;
    // raw 7-vs-15 difference, sharpened as in QUADPACK for smooth panels
    r.error = std::abs((kron - gauss) * h);
    if (r.error > 0.0)
        r.error = std::min(r.error, 200.0 * r.error * std::sqrt(r.error));
    return r;
}

template <class F>
inline void adapt_rec(const F& f, double a, double b, double tol, int depth,
                      QuadResult& acc)
{
    QuadResult r = gk15(f, a, b);
    if (r.error <= tol || depth >= 48) {
        acc.value += r.value;
        acc.error += r.error;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt_rec(f, a, c, 0.5 * tol, depth + 1, acc);
    adapt_rec(f, c, b, 0.5 * tol, depth + 1, acc);
}

} // namespace detail

// Adaptive quadrature of f over [a, b]. The integrand must be finite on the
// closed interval; endpoint singularities have to be substituted away first.
template <class F>
inline QuadResult integrate(const F& f, double a, double b,
                            double rel_tol = 1e-12, double abs_tol = 1e-14)
{
    if (!(a <= b))
        return integrate(f, b, a, rel_tol, abs_tol);
    QuadResult rough = detail::gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::abs(rough.value));
    QuadResult acc;
    detail::adapt_rec(f, a, b, tol, 0, acc);
    // One tolerance-tightening pass if the first estimate was poor.
    if (acc.error > std::max(abs_tol, rel_tol * std::abs(acc.value))) {
        QuadResult acc2;
        detail::adapt_rec(f, a, b,
                          std::max(abs_tol, rel_tol * std::abs(acc.value)), 0,
                          acc2);
        acc = acc2;
    }
    return acc;
}

// Computes  I = \int_a^b g(s) / sqrt((s-a)(b-s)) ds  via s = a + (b-a) sin^2(t),
// which maps to  I = 2 \int_0^{pi/2} g(s(t)) dt  with an analytic integrand.
// A collapsed interval (b == a) has the finite limit pi * g(a).
template <class G>
inline QuadResult sqrt_endpoint_integral(const G& g, double a, double b,
                                         double rel_tol = 1e-12)
{
    if (b < a)
        throw std::invalid_argument("sqrt_endpoint_integral: b < a");
    const double width = b - a;
    if (width < 1e-14 * std::max(1.0, std::abs(a))) {
        QuadResult r;
        r.value = std::numbers::pi * g(0.5 * (a + b));
        r.error = std::abs(r.value) * 1e-14;
        return r;
    }
    auto integrand = [&](double t) {
        const double st = std::sin(t);
        return 2.0 * g(a + width * st * st);
    };
    return integrate(integrand, 0.0, 0.5 * std::numbers::pi, rel_tol,
                     1e-15);
}

} // namespace kext
