#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>

// Smallest-denominator rational recovery by Stern-Brocot descent, phrased as
// the classic "simplest fraction in an interval" recursion.

namespace kext {

struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    double value() const
    {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    bool operator==(const Fraction&) const = default;
};

namespace detail {

inline Fraction simplest_in(double lo, double hi, int depth = 0)
{
    if (depth > 64)
        throw std::runtime_error("simplest_in: no terminating fraction");
    const double fl = std::floor(lo);
    if (lo == fl)
        return Fraction{static_cast<std::int64_t>(fl), 1};
    if (fl + 1.0 <= hi)
        return Fraction{static_cast<std::int64_t>(fl) + 1, 1};
    // recurse on the reciprocal of the fractional parts (endpoints swap)
    const Fraction inner = simplest_in(1.0 / (hi - fl), 1.0 / (lo - fl),
                                       depth + 1);
    return Fraction{static_cast<std::int64_t>(fl) * inner.num + inner.den,
                    inner.num};
}

} // namespace detail

/// Irreducible fraction with the smallest denominator inside [lo, hi],
/// for 0 < lo <= hi.
inline Fraction simplest_in_interval(double lo, double hi)
{
    if (!(lo > 0.0 && lo <= hi))
        throw std::invalid_argument("simplest_in_interval: need 0 < lo <= hi");
    Fraction f = detail::simplest_in(lo, hi);
    const std::int64_t g = std::gcd(f.num, f.den);
    if (g > 1) {
        f.num /= g;
        f.den /= g;
    }
    return f;
}

/// Smallest-denominator irreducible q/m with |x - q/m| <= eps and
/// m <= denom_cap, if one exists.  The simplest fraction in the interval has
/// the minimal denominator among all candidates, so a single descent decides.
inline std::optional<Fraction> detect_rational(double x, double eps,
                                               std::int64_t denom_cap)
{
    if (!(eps > 0.0) || denom_cap < 1)
        throw std::invalid_argument("detect_rational: bad eps or cap");
    if (!(x - eps > 0.0))
        throw std::domain_error("detect_rational: interval must stay positive");
    Fraction f;
    try {
        f = simplest_in_interval(x - eps, x + eps);
    } catch (const std::runtime_error&) {
        return std::nullopt;
    }
    if (f.den > denom_cap)
        return std::nullopt;
    return f;
}

} // namespace kext
