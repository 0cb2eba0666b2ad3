#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tsr/errors.hpp"

namespace tsr {

namespace detail {

/// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
inline double lower_gamma_series(double a, double x) {
    const double lga = std::lgamma(a);
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - lga);
    }
    return sum * std::exp(-x + a * std::log(x) - lga);
}

/// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction
/// (x >= a+1).
inline double upper_gamma_cf(double a, double x) {
    const double lga = std::lgamma(a);
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - lga) * h;
}

}  // namespace detail

/// Chi-square survival function P(X > x) with df degrees of freedom,
/// computed from the regularized incomplete gamma function.
inline double chi_square_sf(double x, int df) {
    if (df < 1) throw InvalidInput("chi_square_sf: df must be >= 1");
    if (!(x >= 0.0) || !std::isfinite(x))
        throw InvalidInput("chi_square_sf: x must be finite and non-negative");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(df);
    const double hx = 0.5 * x;
    const double q = (hx < a + 1.0) ? 1.0 - detail::lower_gamma_series(a, hx)
                                    : detail::upper_gamma_cf(a, hx);
    return std::min(1.0, std::max(0.0, q));
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse standard normal CDF: Acklam's rational approximation refined with
/// one Halley step against erfc, giving near machine precision.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidInput("normal_quantile: p must be in (0, 1)");

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;

    double x;
    if (p < plow) {
        const double u = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else if (p > 1.0 - plow) {
        const double u = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * u + c[1]) * u + c[2]) * u + c[3]) * u + c[4]) * u + c[5]) /
            ((((d[0] * u + d[1]) * u + d[2]) * u + d[3]) * u + 1.0);
    } else {
        const double u = p - 0.5;
        const double r = u * u;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // Halley refinement.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

/// Two-sided normal p-value for a t-like ratio.
inline double two_sided_p(double z) { return 2.0 * (1.0 - normal_cdf(std::fabs(z))); }

/// Report legend: *** p<0.01, ** p<0.05, * p<0.1.
inline std::string significance_stars(double p) {
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

}  // namespace tsr
