#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "tsr/errors.hpp"

namespace tsr {

/// Sample moments of a real sequence. sd uses the n-1 denominator; skewness
/// and excess kurtosis use the plain moment estimators m3/m2^1.5 and
/// m4/m2^2 - 3, and are absent when n is too small (or the sample is
/// degenerate, where the ratios are undefined).
struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
    std::optional<double> skewness;
    std::optional<double> excess_kurtosis;
};

inline DescriptiveStats describe(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) throw EmptyInput("describe: empty input");

    DescriptiveStats out;
    out.n = n;
    if (std::all_of(values.begin(), values.end(),
                    [&](double v) { return v == values.front(); })) {
        // Short-circuit keeps sd == 0 exact for constant samples.
        out.mean = values.front();
        return out;
    }

    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    out.sd = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (n >= 3 && m2 > 0.0) out.skewness = m3 / std::pow(m2, 1.5);
    if (n >= 4 && m2 > 0.0) out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return out;
}

/// Sample autocorrelation function, lags 0..max_lag.
struct AcfResult {
    std::vector<double> coefficients;  // index == lag; coefficients[0] == 1

    double at(std::size_t lag) const { return coefficients.at(lag); }
    std::size_t max_lag() const { return coefficients.size() - 1; }
};

/// Standard Box-Jenkins estimator: overall-mean centering, lag-0 variance
/// denominator.
inline AcfResult acf(std::span<const double> values, std::size_t max_lag) {
    const std::size_t n = values.size();
    if (n < 2 || max_lag > n - 2)
        throw LagTooLarge("acf: max_lag " + std::to_string(max_lag) +
                          " too large for series of length " + std::to_string(n));

    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    double denom = 0.0;
    for (double v : values) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw DegenerateInput("acf: constant series");

    AcfResult out;
    out.coefficients.resize(max_lag + 1);
    out.coefficients[0] = 1.0;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double num = 0.0;
        for (std::size_t t = lag; t < n; ++t)
            num += (values[t] - mean) * (values[t - lag] - mean);
        out.coefficients[lag] = num / denom;
    }
    return out;
}

namespace detail {

/// Ranks with ties receiving the average of the positions they occupy.
inline std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace detail

/// Spearman rank correlation: Pearson correlation of average-tied ranks.
inline double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("spearman: unequal lengths");
    if (x.size() < 3) throw InvalidInput("spearman: requires n >= 3");
    const auto constant = [](std::span<const double> v) {
        return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
    };
    if (constant(x) || constant(y)) throw DegenerateInput("spearman: constant input");
    const auto rx = detail::average_ranks(x);
    const auto ry = detail::average_ranks(y);
    return detail::pearson(rx, ry);
}

}  // namespace tsr
