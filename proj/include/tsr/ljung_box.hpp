#pragma once

#include <algorithm>
#include <cstddef>
#include <span>

#include "tsr/distributions.hpp"
#include "tsr/errors.hpp"
#include "tsr/stats.hpp"

namespace tsr {

struct LjungBoxResult {
    double q_statistic = 0.0;
    int lags = 0;
    int df = 0;
    double p_value = 1.0;
};

/// Portmanteau test for joint autocorrelation up to the given lag horizon:
///   Q = n(n+2) sum_{s=1..lags} rho_s^2 / (n - s),
/// referred to a chi-square with max(1, lags - fit_dof) degrees of freedom.
/// Pass fit_dof = p + q when testing a series an ARMA model was fitted to.
inline LjungBoxResult ljung_box(std::span<const double> values, int lags, int fit_dof = 0) {
    if (lags < 1) throw InvalidInput("ljung_box: need at least one lag");
    const std::size_t n = values.size();
    if (n <= static_cast<std::size_t>(lags) + 1)
        throw LagTooLarge("ljung_box: series of length " + std::to_string(n) +
                          " too short for " + std::to_string(lags) + " lags");

    const auto rho = acf(values, static_cast<std::size_t>(lags));
    double q = 0.0;
    for (int s = 1; s <= lags; ++s)
        q += rho.at(s) * rho.at(s) / static_cast<double>(n - static_cast<std::size_t>(s));
    q *= static_cast<double>(n) * static_cast<double>(n + 2);

    LjungBoxResult out;
    out.q_statistic = q;
    out.lags = lags;
    out.df = std::max(1, lags - fit_dof);
    out.p_value = chi_square_sf(q, out.df);
    return out;
}

/// Default horizon min(10, n/5), matching common practice.
inline int default_ljung_box_lags(std::size_t n) {
    return std::max(1, std::min(10, static_cast<int>(n / 5)));
}

}  // namespace tsr
