#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tsr/errors.hpp"
#include "tsr/ols.hpp"

namespace tsr {

enum class AdfRegression { constant, constant_trend };

/// Statistic form: tau is the t-ratio on the lagged level; joint_f is the
/// Dickey-Fuller F-type statistic testing the unit root jointly with the
/// highest-order deterministic term.
enum class AdfVariant { tau, joint_f };

struct AdfResult {
    double statistic = 0.0;
    int lags_used = 0;
    AdfRegression regression = AdfRegression::constant;
    AdfVariant variant = AdfVariant::tau;
    std::size_t nobs = 0;  // observations in the final regression
    std::array<double, 3> critical_values{};  // 1%, 5%, 10%
    std::array<bool, 3> reject{};             // at 1%, 5%, 10%

    bool rejects_at(double level) const {
        if (level == 0.01) return reject[0];
        if (level == 0.05) return reject[1];
        if (level == 0.10) return reject[2];
        throw InvalidInput("AdfResult: tabulated levels are 1%, 5%, 10%");
    }
};

namespace detail {

/// MacKinnon response-surface critical values for the tau statistic,
/// cv = b0 + b1/T + b2/T^2 + b3/T^3, rows ordered 1%, 5%, 10%.
inline std::array<double, 3> mackinnon_tau_critical(AdfRegression kind, std::size_t t_obs) {
    static constexpr double table_c[3][4] = {
        {-3.43035, -6.5393, -16.786, -79.433},
        {-2.86154, -2.8903, -4.234, -40.040},
        {-2.56677, -1.5384, -2.809, 0.0},
    };
    static constexpr double table_ct[3][4] = {
        {-3.95877, -9.0531, -28.428, -134.155},
        {-3.41049, -4.3904, -9.036, -45.374},
        {-3.12705, -2.5856, -3.925, -22.380},
    };
    const auto& table = kind == AdfRegression::constant ? table_c : table_ct;
    const double T = static_cast<double>(t_obs);
    std::array<double, 3> cv{};
    for (int i = 0; i < 3; ++i)
        cv[i] = table[i][0] + table[i][1] / T + table[i][2] / (T * T) +
                table[i][3] / (T * T * T);
    return cv;
}

/// Dickey-Fuller (1981) finite-sample critical values for the joint F
/// statistics (phi_1 for the constant case, phi_3 with trend), linearly
/// interpolated in 1/T between the tabulated sample sizes.
inline std::array<double, 3> dickey_fuller_f_critical(AdfRegression kind, std::size_t t_obs) {
    static constexpr double sizes[6] = {25, 50, 100, 250, 500, 1e12};
    static constexpr double phi1[6][3] = {
        {7.88, 5.18, 4.12}, {7.06, 4.86, 3.94}, {6.70, 4.71, 3.86},
        {6.52, 4.63, 3.81}, {6.47, 4.61, 3.79}, {6.43, 4.59, 3.78},
    };
    static constexpr double phi3[6][3] = {
        {10.61, 7.24, 5.91}, {9.31, 6.73, 5.61}, {8.73, 6.49, 5.47},
        {8.43, 6.34, 5.39}, {8.34, 6.30, 5.36}, {8.27, 6.25, 5.34},
    };
    const auto& table = kind == AdfRegression::constant ? phi1 : phi3;
    const double T = static_cast<double>(t_obs);

    std::array<double, 3> cv{};
    if (T <= sizes[0]) {
        for (int i = 0; i < 3; ++i) cv[i] = table[0][i];
        return cv;
    }
    for (int s = 0; s < 5; ++s) {
        if (T <= sizes[s + 1]) {
            const double w = (1.0 / T - 1.0 / sizes[s]) / (1.0 / sizes[s + 1] - 1.0 / sizes[s]);
            for (int i = 0; i < 3; ++i) cv[i] = table[s][i] + w * (table[s + 1][i] - table[s][i]);
            return cv;
        }
    }
    for (int i = 0; i < 3; ++i) cv[i] = table[5][i];
    return cv;
}

/// Builds the ADF design for lag order L over rows i = start..n-2 of the
/// difference index: y = d_i, columns [level x_i, d_{i-1}..d_{i-L},
/// const, trend].
inline void build_adf_design(std::span<const double> x, std::span<const double> d, int lag,
                             std::size_t start, AdfRegression kind, Eigen::MatrixXd& X,
                             Eigen::VectorXd& y) {
    const std::size_t n_diff = d.size();
    const std::size_t rows = n_diff - start;
    const std::size_t k = 1 + static_cast<std::size_t>(lag) + 1 +
                          (kind == AdfRegression::constant_trend ? 1 : 0);
    X.resize(rows, k);
    y.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t i = start + r;
        y(r) = d[i];
        std::size_t col = 0;
        X(r, col++) = x[i];
        for (int l = 1; l <= lag; ++l) X(r, col++) = d[i - static_cast<std::size_t>(l)];
        X(r, col++) = 1.0;
        if (kind == AdfRegression::constant_trend) X(r, col++) = static_cast<double>(i);
    }
}

}  // namespace detail

/// Augmented Dickey-Fuller unit-root test. The regression is
///   dx_t = gamma x_{t-1} + sum c_l dx_{t-l} + deterministics + e_t,
/// with the lag order chosen by AIC over 0..floor((n-1)^{1/3}) on a common
/// sample when max_lag < 0, then re-estimated on the full usable sample.
inline AdfResult adf_test(std::span<const double> series, AdfRegression kind,
                          int max_lag = -1, AdfVariant variant = AdfVariant::tau) {
    const std::size_t n = series.size();
    if (n < 20) throw SeriesTooShort("adf_test: need at least 20 observations");

    std::vector<double> d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) d[i] = series[i + 1] - series[i];

    const int det_terms = kind == AdfRegression::constant_trend ? 2 : 1;
    int lag_cap = max_lag >= 0
                      ? max_lag
                      : static_cast<int>(std::floor(std::cbrt(static_cast<double>(n - 1))));
    // Keep enough rows for the largest candidate regression.
    const int hard_cap = static_cast<int>(n - 1) - det_terms - 3;
    lag_cap = std::min(lag_cap, std::max(0, hard_cap));

    int chosen = lag_cap;
    if (max_lag < 0) {
        // AIC over a common sample so the candidate fits are comparable.
        const std::size_t start = static_cast<std::size_t>(lag_cap);
        double best_aic = std::numeric_limits<double>::infinity();
        Eigen::MatrixXd X;
        Eigen::VectorXd y;
        for (int lag = 0; lag <= lag_cap; ++lag) {
            detail::build_adf_design(series, d, lag, start, kind, X, y);
            LinearFit f;
            try {
                f = fit_ols(X, y);
            } catch (const Error&) {
                continue;
            }
            const double T = static_cast<double>(f.n);
            const double aic = T * std::log(f.ssr / T) + 2.0 * static_cast<double>(f.k);
            if (aic < best_aic) {
                best_aic = aic;
                chosen = lag;
            }
        }
        if (!std::isfinite(best_aic))
            throw SingularRegression("adf_test: all candidate regressions singular");
    }

    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    detail::build_adf_design(series, d, chosen, static_cast<std::size_t>(chosen), kind, X, y);
    const LinearFit unrestricted = fit_ols(X, y);

    AdfResult out;
    out.lags_used = chosen;
    out.regression = kind;
    out.variant = variant;
    out.nobs = unrestricted.n;

    if (variant == AdfVariant::tau) {
        out.statistic = unrestricted.coef(0) / unrestricted.se(0);
        out.critical_values = detail::mackinnon_tau_critical(kind, out.nobs);
        for (int i = 0; i < 3; ++i) out.reject[i] = out.statistic < out.critical_values[i];
        return out;
    }

    // Joint F: drop the level column and the highest-order deterministic
    // term (the constant for the constant case, the trend when present).
    const std::size_t k_u = unrestricted.k;
    const std::size_t rows = unrestricted.n;
    const std::size_t k_r = k_u - 2;
    double ssr_r;
    if (k_r == 0) {
        ssr_r = y.squaredNorm();
    } else {
        Eigen::MatrixXd Xr(rows, k_r);
        std::size_t col = 0;
        for (int l = 1; l <= chosen; ++l) Xr.col(col++) = X.col(static_cast<std::size_t>(l));
        if (kind == AdfRegression::constant_trend)
            Xr.col(col++) = X.col(1 + static_cast<std::size_t>(chosen));  // keep the constant
        ssr_r = fit_ols(Xr, y).ssr;
    }
    const double df_u = static_cast<double>(rows - k_u);
    out.statistic = ((ssr_r - unrestricted.ssr) / 2.0) / (unrestricted.ssr / df_u);
    out.critical_values = detail::dickey_fuller_f_critical(kind, out.nobs);
    for (int i = 0; i < 3; ++i) out.reject[i] = out.statistic > out.critical_values[i];
    return out;
}

}  // namespace tsr
