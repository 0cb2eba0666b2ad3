#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tsr/adf.hpp"
#include "tsr/arma.hpp"
#include "tsr/distributions.hpp"
#include "tsr/errors.hpp"
#include "tsr/ljung_box.hpp"
#include "tsr/series.hpp"
#include "tsr/stats.hpp"

namespace tsr {

enum class TrendCategory { improving, neutral, deteriorating };
enum class PersistenceCategory { anti_persistent, random, persistent };

/// Persistence with magnitude below this is treated as exactly random; only
/// (0,0) fits can produce it, estimated coefficients are never snapped.
inline constexpr double persistence_zero_tol = 1e-6;

struct AnalysisConfig {
    int max_p = 2;
    int max_q = 2;
    double alpha_trend = 0.05;
    int ljung_box_lags = 0;  // 0 = auto: min(10, n/5)
    bool use_aicc = false;
    AdfVariant adf_variant = AdfVariant::tau;
    bool raw_sign_trend = false;  // categorize the trend by sign alone
    std::uint64_t random_seed = 12345;
};

/// Overall persistence of a fitted increment model: the sum of all AR and
/// MA coefficients. Empty sums make a (0,0) fit exactly zero.
inline double persistence(const ArmaFit& fit) {
    double total = 0.0;
    for (double b : fit.params.ar) total += b;
    for (double t : fit.params.ma) total += t;
    return total;
}

/// Relative volatility sigma / (2|trend|) - 1. Negative values mean typical
/// shocks are too small to invert the trend; a zero trend is maximally
/// volatile and reported as +infinity.
inline double relative_volatility(double trend, double shock_sd) {
    if (!(shock_sd > 0.0)) throw InvalidSigma("relative_volatility: sigma must be positive");
    if (trend == 0.0) return std::numeric_limits<double>::infinity();
    return shock_sd / (2.0 * std::fabs(trend)) - 1.0;
}

/// Two-sided normal significance test of the trend at level alpha.
inline TrendCategory trend_category(double trend, double trend_se, double alpha) {
    if (!(trend_se > 0.0)) throw InvalidInput("trend_category: se must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("trend_category: alpha in (0,1)");
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double ratio = trend / trend_se;
    if (ratio > z) return TrendCategory::improving;
    if (ratio < -z) return TrendCategory::deteriorating;
    return TrendCategory::neutral;
}

inline TrendCategory trend_category_raw_sign(double trend) {
    if (trend > 0.0) return TrendCategory::improving;
    if (trend < 0.0) return TrendCategory::deteriorating;
    return TrendCategory::neutral;
}

inline PersistenceCategory persistence_category(const ArmaSpec& spec, double pi) {
    if ((spec.p == 0 && spec.q == 0) || pi == 0.0) return PersistenceCategory::random;
    return pi < 0.0 ? PersistenceCategory::anti_persistent : PersistenceCategory::persistent;
}

/// The four fundamental properties plus diagnostics for one unit.
struct ResilienceProfile {
    std::string unit_id;
    std::size_t n_levels = 0;
    double level = 0.0;                 // mean of the level series
    double trend = 0.0;                 // mean increment g
    double trend_se = 0.0;
    TrendCategory trend_category = TrendCategory::neutral;
    double volatility = 0.0;            // shock standard deviation sigma
    double relative_volatility = 0.0;   // rho; +inf flags a zero trend
    double persistence = 0.0;           // pi
    PersistenceCategory persistence_category = PersistenceCategory::random;
    ArmaSpec selected_spec;
    double aic = 0.0;
    LjungBoxResult ljung_box;
    std::optional<AdfResult> adf_levels;
    std::optional<AdfResult> adf_increments;
    DescriptiveStats residual_stats;
    std::vector<std::string> warnings;

    bool rho_is_infinite() const { return std::isinf(relative_volatility); }
};

/// Classification outcome with the per-condition rationale.
struct Classification {
    bool resilient = false;
    bool resistant = false;
    bool trend_not_deteriorating = false;
    bool anti_persistent = false;
    bool not_volatile = false;
};

/// Pure classification rule: resilient = non-deteriorating trend and
/// anti-persistent increments; resistant = non-deteriorating trend and
/// relative volatility below zero.
inline Classification classify(TrendCategory trend, double pi, double rho) {
    Classification c;
    c.trend_not_deteriorating = trend != TrendCategory::deteriorating;
    c.anti_persistent = pi < -persistence_zero_tol;
    c.not_volatile = rho < 0.0;
    c.resilient = c.trend_not_deteriorating && c.anti_persistent;
    c.resistant = c.trend_not_deteriorating && c.not_volatile;
    return c;
}

inline Classification classify(const ResilienceProfile& profile) {
    return classify(profile.trend_category, profile.persistence, profile.relative_volatility);
}

/// Full per-unit pipeline: difference, stationarity screens, AIC order
/// selection, the four properties, and autocorrelation diagnostics.
inline ResilienceProfile profile(const LevelSeries& series, const AnalysisConfig& config = {}) {
    if (series.size() < 11)
        throw SeriesTooShort("profile: need at least 11 levels, got " +
                             std::to_string(series.size()));

    const IncrementSeries increments = difference(series);
    const auto& d = increments.values;
    if (std::all_of(d.begin(), d.end(), [&](double v) { return v == d.front(); }))
        throw DegenerateSeries("profile: increments are constant (zero shock variance)");

    ResilienceProfile out;
    out.unit_id = series.unit_id;
    out.n_levels = series.size();

    // Unit-root screen on levels, stationarity check on increments.
    if (series.size() >= 20) {
        out.adf_levels = adf_test(series.values, AdfRegression::constant_trend, -1,
                                  config.adf_variant);
    } else {
        out.warnings.push_back("adf-levels-skipped");
    }
    if (increments.size() >= 20) {
        out.adf_increments =
            adf_test(d, AdfRegression::constant, -1, config.adf_variant);
        if (!out.adf_increments->reject[2])
            out.warnings.push_back("non-stationary-increments");
    } else {
        out.warnings.push_back("adf-increments-skipped");
    }

    const ArmaFit fit = select_order(increments, config.max_p, config.max_q, config.use_aicc);

    out.level = std::accumulate(series.values.begin(), series.values.end(), 0.0) /
                static_cast<double>(series.size());
    out.trend = fit.params.mean;
    out.trend_se = fit.mean_se;
    out.volatility = fit.params.shock_sd;
    out.relative_volatility = relative_volatility(out.trend, out.volatility);
    out.persistence = persistence(fit);
    out.selected_spec = fit.spec;
    out.aic = fit.aic;
    out.residual_stats = fit.residual_stats;

    out.trend_category = config.raw_sign_trend
                             ? trend_category_raw_sign(out.trend)
                             : trend_category(out.trend, out.trend_se, config.alpha_trend);
    out.persistence_category = persistence_category(fit.spec, out.persistence);

    int lb_lags = config.ljung_box_lags > 0 ? config.ljung_box_lags
                                            : default_ljung_box_lags(increments.size());
    lb_lags = std::min(lb_lags, static_cast<int>(increments.size()) - 2);
    out.ljung_box = ljung_box(d, std::max(1, lb_lags), fit.spec.p + fit.spec.q);

    if (increments.size() < 50) out.warnings.push_back("short-series");
    if (fit.boundary_ma) out.warnings.push_back("boundary-ma");
    if (fit.mean_se_fallback || !fit.converged) out.warnings.push_back("convergence-fallback");
    return out;
}

/// Empirical counterparts of trend, volatility, and persistence, used as
/// consistency checks on the parametric fit.
struct NonparametricProfile {
    double trend = 0.0;        // sample mean of the increments
    double volatility = 0.0;   // sample sd of the increments
    double persistence = 0.0;  // lag-1 sample autocorrelation
};

inline NonparametricProfile nonparametric_profile(const LevelSeries& series) {
    if (series.size() < 11)
        throw SeriesTooShort("nonparametric_profile: need at least 11 levels");
    const IncrementSeries increments = difference(series);
    const auto stats = describe(increments.values);

    NonparametricProfile out;
    out.trend = stats.mean;
    out.volatility = stats.sd;
    // Constant increments carry no autocorrelation signal; report zero.
    out.persistence = stats.sd > 0.0 ? acf(increments.values, 1).at(1) : 0.0;
    return out;
}

}  // namespace tsr
