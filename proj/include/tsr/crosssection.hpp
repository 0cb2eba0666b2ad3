#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tsr/distributions.hpp"
#include "tsr/errors.hpp"
#include "tsr/ols.hpp"
#include "tsr/resilience.hpp"
#include "tsr/rng.hpp"
#include "tsr/series.hpp"
#include "tsr/stats.hpp"

namespace tsr {

/// Immutable snapshot of per-unit profiles plus optional covariates.
struct PanelTable {
    std::vector<ResilienceProfile> rows;
    std::map<std::string, std::map<std::string, double>> covariates;

    void validate() const {
        std::set<std::string> seen;
        for (const auto& r : rows)
            if (!seen.insert(r.unit_id).second)
                throw DuplicateObservation("PanelTable: duplicate unit " + r.unit_id);
    }
};

enum class PanelProperty { level, trend, relative_volatility, persistence };

inline const char* property_name(PanelProperty p) {
    switch (p) {
        case PanelProperty::level: return "level";
        case PanelProperty::trend: return "trend";
        case PanelProperty::relative_volatility: return "rho";
        case PanelProperty::persistence: return "pi";
    }
    return "?";
}

inline double property_value(const ResilienceProfile& r, PanelProperty p) {
    switch (p) {
        case PanelProperty::level: return r.level;
        case PanelProperty::trend: return r.trend;
        case PanelProperty::relative_volatility: return r.relative_volatility;
        case PanelProperty::persistence: return r.persistence;
    }
    return 0.0;
}

/// OLS with heteroskedasticity-consistent (Huber-White) standard errors.
struct OlsResult {
    std::vector<double> coefficients;  // intercept first, then regressors
    std::vector<double> hc_se;
    double r_squared = 0.0;
    std::size_t n_used = 0;
};

/// regressors are passed as columns, without an intercept; one is added as
/// the leading column. HC0 by default; hc1 applies the n/(n-k) correction.
inline OlsResult ols_hc0(const std::vector<double>& y,
                         const std::vector<std::vector<double>>& regressors,
                         bool hc1 = false) {
    const std::size_t n = y.size();
    const std::size_t k = regressors.size() + 1;
    for (const auto& col : regressors)
        if (col.size() != n) throw LengthMismatch("ols_hc0: regressor length mismatch");
    if (n <= k + 1) throw InsufficientData("ols_hc0: need more than regressors + 1 rows");

    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd yv(n);
    for (std::size_t i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (std::size_t j = 0; j < regressors.size(); ++j) X(i, j + 1) = regressors[j][i];
        yv(i) = y[i];
    }

    LinearFit fit;
    try {
        fit = fit_ols(X, yv);
    } catch (const SingularRegression&) {
        throw RankDeficient("ols_hc0: design matrix is rank deficient");
    }

    // Sandwich: (X'X)^-1 X' diag(e^2) X (X'X)^-1.
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t i = 0; i < n; ++i) {
        const double e2 = fit.residuals(i) * fit.residuals(i);
        meat.noalias() += e2 * (X.row(i).transpose() * X.row(i));
    }
    Eigen::MatrixXd cov = fit.xtx_inv * meat * fit.xtx_inv;
    if (hc1) cov *= static_cast<double>(n) / static_cast<double>(n - k);

    OlsResult out;
    out.n_used = n;
    out.r_squared = fit.r_squared;
    out.coefficients.assign(fit.coef.data(), fit.coef.data() + k);
    out.hc_se.resize(k);
    for (std::size_t j = 0; j < k; ++j) out.hc_se[j] = std::sqrt(cov(j, j));
    return out;
}

/// Cross-sectional regression of one property on named covariates, with
/// listwise deletion of units missing the dependent value (including
/// infinite relative volatility) or any covariate.
inline OlsResult regress(const PanelTable& panel, PanelProperty dependent,
                         const std::vector<std::string>& covariate_names, bool hc1 = false) {
    std::vector<double> y;
    std::vector<std::vector<double>> X(covariate_names.size());
    for (const auto& row : panel.rows) {
        const double value = property_value(row, dependent);
        if (!std::isfinite(value)) continue;
        const auto unit_cov = panel.covariates.find(row.unit_id);
        if (unit_cov == panel.covariates.end()) continue;
        std::vector<double> cells;
        cells.reserve(covariate_names.size());
        bool complete = true;
        for (const auto& name : covariate_names) {
            const auto it = unit_cov->second.find(name);
            if (it == unit_cov->second.end() || !std::isfinite(it->second)) {
                complete = false;
                break;
            }
            cells.push_back(it->second);
        }
        if (!complete) continue;
        y.push_back(value);
        for (std::size_t j = 0; j < cells.size(); ++j) X[j].push_back(cells[j]);
    }
    return ols_hc0(y, X, hc1);
}

enum class SortDirection { ascending, descending };

struct RankingEntry {
    std::size_t position = 0;  // 1-based position in the full ordering
    std::string unit_id;
    double value = 0.0;
    std::string stars;  // Ljung-Box significance, persistence rankings only
};

struct Ranking {
    PanelProperty property = PanelProperty::level;
    SortDirection direction = SortDirection::descending;
    std::vector<RankingEntry> entries;
    std::size_t excluded = 0;  // units dropped for non-finite values
};

/// Table-style convention: decreasing level and trend, increasing relative
/// volatility and persistence.
inline SortDirection canonical_direction(PanelProperty p) {
    return (p == PanelProperty::level || p == PanelProperty::trend)
               ? SortDirection::descending
               : SortDirection::ascending;
}

/// Orders units by one property, deterministically breaking ties by
/// unit_id. both_ends appends the tail of the ordering (worst performers)
/// to the head, each capped at top_k.
inline Ranking rank(const PanelTable& panel, PanelProperty property, SortDirection direction,
                    std::size_t top_k, bool both_ends = false) {
    if (panel.rows.empty()) throw EmptyPanel("rank: empty panel");

    Ranking out;
    out.property = property;
    out.direction = direction;

    std::vector<RankingEntry> all;
    all.reserve(panel.rows.size());
    for (const auto& row : panel.rows) {
        const double value = property_value(row, property);
        if (!std::isfinite(value)) {
            ++out.excluded;
            continue;
        }
        RankingEntry e;
        e.unit_id = row.unit_id;
        e.value = value;
        if (property == PanelProperty::persistence)
            e.stars = significance_stars(row.ljung_box.p_value);
        all.push_back(std::move(e));
    }
    std::sort(all.begin(), all.end(), [&](const RankingEntry& a, const RankingEntry& b) {
        if (a.value != b.value)
            return direction == SortDirection::ascending ? a.value < b.value
                                                         : a.value > b.value;
        return a.unit_id < b.unit_id;
    });
    for (std::size_t i = 0; i < all.size(); ++i) all[i].position = i + 1;

    const std::size_t head = std::min(top_k, all.size());
    out.entries.assign(all.begin(), all.begin() + head);
    if (both_ends && all.size() > head) {
        const std::size_t tail_start = std::max(head, all.size() - std::min(top_k, all.size()));
        out.entries.insert(out.entries.end(), all.begin() + tail_start, all.end());
    }
    return out;
}

/// Cross-sectional moments of the level values per year, skipping units
/// not observed in that year.
inline std::map<int, DescriptiveStats> yearly_stats(
    const std::vector<LevelSeries>& levels,
    std::optional<std::pair<int, int>> year_range = std::nullopt) {
    std::map<int, std::vector<double>> by_year;
    for (const auto& s : levels)
        for (std::size_t i = 0; i < s.size(); ++i) by_year[s.times[i]].push_back(s.values[i]);

    std::map<int, DescriptiveStats> out;
    if (year_range) {
        if (year_range->first > year_range->second)
            throw InvalidInput("yearly_stats: empty year range");
        for (int y = year_range->first; y <= year_range->second; ++y) {
            const auto it = by_year.find(y);
            if (it == by_year.end())
                throw EmptyYear("yearly_stats: no unit observed in year " + std::to_string(y));
            out.emplace(y, describe(it->second));
        }
    } else {
        for (const auto& [year, values] : by_year) out.emplace(year, describe(values));
    }
    return out;
}

/// Pairwise Spearman correlations of the four properties across units, with
/// seeded permutation p-values. Units with any non-finite property
/// (infinite relative volatility) are excluded and counted.
struct PropertyMatrix {
    std::array<PanelProperty, 4> properties{PanelProperty::level, PanelProperty::trend,
                                            PanelProperty::relative_volatility,
                                            PanelProperty::persistence};
    std::array<std::array<double, 4>, 4> coefficient{};
    std::array<std::array<double, 4>, 4> p_value{};
    std::size_t n_used = 0;
    std::size_t excluded = 0;
};

inline PropertyMatrix property_matrix(const PanelTable& panel, int permutations = 1000,
                                      std::uint64_t seed = 12345) {
    PropertyMatrix out;
    std::array<std::vector<double>, 4> columns;
    for (const auto& row : panel.rows) {
        std::array<double, 4> vals{};
        bool finite = true;
        for (std::size_t k = 0; k < 4; ++k) {
            vals[k] = property_value(row, out.properties[k]);
            finite = finite && std::isfinite(vals[k]);
        }
        if (!finite) {
            ++out.excluded;
            continue;
        }
        for (std::size_t k = 0; k < 4; ++k) columns[k].push_back(vals[k]);
    }
    out.n_used = columns[0].size();
    if (out.n_used < 3)
        throw InsufficientData("property_matrix: need at least 3 units with finite properties");

    std::array<std::vector<double>, 4> ranks;
    for (std::size_t k = 0; k < 4; ++k) ranks[k] = detail::average_ranks(columns[k]);

    for (std::size_t i = 0; i < 4; ++i) {
        out.coefficient[i][i] = 1.0;
        out.p_value[i][i] = 0.0;
        for (std::size_t j = i + 1; j < 4; ++j) {
            const double observed = detail::pearson(ranks[i], ranks[j]);
            Rng rng(derive_seed(seed, i * 4 + j));
            std::vector<double> shuffled = ranks[j];
            int hits = 0;
            for (int rep = 0; rep < permutations; ++rep) {
                for (std::size_t m = shuffled.size() - 1; m > 0; --m)
                    std::swap(shuffled[m], shuffled[rng.below(m + 1)]);
                if (std::fabs(detail::pearson(ranks[i], shuffled)) >=
                    std::fabs(observed) - 1e-12)
                    ++hits;
            }
            const double p = (1.0 + hits) / (1.0 + static_cast<double>(permutations));
            out.coefficient[i][j] = out.coefficient[j][i] = observed;
            out.p_value[i][j] = out.p_value[j][i] = p;
        }
    }
    return out;
}

}  // namespace tsr
