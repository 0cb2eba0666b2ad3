#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsr/errors.hpp"
#include "tsr/nelder_mead.hpp"
#include "tsr/rng.hpp"
#include "tsr/series.hpp"
#include "tsr/stats.hpp"

namespace tsr {

/// Model orders of the increment process: p autoregressive and q moving
/// average terms.
struct ArmaSpec {
    int p = 0;
    int q = 0;

    bool operator==(const ArmaSpec&) const = default;
};

/// Parameters of the increment model
///   d_t = mean + sum_i ar_i (d_{t-i} - mean) + sum_j ma_j e_{t-j} + e_t,
/// with i.i.d. shocks e_t of standard deviation shock_sd.
struct ArmaParams {
    double mean = 0.0;
    std::vector<double> ar;
    std::vector<double> ma;
    double shock_sd = 1.0;
};

/// Tolerance within which an MA root may sit on the unit circle; the
/// linear-trend-plus-noise case lives exactly on that boundary.
inline constexpr double ma_unit_root_tol = 1e-6;

namespace detail {

/// Smallest root modulus of 1 + c_1 z + ... + c_d z^d (companion-matrix
/// eigenvalues). Returns +inf for an empty polynomial.
inline double min_root_modulus(std::span<const double> c) {
    std::size_t d = c.size();
    while (d > 0 && c[d - 1] == 0.0) --d;
    if (d == 0) return std::numeric_limits<double>::infinity();
    if (d == 1) return 1.0 / std::fabs(c[0]);

    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 1; i < d; ++i) m(i, i - 1) = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double coeff = (i == 0) ? 1.0 : c[i - 1];  // coefficient of z^i
        m(i, d - 1) = -coeff / c[d - 1];
    }
    const auto eig = m.eigenvalues();
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eig.size(); ++i) lo = std::min(lo, std::abs(eig(i)));
    return lo;
}

inline double min_ar_root_modulus(std::span<const double> ar) {
    std::vector<double> c(ar.size());
    for (std::size_t i = 0; i < ar.size(); ++i) c[i] = -ar[i];
    return min_root_modulus(c);
}

inline double min_ma_root_modulus(std::span<const double> ma) {
    return min_root_modulus(ma);
}

/// Maps unconstrained reals to a stationary AR coefficient vector through
/// tanh partial autocorrelations and the Durbin-Levinson recursion.
inline std::vector<double> pacf_to_ar(std::span<const double> raw) {
    std::vector<double> now(raw.size()), tmp(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) now[i] = std::tanh(raw[i]);
    for (std::size_t j = 1; j < raw.size(); ++j) {
        const double a = now[j];
        for (std::size_t k = 0; k < j; ++k) tmp[k] = now[k] - a * now[j - k - 1];
        std::copy(tmp.begin(), tmp.begin() + j, now.begin());
    }
    return now;
}

/// Same construction with the sign flipped for the MA polynomial
/// 1 + sum ma_j z^j; the image is the open invertibility region, so fitted
/// MA roots can approach (but never cross) the unit circle.
inline std::vector<double> pacf_to_ma(std::span<const double> raw) {
    std::vector<double> now(raw.size()), tmp(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) now[i] = std::tanh(raw[i]);
    for (std::size_t j = 1; j < raw.size(); ++j) {
        const double a = now[j];
        for (std::size_t k = 0; k < j; ++k) tmp[k] = now[k] + a * now[j - k - 1];
        std::copy(tmp.begin(), tmp.begin() + j, now.begin());
    }
    return now;
}

/// One-sided residual recursion with pre-sample centered increments and
/// shocks set to zero.
inline void conditional_residuals_into(double mean, std::span<const double> ar,
                                       std::span<const double> ma,
                                       std::span<const double> values,
                                       std::vector<double>& resid) {
    const std::size_t n = values.size();
    resid.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        double e = values[t] - mean;
        for (std::size_t i = 0; i < ar.size(); ++i)
            if (t > i) e -= ar[i] * (values[t - i - 1] - mean);
        for (std::size_t j = 0; j < ma.size(); ++j)
            if (t > j) e -= ma[j] * resid[t - j - 1];
        resid[t] = e;
    }
}

}  // namespace detail

inline bool ma_near_unit_root(std::span<const double> ma) {
    return !ma.empty() && detail::min_ma_root_modulus(ma) <= 1.0 + ma_unit_root_tol;
}

/// Checks parameter admissibility: positive shock scale, stationary AR
/// polynomial, and MA roots outside the unit circle up to ma_unit_root_tol
/// (boundary configurations are admissible and flagged by the caller).
inline void validate_params(const ArmaParams& params, const ArmaSpec& spec) {
    if (spec.p < 0 || spec.q < 0) throw InvalidParams("negative model order");
    if (params.ar.size() != static_cast<std::size_t>(spec.p) ||
        params.ma.size() != static_cast<std::size_t>(spec.q))
        throw InvalidParams("coefficient count does not match model order");
    if (!std::isfinite(params.mean)) throw InvalidParams("non-finite mean increment");
    if (!(params.shock_sd > 0.0) || !std::isfinite(params.shock_sd))
        throw InvalidParams("shock standard deviation must be positive");
    for (double v : params.ar)
        if (!std::isfinite(v)) throw InvalidParams("non-finite AR coefficient");
    for (double v : params.ma)
        if (!std::isfinite(v)) throw InvalidParams("non-finite MA coefficient");
    if (spec.p > 0 && detail::min_ar_root_modulus(params.ar) <= 1.0)
        throw InvalidParams("AR polynomial has a root on or inside the unit circle");
    if (spec.q > 0 && detail::min_ma_root_modulus(params.ma) < 1.0 - ma_unit_root_tol)
        throw InvalidParams("MA polynomial has a root inside the unit circle");
}

/// Draws a seeded realization of the increment process. Pre-sample
/// increments are held at the mean and pre-sample shocks at zero; a burn-in
/// of max(100, 10(p+q)) steps is discarded. Identical (params, n, seed)
/// give bit-identical output.
inline IncrementSeries simulate(const ArmaParams& params, const ArmaSpec& spec, std::size_t n,
                                std::uint64_t seed, std::string unit_id = "sim") {
    validate_params(params, spec);
    if (n < 1) throw InvalidInput("simulate: n must be >= 1");

    const std::size_t p = params.ar.size(), q = params.ma.size();
    const std::size_t burn = std::max<std::size_t>(100, 10 * (p + q));
    const std::size_t total = burn + n;

    Rng rng(seed);
    std::vector<double> centered(total), shocks(total);
    for (std::size_t t = 0; t < total; ++t) {
        const double e = params.shock_sd * rng.normal();
        double w = e;
        for (std::size_t i = 0; i < p; ++i)
            if (t > i) w += params.ar[i] * centered[t - i - 1];
        for (std::size_t j = 0; j < q; ++j)
            if (t > j) w += params.ma[j] * shocks[t - j - 1];
        centered[t] = w;
        shocks[t] = e;
    }

    std::vector<int> times(n);
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        times[i] = static_cast<int>(i) + 1;
        values[i] = params.mean + centered[burn + i];
    }
    return IncrementSeries(std::move(unit_id), std::move(times), std::move(values));
}

/// Conditional (sum-of-squares) Gaussian log-likelihood of the increment
/// model, with pre-sample centered increments and shocks set to zero:
///   ll = -(n/2) ln(2 pi sigma^2) - sum e_t^2 / (2 sigma^2).
inline double conditional_loglik(const ArmaParams& params, const ArmaSpec& spec,
                                 std::span<const double> increments) {
    const std::size_t n = increments.size();
    if (n < static_cast<std::size_t>(spec.p + spec.q + 2))
        throw SeriesTooShort("conditional_loglik: need at least p + q + 2 increments");
    if (!(params.shock_sd > 0.0)) throw InvalidParams("shock standard deviation must be positive");

    std::vector<double> resid;
    detail::conditional_residuals_into(params.mean, params.ar, params.ma, increments, resid);
    double ssr = 0.0;
    for (double e : resid) ssr += e * e;
    const double s2 = params.shock_sd * params.shock_sd;
    return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * s2) -
           ssr / (2.0 * s2);
}

inline double conditional_loglik(const ArmaParams& params, const ArmaSpec& spec,
                                 const IncrementSeries& increments) {
    return conditional_loglik(params, spec, std::span<const double>(increments.values));
}

/// A fitted increment model. aic always equals 2(p+q+2) - 2 loglik.
struct ArmaFit {
    ArmaSpec spec;
    ArmaParams params;
    double loglik = 0.0;
    double aic = 0.0;
    std::vector<double> residuals;
    double mean_se = 0.0;
    DescriptiveStats residual_stats;
    bool converged = true;
    bool mean_se_fallback = false;
    bool boundary_ma = false;
};

/// Thrown when the optimizer exhausts its restarts; carries the best point
/// reached so callers can inspect or salvage it.
struct ConvergenceFailure : Error {
    ArmaFit best;
    ConvergenceFailure(const std::string& message, ArmaFit best_fit)
        : Error(message), best(std::move(best_fit)) {}
};

inline double aicc(const ArmaFit& fit, std::size_t n) {
    const double k = static_cast<double>(fit.spec.p + fit.spec.q + 2);
    const double denom = static_cast<double>(n) - k - 1.0;
    if (denom <= 0.0) return std::numeric_limits<double>::infinity();
    return fit.aic + 2.0 * k * (k + 1.0) / denom;
}

namespace detail {

/// Observed-information standard error of the mean increment, computed from
/// a central-difference Hessian of the log-likelihood in (mean, ar, ma,
/// sigma) space on the standardized series, then rescaled. Returns nullopt
/// when the information matrix is not positive definite.
inline std::optional<double> mean_se_from_information(std::span<const double> z, double mean_z,
                                                      std::span<const double> ar,
                                                      std::span<const double> ma,
                                                      double sigma_z) {
    const std::size_t p = ar.size(), q = ma.size();
    const std::size_t dim = 2 + p + q;
    const std::size_t n = z.size();

    std::vector<double> work;
    auto loglik_at = [&](const std::vector<double>& v) -> double {
        const double sig = v[dim - 1];
        if (!(sig > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        std::span<const double> var(v.data() + 1, p);
        std::span<const double> vma(v.data() + 1 + p, q);
        conditional_residuals_into(v[0], var, vma, z, work);
        double ssr = 0.0;
        for (double e : work) ssr += e * e;
        return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * sig * sig) -
               ssr / (2.0 * sig * sig);
    };

    std::vector<double> x0(dim);
    x0[0] = mean_z;
    for (std::size_t i = 0; i < p; ++i) x0[1 + i] = ar[i];
    for (std::size_t j = 0; j < q; ++j) x0[1 + p + j] = ma[j];
    x0[dim - 1] = sigma_z;

    std::vector<double> h(dim);
    for (std::size_t i = 0; i < dim; ++i) h[i] = 1e-3 * std::max(std::fabs(x0[i]), 0.1);

    Eigen::MatrixXd hess(dim, dim);
    const double f0 = loglik_at(x0);
    if (!std::isfinite(f0)) return std::nullopt;
    std::vector<double> v = x0;
    for (std::size_t i = 0; i < dim; ++i) {
        v = x0;
        v[i] = x0[i] + h[i];
        const double fp = loglik_at(v);
        v[i] = x0[i] - h[i];
        const double fm = loglik_at(v);
        hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = i + 1; j < dim; ++j) {
            v = x0;
            v[i] = x0[i] + h[i];
            v[j] = x0[j] + h[j];
            const double fpp = loglik_at(v);
            v[j] = x0[j] - h[j];
            const double fpm = loglik_at(v);
            v[i] = x0[i] - h[i];
            const double fmm = loglik_at(v);
            v[j] = x0[j] + h[j];
            const double fmp = loglik_at(v);
            hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
        }
    }
    if (!hess.allFinite()) return std::nullopt;

    const Eigen::MatrixXd info = -hess;
    Eigen::LLT<Eigen::MatrixXd> llt(info);
    if (llt.info() != Eigen::Success) return std::nullopt;
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(dim);
    e0(0) = 1.0;
    const double var_mean = llt.solve(e0)(0);
    if (!(var_mean > 0.0) || !std::isfinite(var_mean)) return std::nullopt;
    return std::sqrt(var_mean);
}

}  // namespace detail

/// Maximizes the conditional Gaussian likelihood over (mean, ar, ma,
/// shock_sd). The series is standardized internally, AR/MA coefficients are
/// optimized through the partial-autocorrelation transform (keeping the
/// search unconstrained), and shock_sd is restored to the exact conditional
/// maximum afterwards. (0,0) uses the closed form, so its residuals equal
/// the demeaned increments exactly.
inline ArmaFit fit(const IncrementSeries& increments, const ArmaSpec& spec) {
    const int p = spec.p, q = spec.q;
    if (p < 0 || q < 0) throw InvalidParams("fit: negative model order");
    const std::size_t n = increments.size();
    if (n < std::max<std::size_t>(static_cast<std::size_t>(p + q + 2), 10))
        throw SeriesTooShort("fit: series of length " + std::to_string(n) +
                             " too short for order (" + std::to_string(p) + "," +
                             std::to_string(q) + ")");

    const auto& x = increments.values;
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const bool all_equal =
        std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
    if (all_equal || ss == 0.0)
        throw DegenerateSeries("fit: increments are constant (zero shock variance)");
    const double sdv = std::sqrt(ss / static_cast<double>(n - 1));

    ArmaFit out;
    out.spec = spec;

    if (p == 0 && q == 0) {
        out.params.mean = mean;
        out.residuals.resize(n);
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.residuals[i] = x[i] - mean;
            ssr += out.residuals[i] * out.residuals[i];
        }
        const double sigma = std::sqrt(ssr / static_cast<double>(n));
        if (!(sigma > 0.0)) throw DegenerateSeries("fit: zero residual variance");
        out.params.shock_sd = sigma;
        out.loglik = -0.5 * static_cast<double>(n) *
                         std::log(2.0 * std::numbers::pi * sigma * sigma) -
                     ssr / (2.0 * sigma * sigma);
        out.mean_se = sigma / std::sqrt(static_cast<double>(n));
        out.aic = 2.0 * static_cast<double>(p + q + 2) - 2.0 * out.loglik;
        out.residual_stats = describe(out.residuals);
        return out;
    }

    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = (x[i] - mean) / sdv;

    const std::size_t dim = 2 + static_cast<std::size_t>(p + q);
    std::vector<double> work;
    auto objective = [&](std::span<const double> v) -> double {
        const auto ar = detail::pacf_to_ar(v.subspan(1, p));
        const auto ma = detail::pacf_to_ma(v.subspan(1 + p, q));
        detail::conditional_residuals_into(v[0], ar, ma, z, work);
        double ssr = 0.0;
        for (double e : work) ssr += e * e;
        const double log_sig = v[dim - 1];
        const double val = 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi) +
                           static_cast<double>(n) * log_sig +
                           0.5 * ssr * std::exp(-2.0 * log_sig);
        return std::isfinite(val) ? val : std::numeric_limits<double>::infinity();
    };

    // Deterministic start: demeaned series, zero coefficients, unit scale.
    NelderMeadResult best;
    bool converged = false;
    for (int attempt = 0; attempt <= 5 && !converged; ++attempt) {
        std::vector<double> start(dim, 0.0);
        if (attempt > 0) {
            Rng jitter(derive_seed(0x5eedu, static_cast<std::uint64_t>(attempt)));
            for (auto& s : start) s = jitter.uniform() - 0.5;
        }
        auto res = nelder_mead(objective, start, 0.2, 2000, 1e-9);
        if (res.value < best.value || best.x.empty()) best = std::move(res);
        converged = best.converged && std::isfinite(best.value);
    }

    const auto ar = detail::pacf_to_ar(std::span<const double>(best.x).subspan(1, p));
    const auto ma = detail::pacf_to_ma(std::span<const double>(best.x).subspan(1 + p, q));
    const double mean_z = best.x[0];

    std::vector<double> resid_z;
    detail::conditional_residuals_into(mean_z, ar, ma, z, resid_z);
    double ssr_z = 0.0;
    for (double e : resid_z) ssr_z += e * e;
    const double sigma_z = std::sqrt(ssr_z / static_cast<double>(n));
    if (!(sigma_z > 0.0)) throw DegenerateSeries("fit: zero residual variance");

    out.params.mean = mean + mean_z * sdv;
    out.params.ar = ar;
    out.params.ma = ma;
    out.params.shock_sd = sigma_z * sdv;
    out.residuals.resize(n);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.residuals[i] = resid_z[i] * sdv;
        ssr += out.residuals[i] * out.residuals[i];
    }
    const double s2 = out.params.shock_sd * out.params.shock_sd;
    out.loglik = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * s2) -
                 ssr / (2.0 * s2);
    out.aic = 2.0 * static_cast<double>(p + q + 2) - 2.0 * out.loglik;
    out.converged = converged;
    out.boundary_ma = ma_near_unit_root(ma);

    const auto se = detail::mean_se_from_information(z, mean_z, ar, ma, sigma_z);
    if (se) {
        out.mean_se = *se * sdv;
    } else {
        out.mean_se = sdv / std::sqrt(static_cast<double>(n));
        out.mean_se_fallback = true;
    }
    out.residual_stats = describe(out.residuals);

    if (!converged)
        throw ConvergenceFailure("fit: optimizer failed to converge for order (" +
                                     std::to_string(p) + "," + std::to_string(q) + ")",
                                 std::move(out));
    return out;
}

namespace detail {

/// Order preference: smaller criterion, ties broken by smaller p+q, then
/// smaller p.
inline bool order_preferred(double crit_a, int pa, int qa, double crit_b, int pb, int qb) {
    if (crit_a != crit_b) return crit_a < crit_b;
    if (pa + qa != pb + qb) return pa + qa < pb + qb;
    return pa < pb;
}

}  // namespace detail

/// Fits every order on the (0..max_p) x (0..max_q) grid and returns the
/// minimum-AIC fit, skipping orders whose fit fails.
inline ArmaFit select_order(const IncrementSeries& increments, int max_p, int max_q,
                            bool use_aicc = false) {
    if (max_p < 0 || max_q < 0) throw InvalidInput("select_order: negative grid bound");
    if (increments.size() < 10)
        throw SeriesTooShort("select_order: need at least 10 increments");

    std::optional<ArmaFit> best;
    double best_crit = std::numeric_limits<double>::infinity();
    for (int p = 0; p <= max_p; ++p) {
        for (int q = 0; q <= max_q; ++q) {
            ArmaFit candidate;
            try {
                candidate = fit(increments, ArmaSpec{p, q});
            } catch (const Error&) {
                continue;
            }
            const double crit = use_aicc ? aicc(candidate, increments.size()) : candidate.aic;
            if (!std::isfinite(crit)) continue;
            if (!best || detail::order_preferred(crit, p, q, best_crit, best->spec.p,
                                                 best->spec.q)) {
                best = std::move(candidate);
                best_crit = crit;
            }
        }
    }
    if (!best) throw AllFitsFailed("select_order: no order converged");
    return *best;
}

}  // namespace tsr
