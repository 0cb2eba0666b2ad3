#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace tsr {

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

/// Derivative-free simplex minimizer (standard reflection/expansion/
/// contraction/shrink coefficients 1, 2, 0.5, 0.5). Converged when the
/// objective spread across the simplex falls below spread_tol.
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::span<const double> start, double step,
                             int max_iter = 2000, double spread_tol = 1e-9) {
    const std::size_t dim = start.size();
    const std::size_t m = dim + 1;

    std::vector<std::vector<double>> simplex(m, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < dim; ++i) simplex[i + 1][i] += step;
    std::vector<double> fv(m);
    for (std::size_t i = 0; i < m; ++i) fv[i] = f(std::span<const double>(simplex[i]));

    std::vector<std::size_t> order(m);
    std::vector<double> centroid(dim), xr(dim), xe(dim), xc(dim);

    NelderMeadResult result;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[m - 1], second = order[m - 2];

        if (std::isfinite(fv[best]) && fv[worst] - fv[best] < spread_tol) {
            result.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
        }
        for (std::size_t j = 0; j < dim; ++j) centroid[j] /= static_cast<double>(dim);

        for (std::size_t j = 0; j < dim; ++j) xr[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        const double fr = f(std::span<const double>(xr));

        if (fr < fv[order[0]]) {
            for (std::size_t j = 0; j < dim; ++j)
                xe[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
            const double fe = f(std::span<const double>(xe));
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
        } else if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            const auto& anchor = outside ? xr : simplex[worst];
            for (std::size_t j = 0; j < dim; ++j)
                xc[j] = centroid[j] + 0.5 * (anchor[j] - centroid[j]);
            const double fc = f(std::span<const double>(xc));
            if (fc < (outside ? fr : fv[worst])) {
                simplex[worst] = xc;
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i < m; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < dim; ++j)
                        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
                    fv[i] = f(std::span<const double>(simplex[i]));
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (fv[i] < fv[best]) best = i;
    result.x = simplex[best];
    result.value = fv[best];
    result.iterations = iter;
    return result;
}

}  // namespace tsr
