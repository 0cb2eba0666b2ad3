#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "tsr/errors.hpp"

namespace tsr {

/// A unit's welfare levels on a strictly increasing integer time index
/// (typically years). Immutable after construction.
struct LevelSeries {
    std::string unit_id;
    std::vector<int> times;
    std::vector<double> values;

    LevelSeries(std::string id, std::vector<int> t, std::vector<double> v)
        : unit_id(std::move(id)), times(std::move(t)), values(std::move(v)) {
        if (times.size() != values.size())
            throw LengthMismatch("LevelSeries: times and values differ in length");
        if (values.size() < 2)
            throw SeriesTooShort("LevelSeries requires at least 2 observations, got " +
                                 std::to_string(values.size()));
        for (std::size_t i = 1; i < times.size(); ++i)
            if (times[i] <= times[i - 1])
                throw InvalidInput("LevelSeries: time index must be strictly increasing");
        for (double v : values)
            if (!std::isfinite(v)) throw InvalidInput("LevelSeries: non-finite value");
    }

    std::size_t size() const { return values.size(); }
};

/// First differences of a level series; each increment is indexed by the
/// later endpoint of the pair it was computed from.
struct IncrementSeries {
    std::string unit_id;
    std::vector<int> times;
    std::vector<double> values;

    IncrementSeries(std::string id, std::vector<int> t, std::vector<double> v)
        : unit_id(std::move(id)), times(std::move(t)), values(std::move(v)) {
        if (times.size() != values.size())
            throw LengthMismatch("IncrementSeries: times and values differ in length");
        if (values.empty()) throw SeriesTooShort("IncrementSeries requires at least 1 increment");
        for (double x : values)
            if (!std::isfinite(x)) throw InvalidInput("IncrementSeries: non-finite value");
    }

    std::size_t size() const { return values.size(); }
};

inline IncrementSeries difference(const LevelSeries& series) {
    std::vector<int> t(series.times.begin() + 1, series.times.end());
    std::vector<double> d(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        d[i] = series.values[i + 1] - series.values[i];
    return IncrementSeries(series.unit_id, std::move(t), std::move(d));
}

/// Cumulative sum of increments starting from an initial level; inverse of
/// difference (the initial observation is placed one step before the first
/// increment's time).
inline LevelSeries integrate(const IncrementSeries& increments, double initial_level) {
    std::vector<int> t;
    std::vector<double> v;
    t.reserve(increments.size() + 1);
    v.reserve(increments.size() + 1);
    t.push_back(increments.times.front() - 1);
    v.push_back(initial_level);
    double level = initial_level;
    for (std::size_t i = 0; i < increments.size(); ++i) {
        level += increments.values[i];
        t.push_back(increments.times[i]);
        v.push_back(level);
    }
    return LevelSeries(increments.unit_id, std::move(t), std::move(v));
}

}  // namespace tsr
