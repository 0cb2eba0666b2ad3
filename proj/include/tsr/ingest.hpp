#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tsr/errors.hpp"
#include "tsr/series.hpp"

namespace tsr {

namespace detail {

struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> fields;
};

/// Minimal RFC-4180-style reader: quoted fields with "" escapes, LF or CRLF
/// line endings, UTF-8 passed through. Embedded newlines in quoted fields
/// are rejected.
inline std::vector<CsvRow> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open file: " + path);

    std::vector<CsvRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        CsvRow row;
        row.line = line_no;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == '"' && field.empty()) {
                quoted = true;
            } else if (c == ',') {
                row.fields.push_back(std::move(field));
                field.clear();
            } else {
                field.push_back(c);
            }
        }
        if (quoted)
            throw ParseError(path + ": unterminated quote", line_no, row.fields.size() + 1);
        row.fields.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline void expect_header(const std::string& path, const std::vector<CsvRow>& rows,
                          const std::vector<std::string>& expected) {
    if (rows.empty()) throw ParseError(path + ": missing header row", 1, 1);
    const auto& header = rows.front();
    if (header.fields.size() != expected.size())
        throw ParseError(path + ": expected " + std::to_string(expected.size()) +
                             " header columns",
                         header.line, header.fields.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
        if (lower(trim(header.fields[i])) != expected[i])
            throw ParseError(path + ": expected header column '" + expected[i] + "'",
                             header.line, i + 1);
}

inline int parse_int(const std::string& path, const CsvRow& row, std::size_t col) {
    const std::string s = trim(row.fields[col]);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw ParseError(path + ": invalid integer '" + s + "'", row.line, col + 1);
    return value;
}

inline double parse_real(const std::string& path, const CsvRow& row, std::size_t col) {
    const std::string s = trim(row.fields[col]);
    try {
        std::size_t consumed = 0;
        const double value = std::stod(s, &consumed);
        if (consumed != s.size() || !std::isfinite(value))
            throw std::invalid_argument(s);
        return value;
    } catch (const std::exception&) {
        throw ParseError(path + ": invalid real value '" + s + "'", row.line, col + 1);
    }
}

inline void expect_columns(const std::string& path, const CsvRow& row, std::size_t n) {
    if (row.fields.size() != n)
        throw ParseError(path + ": expected " + std::to_string(n) + " fields, got " +
                             std::to_string(row.fields.size()),
                         row.line, row.fields.size() + 1);
}

}  // namespace detail

/// Splices a source unit's observations into a target unit over a closed
/// time window (predecessor-state merges).
struct AliasRule {
    std::string source_unit;
    std::string target_unit;
    int time_from = 0;
    int time_to = 0;
};

/// Long-format panel after alias resolution, keyed by unit.
struct PanelInput {
    std::map<std::string, std::map<int, double>> observations;
    std::map<std::string, std::map<std::string, double>> covariates;
};

/// Reads the panel file (header unit,time,value) plus optional alias
/// (source_unit,target_unit,time_from,time_to) and covariate
/// (unit,name,value) files. Alias donations are copied from the raw source
/// data; units that act as donors are dropped afterwards. Duplicate
/// (unit, time) pairs after splicing are an error.
inline PanelInput ingest(const std::string& panel_path, const std::string& alias_path = "",
                         const std::string& covariate_path = "") {
    PanelInput out;

    const auto rows = detail::read_csv(panel_path);
    detail::expect_header(panel_path, rows, {"unit", "time", "value"});
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        detail::expect_columns(panel_path, row, 3);
        const std::string unit = detail::trim(row.fields[0]);
        if (unit.empty()) throw ParseError(panel_path + ": empty unit id", row.line, 1);
        const int time = detail::parse_int(panel_path, row, 1);
        const double value = detail::parse_real(panel_path, row, 2);
        if (!out.observations[unit].emplace(time, value).second)
            throw DuplicateObservation(panel_path + ": duplicate observation for unit '" +
                                       unit + "' at time " + std::to_string(time));
    }

    if (!alias_path.empty()) {
        const auto alias_rows = detail::read_csv(alias_path);
        detail::expect_header(alias_path, alias_rows,
                              {"source_unit", "target_unit", "time_from", "time_to"});
        std::vector<AliasRule> rules;
        for (std::size_t r = 1; r < alias_rows.size(); ++r) {
            const auto& row = alias_rows[r];
            detail::expect_columns(alias_path, row, 4);
            AliasRule rule;
            rule.source_unit = detail::trim(row.fields[0]);
            rule.target_unit = detail::trim(row.fields[1]);
            rule.time_from = detail::parse_int(alias_path, row, 2);
            rule.time_to = detail::parse_int(alias_path, row, 3);
            if (rule.time_from > rule.time_to)
                throw ParseError(alias_path + ": time_from after time_to", row.line, 3);
            rules.push_back(std::move(rule));
        }

        // Donate from the raw source maps so one source can feed several
        // targets, then drop every donor unit.
        const auto raw = out.observations;
        for (const auto& rule : rules) {
            const auto src = raw.find(rule.source_unit);
            if (src == raw.end()) continue;
            auto& target = out.observations[rule.target_unit];
            for (const auto& [time, value] : src->second) {
                if (time < rule.time_from || time > rule.time_to) continue;
                if (!target.emplace(time, value).second)
                    throw DuplicateObservation(
                        "alias splice: unit '" + rule.target_unit + "' already has time " +
                        std::to_string(time) + " (source '" + rule.source_unit + "')");
            }
        }
        for (const auto& rule : rules) out.observations.erase(rule.source_unit);
    }

    if (!covariate_path.empty()) {
        const auto cov_rows = detail::read_csv(covariate_path);
        detail::expect_header(covariate_path, cov_rows, {"unit", "name", "value"});
        for (std::size_t r = 1; r < cov_rows.size(); ++r) {
            const auto& row = cov_rows[r];
            detail::expect_columns(covariate_path, row, 3);
            const std::string unit = detail::trim(row.fields[0]);
            const std::string name = detail::trim(row.fields[1]);
            const double value = detail::parse_real(covariate_path, row, 2);
            if (!out.covariates[unit].emplace(name, value).second)
                throw DuplicateObservation(covariate_path + ": duplicate covariate '" + name +
                                           "' for unit '" + unit + "'");
        }
    }
    return out;
}

/// Restricts a unit's observations to [from, to]; the window mechanism lets
/// structural breaks be handled a priori by the analyst.
inline void apply_window(std::map<int, double>& observations, int from, int to) {
    if (from > to) throw InvalidInput("apply_window: from after to");
    std::erase_if(observations, [&](const auto& kv) {
        return kv.first < from || kv.first > to;
    });
}

/// Builds a contiguous LevelSeries from per-unit observations. Gaps of at
/// most max_gap consecutive missing periods are filled linearly when
/// interpolate is set; anything longer (or any gap with interpolation off)
/// raises NonContiguousSeries.
inline LevelSeries to_level_series(const std::string& unit,
                                   const std::map<int, double>& observations,
                                   bool interpolate = false, int max_gap = 2) {
    if (observations.size() < 2)
        throw SeriesTooShort("unit '" + unit + "': needs at least 2 observations");

    std::vector<int> times;
    std::vector<double> values;
    std::optional<std::pair<int, double>> prev;
    for (const auto& [time, value] : observations) {
        if (prev) {
            const int missing = time - prev->first - 1;
            if (missing > 0) {
                if (!interpolate || missing > max_gap)
                    throw NonContiguousSeries("unit '" + unit + "': gap between times " +
                                              std::to_string(prev->first) + " and " +
                                              std::to_string(time));
                for (int m = 1; m <= missing; ++m) {
                    const double w = static_cast<double>(m) / static_cast<double>(missing + 1);
                    times.push_back(prev->first + m);
                    values.push_back(prev->second + w * (value - prev->second));
                }
            }
        }
        times.push_back(time);
        values.push_back(value);
        prev = {time, value};
    }
    return LevelSeries(unit, std::move(times), std::move(values));
}

}  // namespace tsr
