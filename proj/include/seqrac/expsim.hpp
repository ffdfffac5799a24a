// Copyright 2026 The seqrac Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

/**
 * @file
 * Coincidence-count tables: synthetic generation, witness estimation and
 * Poissonian Monte Carlo error bars.
 *
 * Counts are normalised within each (x, y, z) group of four cells, so a
 * table only has to be proportional to the joint outcome probabilities.
 *
 * Random streams are std::mt19937_64 seeded through std::seed_seq from the
 * user seed and the stream's indices; Poisson variates come from
 * std::poisson_distribution. Results are reproducible for a fixed (standard
 * library, seed).
 */

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "seqrac/errors.hpp"
#include "seqrac/optics.hpp"
#include "seqrac/protocol.hpp"

namespace seqrac::expsim {

using Count = std::uint64_t;
using CountBlock = std::array<Count, kNumSettings>;

inline constexpr double kEtaMatchTol = 1e-12;

struct CountRecord {
    Setting setting;
    std::optional<double> hwp_ab_rad;
    std::optional<double> hwp_bc_rad;
    double eta_set = 0.0;
    Count count = 0;
};

struct CountTable {
    std::vector<CountRecord> records;
    std::string exposure_note;
};

namespace detail {

inline std::string group_name(std::size_t group) {
    const Setting s{unsigned(group >> 3) & 1u, unsigned(group >> 2) & 1u, unsigned(group >> 1) & 1u, 0,
                    unsigned(group) & 1u, 0};
    return "(x0,x1,y,z)=(" + std::to_string(s.x0) + "," + std::to_string(s.x1) + "," + std::to_string(s.y) + "," +
           std::to_string(s.z) + ")";
}

inline std::string format_real(double v, int digits = 12) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    for (auto &f : out) {
        while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.remove_prefix(1);
        while (!f.empty() && (f.back() == ' ' || f.back() == '\t' || f.back() == '\r')) f.remove_suffix(1);
    }
    return out;
}

template <class T>
T parse_number(std::string_view field, const char *column, std::size_t line_no) {
    T v{};
    const auto *end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw DataError("line " + std::to_string(line_no) + ": bad value '" + std::string(field) + "' in column " +
                        column);
    return v;
}

/// Independent generator for the stream identified by (seed, ids...).
template <class... Ids>
std::mt19937_64 make_stream(std::uint64_t seed, Ids... ids) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(ids)...};
    return std::mt19937_64(seq);
}

inline Count draw_poisson(std::mt19937_64 &rng, double mean) {
    if (!(mean > 0.0)) return 0;
    return static_cast<Count>(std::poisson_distribution<std::int64_t>(mean)(rng));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kCountHeader = "x0,x1,y,b,z,c,hwp_ab_rad,hwp_bc_rad,eta_set,count";

/// Leading '#' lines become the exposure note. Angle columns may be absent or empty.
inline CountTable read_count_csv(std::istream &in) {
    CountTable table;
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t, std::less<>> col;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            auto note = std::string_view(line).substr(1);
            while (!note.empty() && note.front() == ' ') note.remove_prefix(1);
            if (!table.exposure_note.empty()) table.exposure_note += '\n';
            table.exposure_note += std::string(note);
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (col.empty()) {
            for (std::size_t i = 0; i < fields.size(); ++i) col.emplace(std::string(fields[i]), i);
            for (const char *need : {"x0", "x1", "y", "b", "z", "c", "eta_set", "count"})
                if (!col.contains(need)) throw DataError(std::string("count table header lacks column ") + need);
            continue;
        }
        if (fields.size() != col.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(col.size()) +
                            " fields, got " + std::to_string(fields.size()));
        auto field = [&](const char *name) { return fields[col.find(name)->second]; };
        auto bit = [&](const char *name) {
            const auto v = detail::parse_number<unsigned>(field(name), name, line_no);
            if (v > 1) throw DataError("line " + std::to_string(line_no) + ": column " + name + " must be 0 or 1");
            return v;
        };
        auto angle = [&](const char *name) -> std::optional<double> {
            if (!col.contains(name) || field(name).empty()) return std::nullopt;
            return detail::parse_number<double>(field(name), name, line_no);
        };
        CountRecord r;
        r.setting = {bit("x0"), bit("x1"), bit("y"), bit("b"), bit("z"), bit("c")};
        r.hwp_ab_rad = angle("hwp_ab_rad");
        r.hwp_bc_rad = angle("hwp_bc_rad");
        r.eta_set = detail::parse_number<double>(field("eta_set"), "eta_set", line_no);
        if (!(r.eta_set >= 0.0 && r.eta_set <= 1.0))
            throw DataError("line " + std::to_string(line_no) + ": eta_set outside [0, 1]");
        if (!field("count").empty() && field("count").front() == '-')
            throw DataError("line " + std::to_string(line_no) + ": negative count");
        r.count = detail::parse_number<Count>(field("count"), "count", line_no);
        table.records.push_back(r);
    }
    if (col.empty()) throw DataError("count table has no header row");
    return table;
}

inline CountTable load_count_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open count table '" + path + "'");
    return read_count_csv(in);
}

inline void write_count_csv(std::ostream &out, const CountTable &table) {
    if (!table.exposure_note.empty()) {
        std::istringstream note(table.exposure_note);
        for (std::string l; std::getline(note, l);) out << "# " << l << '\n';
    }
    out << kCountHeader << '\n';
    for (const auto &r : table.records) {
        const auto &s = r.setting;
        out << s.x0 << ',' << s.x1 << ',' << s.y << ',' << s.b << ',' << s.z << ',' << s.c << ',';
        if (r.hwp_ab_rad) out << detail::format_real(*r.hwp_ab_rad);
        out << ',';
        if (r.hwp_bc_rad) out << detail::format_real(*r.hwp_bc_rad);
        out << ',' << detail::format_real(r.eta_set) << ',' << r.count << '\n';
    }
}

/// Distinct eta_set values, ascending.
inline std::vector<double> eta_sets(const CountTable &table) {
    std::vector<double> etas;
    for (const auto &r : table.records) etas.push_back(r.eta_set);
    std::sort(etas.begin(), etas.end());
    etas.erase(std::unique(etas.begin(), etas.end(),
                           [](double a, double b) { return std::abs(a - b) <= kEtaMatchTol; }),
               etas.end());
    return etas;
}

/// The 64 counts recorded at eta_set; throws DataError unless every setting appears exactly once.
inline CountBlock extract_block(const CountTable &table, double eta_set) {
    CountBlock block{};
    std::array<bool, kNumSettings> seen{};
    for (const auto &r : table.records) {
        if (std::abs(r.eta_set - eta_set) > kEtaMatchTol) continue;
        const auto i = r.setting.index();
        if (seen[i]) throw DataError("eta_set=" + detail::format_real(eta_set) + ": duplicate row " + r.setting.str());
        seen[i] = true;
        block[i] = r.count;
    }
    const auto missing = std::count(seen.begin(), seen.end(), false);
    if (missing != 0)
        throw DataError("eta_set=" + detail::format_real(eta_set) + ": incomplete block, " + std::to_string(missing) +
                        " of 64 settings missing");
    return block;
}

/// One angle pair per setting. Angles must be present and agree across eta_set blocks.
inline std::vector<optics::SettingsRow> settings_from_table(const CountTable &table) {
    std::array<std::optional<optics::SettingsRow>, kNumSettings> rows;
    for (const auto &r : table.records) {
        if (!r.hwp_ab_rad || !r.hwp_bc_rad) throw DataError("row " + r.setting.str() + " has no plate angles");
        const optics::SettingsRow row{r.setting, *r.hwp_ab_rad, *r.hwp_bc_rad};
        auto &slot = rows[r.setting.index()];
        if (!slot) {
            slot = row;
        } else if (std::abs(slot->hwp_ab_angle - row.hwp_ab_angle) > 1e-12 ||
                   std::abs(slot->hwp_bc_angle - row.hwp_bc_angle) > 1e-12) {
            throw DataError("row " + r.setting.str() + " has inconsistent plate angles");
        }
    }
    std::vector<optics::SettingsRow> out;
    for (const auto &slot : rows) {
        if (!slot) throw DataError("settings table does not cover all 64 configurations");
        out.push_back(*slot);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Simulation and estimation

/**
 * Synthetic table at strength eta: every cell is Poisson with mean
 * mean_per_group * p(b, c | x, y, z). Rows carry the standard plate angles.
 */
inline CountTable simulate_counts(double eta, double mean_per_group, std::uint64_t seed) {
    require_strength(eta);
    if (!(mean_per_group >= 0.0) || !std::isfinite(mean_per_group))
        throw DomainError("mean counts per group must be a finite non-negative number");
    const JointDistribution p = joint_distribution(eta);
    const auto angles = optics::table_settings();
    auto rng = detail::make_stream(seed);
    CountTable table;
    table.exposure_note = "synthetic: eta=" + detail::format_real(eta) +
                          " mean_per_group=" + detail::format_real(mean_per_group) + " seed=" + std::to_string(seed);
    for (std::size_t i = 0; i < kNumSettings; ++i) {
        CountRecord r;
        r.setting = Setting::from_index(i);
        r.hwp_ab_rad = angles[i].hwp_ab_angle;
        r.hwp_bc_rad = angles[i].hwp_bc_angle;
        r.eta_set = eta;
        r.count = detail::draw_poisson(rng, mean_per_group * std::max(0.0, p[i]));
        table.records.push_back(r);
    }
    return table;
}

/**
 * Per-group relative frequencies. Accepts integer counts or real weights
 * (noiseless tables). A group with no counts at all is an error.
 */
template <class T>
JointDistribution empirical_joint(const std::array<T, kNumSettings> &counts) {
    std::array<double, 16> totals{};
    for (std::size_t i = 0; i < kNumSettings; ++i) {
        if constexpr (std::is_signed_v<T>)
            if (counts[i] < T{0}) throw DataError("negative count for " + Setting::from_index(i).str());
        totals[Setting::from_index(i).group()] += double(counts[i]);
    }
    JointDistribution p;
    for (std::size_t i = 0; i < kNumSettings; ++i) {
        const auto g = Setting::from_index(i).group();
        if (!(totals[g] > 0.0)) throw DataError("group " + detail::group_name(g) + " has zero total count");
        p[i] = double(counts[i]) / totals[g];
    }
    return p;
}

template <class T>
WitnessSet estimate_witnesses(const std::array<T, kNumSettings> &counts) {
    return witnesses_from_joint(empirical_joint(counts));
}

inline WitnessSet estimate_witnesses(const CountTable &table, double eta_set) {
    return estimate_witnesses(extract_block(table, eta_set));
}

struct Estimate {
    double value = 0.0;  ///< point estimate from the observed counts
    double std = 0.0;    ///< sample standard deviation over resamples
    double mean = 0.0;   ///< sample mean over resamples
    std::size_t n_resamples = 0;
};

struct BootstrapResult {
    Estimate w_ab, w_ac, w_abc, eta_low, eta_up;
};

namespace detail {
inline void summarise(Estimate &e, const std::vector<double> &xs) {
    e.n_resamples = xs.size();
    double sum = 0.0;
    for (double x : xs) sum += x;
    e.mean = sum / double(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - e.mean) * (x - e.mean);
    e.std = std::sqrt(ss / double(xs.size() - 1));
}
}  // namespace detail

/**
 * Parametric Poisson bootstrap: each resample redraws every cell as Poisson
 * with mean equal to the observed count and re-estimates the witnesses and
 * strength bounds. Resample r uses the stream (seed, stream_id, r).
 * Resamples in which some group happens to come out empty are dropped;
 * Estimate::n_resamples counts the ones kept.
 */
inline BootstrapResult bootstrap_errors(const CountBlock &counts, std::size_t n_resamples, std::uint64_t seed,
                                        std::uint64_t stream_id = 0) {
    if (n_resamples < 2) throw DomainError("bootstrap needs at least 2 resamples");
    const WitnessSet point = estimate_witnesses(counts);
    const EtaBounds point_bounds = eta_bounds(point.w_ab, point.w_ac, RadicandPolicy::Clamp);

    std::array<std::vector<double>, 5> samples;
    for (auto &s : samples) s.reserve(n_resamples);
    CountBlock resampled;
    for (std::size_t r = 0; r < n_resamples; ++r) {
        auto rng = detail::make_stream(seed, std::uint32_t(stream_id), std::uint32_t(stream_id >> 32),
                                       std::uint32_t(r), std::uint32_t(std::uint64_t(r) >> 32));
        for (std::size_t i = 0; i < kNumSettings; ++i) resampled[i] = detail::draw_poisson(rng, double(counts[i]));
        std::array<Count, 16> totals{};
        for (std::size_t i = 0; i < kNumSettings; ++i) totals[Setting::from_index(i).group()] += resampled[i];
        if (std::find(totals.begin(), totals.end(), Count{0}) != totals.end()) continue;
        const WitnessSet w = witnesses_from_joint(empirical_joint(resampled));
        const EtaBounds eb = eta_bounds(w.w_ab, w.w_ac, RadicandPolicy::Clamp);
        samples[0].push_back(w.w_ab);
        samples[1].push_back(w.w_ac);
        samples[2].push_back(w.w_abc);
        samples[3].push_back(eb.low);
        samples[4].push_back(eb.up);
    }
    if (samples[0].size() < 2) throw DataError("fewer than 2 usable bootstrap resamples");

    BootstrapResult out;
    out.w_ab.value = point.w_ab;
    out.w_ac.value = point.w_ac;
    out.w_abc.value = point.w_abc;
    out.eta_low.value = point_bounds.low;
    out.eta_up.value = point_bounds.up;
    Estimate *fields[] = {&out.w_ab, &out.w_ac, &out.w_abc, &out.eta_low, &out.eta_up};
    for (std::size_t k = 0; k < 5; ++k) detail::summarise(*fields[k], samples[k]);
    return out;
}

inline BootstrapResult bootstrap_errors(const CountTable &table, double eta_set, std::size_t n_resamples,
                                        std::uint64_t seed) {
    return bootstrap_errors(extract_block(table, eta_set), n_resamples, seed);
}

struct AnalysisPoint {
    double eta_set = 0.0;
    Estimate w_ab, w_ac, w_abc, eta_low, eta_up;
};

struct SkippedBlock {
    double eta_set = 0.0;
    std::string reason;
};

struct AnalysisResult {
    std::vector<AnalysisPoint> points;  ///< ascending eta_set
    std::vector<SkippedBlock> skipped;
};

/// Estimates and error bars for every complete eta_set block; incomplete blocks are reported in skipped.
inline AnalysisResult analyze_table(const CountTable &table, std::size_t n_resamples, std::uint64_t seed) {
    AnalysisResult result;
    const auto etas = eta_sets(table);
    for (std::size_t k = 0; k < etas.size(); ++k) {
        CountBlock block;
        try {
            block = extract_block(table, etas[k]);
            empirical_joint(block);
        } catch (const DataError &e) {
            result.skipped.push_back({etas[k], e.what()});
            continue;
        }
        const BootstrapResult b = bootstrap_errors(block, n_resamples, seed, k);
        result.points.push_back({etas[k], b.w_ab, b.w_ac, b.w_abc, b.eta_low, b.eta_up});
    }
    return result;
}

// ---------------------------------------------------------------------------
// Analysis JSON and theory curves

inline nlohmann::json to_json(const AnalysisResult &result) {
    auto est = [](const Estimate &e) { return nlohmann::json{{"value", e.value}, {"std", e.std}}; };
    nlohmann::json arr = nlohmann::json::array();
    for (const auto &p : result.points)
        arr.push_back({{"eta_set", p.eta_set},
                       {"w_ab", est(p.w_ab)},
                       {"w_ac", est(p.w_ac)},
                       {"w_abc", est(p.w_abc)},
                       {"eta_low", est(p.eta_low)},
                       {"eta_up", est(p.eta_up)}});
    return arr;
}

/// Inverse of to_json for the serialised fields (value, std).
inline std::vector<AnalysisPoint> analysis_from_json(const nlohmann::json &arr) {
    if (!arr.is_array()) throw DataError("analysis JSON must be an array");
    std::vector<AnalysisPoint> out;
    auto est = [](const nlohmann::json &j) {
        Estimate e;
        e.value = j.at("value").get<double>();
        e.std = j.at("std").get<double>();
        return e;
    };
    try {
        for (const auto &j : arr)
            out.push_back({j.at("eta_set").get<double>(), est(j.at("w_ab")), est(j.at("w_ac")), est(j.at("w_abc")),
                           est(j.at("eta_low")), est(j.at("eta_up"))});
    } catch (const nlohmann::json::exception &e) {
        throw DataError(std::string("malformed analysis JSON: ") + e.what());
    }
    return out;
}

struct CurveRow {
    double eta = 0.0;
    double w_ab = 0.0;
    double w_ac = 0.0;
    double w_abc = 0.0;
    double tradeoff_bound = 0.0;
};

/// Closed-form witnesses on steps equally spaced strengths from 0 to 1.
inline std::vector<CurveRow> theory_curve(std::size_t steps) {
    if (steps < 2) throw DomainError("a sweep needs at least 2 steps");
    std::vector<CurveRow> rows;
    for (std::size_t k = 0; k < steps; ++k) {
        const double eta = k + 1 == steps ? 1.0 : double(k) / double(steps - 1);
        const WitnessSet w = witnesses(eta);
        rows.push_back({eta, w.w_ab, w.w_ac, w.w_abc, tradeoff_bound(w.w_ab, RadicandPolicy::Clamp)});
    }
    return rows;
}

inline constexpr std::string_view kCurveHeader = "eta,w_ab,w_ac,w_abc,tradeoff_bound";

inline void write_curve_csv(std::ostream &out, const std::vector<CurveRow> &rows) {
    out << kCurveHeader << '\n';
    for (const auto &r : rows)
        out << detail::format_real(r.eta) << ',' << detail::format_real(r.w_ab, 17) << ','
            << detail::format_real(r.w_ac, 17) << ',' << detail::format_real(r.w_abc, 17) << ','
            << detail::format_real(r.tradeoff_bound, 17) << '\n';
}

inline std::vector<CurveRow> read_curve_csv(std::istream &in) {
    std::string line;
    if (!std::getline(in, line) || detail::split(line, ',').size() != 5 ||
        line.substr(0, kCurveHeader.size()) != kCurveHeader)
        throw DataError("curve CSV must start with header " + std::string(kCurveHeader));
    std::vector<CurveRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split(line, ',');
        if (f.size() != 5) throw DataError("line " + std::to_string(line_no) + ": expected 5 fields");
        rows.push_back({detail::parse_number<double>(f[0], "eta", line_no),
                        detail::parse_number<double>(f[1], "w_ab", line_no),
                        detail::parse_number<double>(f[2], "w_ac", line_no),
                        detail::parse_number<double>(f[3], "w_abc", line_no),
                        detail::parse_number<double>(f[4], "tradeoff_bound", line_no)});
    }
    return rows;
}

}  // namespace seqrac::expsim
