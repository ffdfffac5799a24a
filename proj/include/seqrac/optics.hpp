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
 * Jones-calculus model of the photonic setup: Alice's and Bob's merged
 * half-wave plate, Bob's beam-displacer Mach-Zehnder interferometer, and
 * Charlie's plate in front of a fixed linear polarizer.
 *
 * Conventions: |H> = (1, 0), |V> = (0, 1); a half-wave plate with fast axis at
 * angle a is [[cos 2a, sin 2a], [sin 2a, -cos 2a]].
 *
 * The interferometer acts diagonally in the H/V basis, so the lab encodes the
 * qubit's sigma_X eigenbasis in H/V. Operators are carried from the lab frame
 * to the protocol frame by the plate at pi/8, which is its own inverse.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "seqrac/errors.hpp"
#include "seqrac/protocol.hpp"
#include "seqrac/qmath.hpp"

namespace seqrac::optics {

inline constexpr double kPi = std::numbers::pi;

inline C2x2 hwp_matrix(double angle) {
    const double c = std::cos(2.0 * angle);
    const double s = std::sin(2.0 * angle);
    return {c, s, s, -c};
}

/// Lab (polarization) frame to protocol (qubit) frame, and back.
inline C2x2 to_protocol_frame(const C2x2 &lab) {
    const C2x2 f = hwp_matrix(kPi / 8.0);
    return f * lab * f;
}

/// HWP_COM angle that realises strength eta with the standard arm plates.
inline double theta_for_strength(double eta) {
    require_strength(eta);
    return (kPi - std::acos(std::clamp(eta, -1.0, 1.0))) / 4.0;
}

struct MziConfig {
    double theta = kPi / 4.0;
    double arm_h_angle = 0.0;
    double arm_v_angle = kPi / 4.0;
    double post_hwp_angle = kPi / 4.0;

    static MziConfig for_strength(double eta) { return {theta_for_strength(eta)}; }

    /// Equivalent layout with HWP_V at alpha, HWP_H at alpha - pi/4.
    static MziConfig for_strength(double eta, double arm_v_angle) {
        require_strength(eta);
        return {arm_v_angle - std::acos(std::clamp(eta, -1.0, 1.0)) / 4.0, arm_v_angle - kPi / 4.0, arm_v_angle,
                kPi / 4.0};
    }
};

/**
 * Interferometer without its exit plate: the first displacer routes H into
 * one arm and V into the other, each arm passes its own plate and then the
 * common plate, and the second displacer sends the first arm's V component
 * and the second arm's H component to the continuing exit.
 */
inline C2x2 mzi_core_jones(const MziConfig &cfg) {
    const C2x2 com = hwp_matrix(cfg.theta);
    const C2x2 arm_h = com * hwp_matrix(cfg.arm_h_angle);
    const C2x2 arm_v = com * hwp_matrix(cfg.arm_v_angle);
    // Column 0 is the fate of input H (first arm), column 1 of input V.
    return {0.0, arm_v(0, 1), arm_h(1, 0), 0.0};
}

/// Continuing-port Jones matrix including the exit plate, lab frame.
inline C2x2 mzi_jones(const MziConfig &cfg) { return hwp_matrix(cfg.post_hwp_angle) * mzi_core_jones(cfg); }

/// Effective operator of the interferometer in the protocol frame; K_{0|0}(eta) up to phase.
inline C2x2 mzi_operator(const MziConfig &cfg) { return to_protocol_frame(mzi_jones(cfg)); }

struct TrainConfig {
    double hwp_ab_angle = 0.0;
    MziConfig mzi;
    double hwp_bc_angle = 0.0;
};

/**
 * Full train from the source to the polarizer, lab frame. HWP_BC stands in
 * for three plates in a row: the interferometer's exit plate, Bob's basis
 * restoring plate and Charlie's analysis plate. HWP_AB likewise merges
 * Alice's two preparation plates with Bob's basis selecting plate.
 */
inline C2x2 train_jones(const TrainConfig &cfg) {
    return hwp_matrix(cfg.hwp_bc_angle) * mzi_core_jones(cfg.mzi) * hwp_matrix(cfg.hwp_ab_angle);
}

/// Amplitude for an |H> photon to pass the H-transmitting polarizer.
inline Complex train_amplitude(const TrainConfig &cfg) { return train_jones(cfg)(0, 0); }

struct SettingsRow {
    Setting setting;
    double hwp_ab_angle = 0.0;
    double hwp_bc_angle = 0.0;
};

/// Plate angles of the 64 configurations, in Setting::index() order.
inline std::array<SettingsRow, kNumSettings> table_settings() {
    // HWP_AB in units of pi/16, one entry per (x0, x1, y, b).
    static constexpr std::array<int, 16> ab{1, 5, -1, 3, -1, 3, -3, 1, -5, -1, -7, -3, -3, 1, -5, -1};
    // HWP_BC in units of pi/8, one entry per (y, b, z, c); the pattern does not depend on x.
    static constexpr std::array<int, 16> bc{2, 4, 1, 3, 0, 2, -1, 1, 3, 5, 2, 4, 1, 3, 0, 2};
    std::array<SettingsRow, kNumSettings> rows;
    for (std::size_t i = 0; i < kNumSettings; ++i)
        rows[i] = {Setting::from_index(i), ab[i >> 2] * kPi / 16.0, bc[i & 15u] * kPi / 8.0};
    return rows;
}

inline double train_probability(const SettingsRow &row, double eta) {
    const TrainConfig cfg{row.hwp_ab_angle, MziConfig::for_strength(eta), row.hwp_bc_angle};
    return std::norm(train_amplitude(cfg));
}

/// Throws VerificationError naming the row if the optics disagree with the protocol.
inline void check_train_probability(const SettingsRow &row, double eta, double tol = 1e-9) {
    const double optical = train_probability(row, eta);
    const double expected = joint_distribution(eta)(row.setting);
    if (!(std::abs(optical - expected) <= tol))
        throw VerificationError("optical train " + row.setting.str() + " at eta=" + std::to_string(eta) + " gives " +
                                std::to_string(optical) + ", protocol predicts " + std::to_string(expected));
}

struct RowDeviation {
    SettingsRow row;
    double max_deviation = 0.0;
    double worst_eta = 0.0;
};

struct AngleTableReport {
    std::vector<RowDeviation> rows;
    std::size_t checks = 0;
    double tolerance = 0.0;

    std::vector<RowDeviation> failures() const {
        std::vector<RowDeviation> out;
        std::copy_if(rows.begin(), rows.end(), std::back_inserter(out),
                     [&](const RowDeviation &r) { return !(r.max_deviation <= tolerance); });
        return out;
    }
    bool passed() const { return failures().empty(); }
};

/// rows must cover each of the 64 settings exactly once.
inline void require_settings_bijection(std::span<const SettingsRow> rows) {
    if (rows.size() != kNumSettings) throw DataError("settings table must have 64 rows");
    std::array<bool, kNumSettings> seen{};
    for (const auto &r : rows) {
        r.setting.validate();
        if (seen[r.setting.index()]) throw DataError("duplicate settings row " + r.setting.str());
        seen[r.setting.index()] = true;
    }
}

/// Compares every row at every eta against the protocol's joint distribution.
inline AngleTableReport verify_angle_table(std::span<const SettingsRow> rows, std::span<const double> etas,
                                           double tol = 1e-9) {
    require_settings_bijection(rows);
    AngleTableReport report;
    report.tolerance = tol;
    if (etas.empty()) return report;
    std::vector<JointDistribution> oracle;
    oracle.reserve(etas.size());
    for (double eta : etas) oracle.push_back(joint_distribution(eta));
    for (const auto &row : rows) {
        RowDeviation dev{row};
        for (std::size_t k = 0; k < etas.size(); ++k) {
            const double d = std::abs(train_probability(row, etas[k]) - oracle[k](row.setting));
            if (!(d <= dev.max_deviation)) dev.max_deviation = d, dev.worst_eta = etas[k];
            ++report.checks;
        }
        report.rows.push_back(dev);
    }
    return report;
}

}  // namespace seqrac::optics
