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
 * The sequential 2->1 quantum random access code: Alice prepares one of four
 * square-configuration qubit states, Bob applies a weak two-outcome
 * measurement of tunable strength eta, Charlie measures projectively.
 *
 * Closed-form witnesses live next to the density-matrix pipeline that they
 * summarise so that the two can be checked against each other.
 */

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqrac/errors.hpp"
#include "seqrac/qmath.hpp"

namespace seqrac {

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline constexpr double kClassicalLimit = 0.75;
/// Largest W_AB any qubit strategy reaches, 1/2 + sqrt(2)/4.
inline constexpr double kMaxWitness = 0.5 + kSqrt2 / 4.0;
/// W_AB = W_AC at eta = 4/5; above this W_AC exceeds W_AB.
inline constexpr double kCrossingWitness = 0.5 + kSqrt2 / 5.0;
inline constexpr double kRadicandTol = 1e-12;

enum class Basis : unsigned { X = 0, Z = 1 };

constexpr Basis basis_from_bit(unsigned bit) { return bit == 0 ? Basis::X : Basis::Z; }
constexpr Axis axis_of(Basis b) { return b == Basis::X ? Axis::X : Axis::Z; }

inline void require_bit(unsigned v, const char *name) {
    if (v > 1) throw DomainError(std::string(name) + " must be 0 or 1");
}

inline void require_strength(double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("measurement strength must lie in [0, 1]");
}

struct InputPair {
    unsigned x0 = 0;
    unsigned x1 = 0;

    constexpr unsigned bit(unsigned position) const { return position == 0 ? x0 : x1; }
    friend constexpr bool operator==(const InputPair &, const InputPair &) = default;
};

inline constexpr std::array<InputPair, 4> kAllInputs{{{0, 0}, {0, 1}, {1, 0}, {1, 1}}};

/**
 * One full configuration (x0, x1, y, b, z, c): Alice's bits, Bob's basis and
 * outcome, Charlie's basis and outcome. Packed index = x0 x1 y b z c read as a
 * six-bit binary number, which is also the row order of the settings table.
 */
struct Setting {
    unsigned x0 = 0, x1 = 0, y = 0, b = 0, z = 0, c = 0;

    constexpr std::size_t index() const { return (x0 << 5) | (x1 << 4) | (y << 3) | (b << 2) | (z << 1) | c; }
    static constexpr Setting from_index(std::size_t i) {
        return {unsigned(i >> 5) & 1u, unsigned(i >> 4) & 1u, unsigned(i >> 3) & 1u,
                unsigned(i >> 2) & 1u, unsigned(i >> 1) & 1u, unsigned(i) & 1u};
    }
    constexpr InputPair input() const { return {x0, x1}; }
    /// Index of the (x, y, z) normalisation group, 0..15.
    constexpr std::size_t group() const { return (x0 << 3) | (x1 << 2) | (y << 1) | z; }

    void validate() const {
        require_bit(x0, "x0");
        require_bit(x1, "x1");
        require_bit(y, "y");
        require_bit(b, "b");
        require_bit(z, "z");
        require_bit(c, "c");
    }

    std::string str() const {
        std::string s = "(x0,x1,y,b,z,c)=(";
        for (unsigned v : {x0, x1, y, b, z, c}) s += char('0' + v), s += ',';
        s.back() = ')';
        return s;
    }
    friend constexpr bool operator==(const Setting &, const Setting &) = default;
};

inline constexpr std::size_t kNumSettings = 64;

/// rho_x = (1 + (-1)^x0 sigma_X / sqrt2 + (-1)^x1 sigma_Z / sqrt2) / 2.
inline DensityMatrix prepare_state(InputPair x) {
    require_bit(x.x0, "x0");
    require_bit(x.x1, "x1");
    const double sx = x.x0 == 0 ? 1.0 : -1.0;
    const double sz = x.x1 == 0 ? 1.0 : -1.0;
    return DensityMatrix::from_bloch({sx / kSqrt2, 0.0, sz / kSqrt2});
}

/// Projector onto the (-1)^outcome eigenspace of sigma_basis.
inline C2x2 projector(Basis basis, unsigned outcome) {
    const double sign = outcome == 0 ? 1.0 : -1.0;
    return 0.5 * (C2x2::identity() + sign * pauli(axis_of(basis)));
}

/**
 * Weak measurement of sigma_X or sigma_Z with strength eta in [0, 1].
 *
 *   M_b = (1 + (-1)^b eta sigma) / 2
 *   K_b = ((cos mu + sin mu) 1 + (-1)^b (cos mu - sin mu) sigma) / 2,  mu = arccos(eta) / 2
 *
 * eta = 1 is the projective measurement, eta = 0 leaves every state alone.
 */
class WeakMeasurement {
  public:
    WeakMeasurement(Basis basis, double eta) : basis_(basis), eta_(eta) {
        require_strength(eta);
        mu_ = 0.5 * std::acos(std::clamp(eta, -1.0, 1.0));
    }

    Basis basis() const { return basis_; }
    double eta() const { return eta_; }
    double mu() const { return mu_; }

    C2x2 povm(unsigned outcome) const {
        const double sign = outcome == 0 ? 1.0 : -1.0;
        return 0.5 * (C2x2::identity() + (sign * eta_) * pauli(axis_of(basis_)));
    }

    C2x2 kraus(unsigned outcome) const {
        const double sign = outcome == 0 ? 1.0 : -1.0;
        const double c = std::cos(mu_);
        const double s = std::sin(mu_);
        return 0.5 * ((c + s) * C2x2::identity() + (sign * (c - s)) * pauli(axis_of(basis_)));
    }

  private:
    Basis basis_;
    double eta_;
    double mu_ = 0.0;
};

struct MeasurementOutcome {
    unsigned bit = 0;
    double probability = 0.0;
    /// Empty when the outcome has (numerically) zero probability.
    std::optional<DensityMatrix> post_state;
};

inline constexpr double kNullEventProbability = 1e-15;

inline std::array<MeasurementOutcome, 2> weak_measure(const DensityMatrix &rho, const WeakMeasurement &m) {
    std::array<MeasurementOutcome, 2> out;
    for (unsigned b = 0; b < 2; ++b) {
        const C2x2 k = m.kraus(b);
        out[b].bit = b;
        out[b].probability = expectation(m.povm(b), rho);
        if (out[b].probability >= kNullEventProbability)
            out[b].post_state = DensityMatrix::from_unnormalized(k * rho.matrix() * k.adjoint());
    }
    return out;
}

/// State seen by a receiver who ignores Bob's basis and outcome: (1/2) sum_{y,b} K rho K^dagger.
inline DensityMatrix average_post_state(const DensityMatrix &rho, double eta) {
    C2x2 acc = C2x2::zero();
    for (Basis y : {Basis::X, Basis::Z}) {
        const WeakMeasurement m(y, eta);
        for (unsigned b = 0; b < 2; ++b) {
            const C2x2 k = m.kraus(b);
            acc += k * rho.matrix() * k.adjoint();
        }
    }
    return DensityMatrix::from_unnormalized(0.5 * acc);
}

/// Factor by which Bob's averaged channel shortens the Bloch vector.
inline double shrink_factor(double eta) { return 0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - eta * eta))); }

/**
 * p(b, c | x, y, z) for every configuration, indexed by Setting::index().
 * Values are conditional on (x, y, z), so each 4-entry group sums to one.
 */
class JointDistribution {
  public:
    JointDistribution() = default;
    explicit JointDistribution(const std::array<double, kNumSettings> &p) : p_(p) {}

    double operator()(const Setting &s) const { return p_[s.index()]; }
    double &operator[](std::size_t index) { return p_[index]; }
    double operator[](std::size_t index) const { return p_[index]; }
    const std::array<double, kNumSettings> &values() const { return p_; }

  private:
    std::array<double, kNumSettings> p_{};
};

/// Runs prepare -> weak measure -> projective measure for every configuration.
inline JointDistribution joint_distribution(double eta) {
    require_strength(eta);
    JointDistribution dist;
    for (std::size_t i = 0; i < kNumSettings; ++i) {
        const Setting s = Setting::from_index(i);
        const DensityMatrix rho = prepare_state(s.input());
        const C2x2 k = WeakMeasurement(basis_from_bit(s.y), eta).kraus(s.b);
        const C2x2 after_bob = k * rho.matrix() * k.adjoint();
        dist[i] = (projector(basis_from_bit(s.z), s.c) * after_bob).trace().real();
    }
    return dist;
}

struct WitnessSet {
    double w_ab = 0.0;
    double w_ac = 0.0;
    double w_abc = 0.0;
};

/**
 * Decoding success rates from a table of conditional joint probabilities:
 * W_AB averages p(b = x_y | x, y), W_AC averages p(c = x_z | x, z), and W_ABC
 * averages p(b = x_y, c = x_z | x, y, z != y). Marginals over the unused
 * party's choice are uniform.
 */
inline WitnessSet witnesses_from_joint(const JointDistribution &p) {
    WitnessSet w;
    for (const InputPair x : kAllInputs) {
        for (unsigned y = 0; y < 2; ++y)
            for (unsigned z = 0; z < 2; ++z)
                for (unsigned c = 0; c < 2; ++c) w.w_ab += p({x.x0, x.x1, y, x.bit(y), z, c}) / 16.0;
        for (unsigned z = 0; z < 2; ++z)
            for (unsigned y = 0; y < 2; ++y)
                for (unsigned b = 0; b < 2; ++b) w.w_ac += p({x.x0, x.x1, y, b, z, x.bit(z)}) / 16.0;
        for (unsigned y = 0; y < 2; ++y) {
            const unsigned z = 1 - y;
            w.w_abc += p({x.x0, x.x1, y, x.bit(y), z, x.bit(z)}) / 8.0;
        }
    }
    return w;
}

inline double witness_ab(double eta) {
    require_strength(eta);
    return 0.5 + kSqrt2 / 4.0 * eta;
}

inline double witness_ac(double eta) {
    require_strength(eta);
    return 0.5 + kSqrt2 / 4.0 * shrink_factor(eta);
}

inline double witness_abc(double eta) {
    require_strength(eta);
    return 0.25 * (1.0 + (eta + std::sqrt(std::max(0.0, 1.0 - eta * eta))) / kSqrt2);
}

inline WitnessSet witnesses(double eta) { return {witness_ab(eta), witness_ac(eta), witness_abc(eta)}; }

/// How formulas treat a radicand that falls below zero.
enum class RadicandPolicy {
    Strict,  ///< below -kRadicandTol is a DomainError, tiny negatives clamp to zero
    Clamp,   ///< always clamp to zero; used on noisy estimates
};

namespace detail {
inline double checked_sqrt(double radicand, RadicandPolicy policy, const char *what) {
    if (policy == RadicandPolicy::Strict && radicand < -kRadicandTol)
        throw DomainError(std::string(what) + ": witness outside the quantum-achievable range");
    return std::sqrt(std::max(0.0, radicand));
}
}  // namespace detail

/// Largest W_AC compatible with an observed W_AB.
inline double tradeoff_bound(double w_ab, RadicandPolicy policy = RadicandPolicy::Strict) {
    const double r = 16.0 * w_ab - 16.0 * w_ab * w_ab - 2.0;
    return (4.0 + kSqrt2 + detail::checked_sqrt(r, policy, "tradeoff_bound")) / 8.0;
}

/// Largest W_AB compatible with an observed W_AC.
inline double inverse_tradeoff_bound(double w_ac, RadicandPolicy policy = RadicandPolicy::Strict) {
    const double r = 4.0 * (4.0 + kSqrt2) * w_ac - 16.0 * w_ac * w_ac - 4.0 - 2.0 * kSqrt2;
    return 0.5 * (1.0 + detail::checked_sqrt(r, policy, "inverse_tradeoff_bound"));
}

struct EtaBounds {
    double low = 0.0;
    double up = 1.0;
};

inline double eta_lower_bound(double w_ab) { return std::clamp(kSqrt2 * (2.0 * w_ab - 1.0), 0.0, 1.0); }

inline double eta_upper_bound(double w_ac, RadicandPolicy policy = RadicandPolicy::Strict) {
    const double r = (2.0 + kSqrt2 - 4.0 * w_ac) * (2.0 * w_ac - 1.0);
    return std::clamp(2.0 * detail::checked_sqrt(r, policy, "eta_upper_bound"), 0.0, 1.0);
}

/// Self-test interval for Bob's strength; tight when the witnesses are optimal.
inline EtaBounds eta_bounds(double w_ab, double w_ac, RadicandPolicy policy = RadicandPolicy::Strict) {
    return {eta_lower_bound(w_ab), eta_upper_bound(w_ac, policy)};
}

/**
 * Witness of each receiver in a chain where every receiver weakly measures a
 * random basis and forwards the post-measurement state. Entry k is
 * 1/2 + sqrt2/4 * eta_k * prod_{i<k} shrink_factor(eta_i).
 */
inline std::vector<double> witness_chain(std::span<const double> etas) {
    if (etas.empty()) throw DomainError("witness_chain needs at least one receiver");
    std::vector<double> out;
    out.reserve(etas.size());
    double shrink = 1.0;
    for (double eta : etas) {
        require_strength(eta);
        out.push_back(0.5 + kSqrt2 / 4.0 * eta * shrink);
        shrink *= shrink_factor(eta);
    }
    return out;
}

struct NoGoResult {
    double max_third_witness = 0.0;
    double eta1 = 0.0;
    double eta2 = 0.0;
};

/// Closed-form supremum of the third receiver's witness when the first two beat 3/4.
inline double three_receiver_supremum() {
    return 0.5 + (kSqrt2 + 1.0) * (1.0 + std::sqrt(8.0 * kSqrt2 - 11.0)) / 16.0;
}

/**
 * Maximises W_AR3(eta1, eta2, 1) over eta1, eta2 subject to W_AR1 > 3/4 and
 * W_AR2 > 3/4. Deterministic grid search: step 1e-3 over the unit square, then
 * step 1e-6 over a +-2e-3 window around the coarse optimum.
 */
inline NoGoResult three_receiver_no_go() {
    auto third = [](double e1, double e2) -> std::optional<double> {
        const double s1 = shrink_factor(e1);
        if (0.5 + kSqrt2 / 4.0 * e1 <= kClassicalLimit) return std::nullopt;
        if (0.5 + kSqrt2 / 4.0 * e2 * s1 <= kClassicalLimit) return std::nullopt;
        return 0.5 + kSqrt2 / 4.0 * s1 * shrink_factor(e2);
    };
    NoGoResult best;
    auto scan = [&](double lo1, double lo2, double span, double step) {
        const long n = std::lround(span / step);
        for (long i = 0; i <= n; ++i) {
            const double e1 = lo1 + double(i) * step;
            if (e1 < 0.0 || e1 > 1.0) continue;
            for (long j = 0; j <= n; ++j) {
                const double e2 = lo2 + double(j) * step;
                if (e2 < 0.0 || e2 > 1.0) continue;
                if (auto w = third(e1, e2); w && *w > best.max_third_witness) best = {*w, e1, e2};
            }
        }
    };
    scan(0.0, 0.0, 1.0, 1e-3);
    const double window = 2e-3;
    scan(best.eta1 - window, best.eta2 - window, 2.0 * window, 1e-6);
    return best;
}

}  // namespace seqrac
