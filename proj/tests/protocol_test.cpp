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

#include "seqrac/protocol.hpp"

#include <chrono>
#include <random>

#include "gtest/gtest.h"

#include "oracle.hpp"

using namespace seqrac;

namespace {

constexpr double kTol = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

std::vector<double> grid(std::size_t n) {
    std::vector<double> g;
    for (std::size_t k = 0; k < n; ++k) g.push_back(k + 1 == n ? 1.0 : double(k) / double(n - 1));
    return g;
}

}  // namespace

TEST(protocol, prepare_state_examples) {
    const auto r00 = to_bloch(prepare_state({0, 0}));
    EXPECT_NEAR(r00.x, kInvSqrt2, kTol);
    EXPECT_NEAR(r00.z, kInvSqrt2, kTol);
    const auto r10 = to_bloch(prepare_state({1, 0}));
    EXPECT_NEAR(r10.x, -kInvSqrt2, kTol);
    EXPECT_NEAR(r10.y, 0.0, kTol);
    EXPECT_NEAR(r10.z, kInvSqrt2, kTol);
    const double overlap = (prepare_state({0, 0}).matrix() * prepare_state({1, 1}).matrix()).trace().real();
    EXPECT_NEAR(overlap, 0.0, kTol);
    for (const auto x : kAllInputs) EXPECT_NEAR(std::abs(prepare_state(x).matrix().det()), 0.0, kTol);
    EXPECT_THROW(prepare_state({2, 0}), DomainError);
}

TEST(protocol, povm_and_kraus_consistency_on_grid) {
    for (double eta : grid(101)) {
        for (Basis y : {Basis::X, Basis::Z}) {
            const WeakMeasurement m(y, eta);
            EXPECT_LE(max_abs_diff(m.povm(0) + m.povm(1), C2x2::identity()), kTol);
            EXPECT_LE(max_abs_diff(m.povm(0) - m.povm(1), eta * pauli(axis_of(y))), kTol);
            for (unsigned b = 0; b < 2; ++b)
                EXPECT_LE(max_abs_diff(m.kraus(b).adjoint() * m.kraus(b), m.povm(b)), kTol) << "eta=" << eta;
        }
    }
}

TEST(protocol, strength_limits) {
    // eta = 1: each Kraus operator is the rank-1 eigenprojector.
    for (Basis y : {Basis::X, Basis::Z}) {
        const WeakMeasurement strong(y, 1.0);
        for (unsigned b = 0; b < 2; ++b) {
            EXPECT_TRUE(equal_up_to_global_phase(strong.kraus(b), projector(y, b), kTol));
            EXPECT_NEAR(std::abs(strong.kraus(b).det()), 0.0, kTol);
        }
    }
    // eta = 0: the averaged channel is the identity.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.57, 0.57);
    for (int t = 0; t < 50; ++t) {
        const auto rho = DensityMatrix::from_bloch({u(rng), u(rng), u(rng)});
        for (Basis y : {Basis::X, Basis::Z}) {
            const WeakMeasurement weak(y, 0.0);
            C2x2 sum = C2x2::zero();
            for (unsigned b = 0; b < 2; ++b) sum += weak.kraus(b) * rho.matrix() * weak.kraus(b).adjoint();
            EXPECT_LE(max_abs_diff(sum, rho.matrix()), kTol);
        }
    }
    EXPECT_THROW(WeakMeasurement(Basis::X, 1.0000001), DomainError);
    EXPECT_THROW(WeakMeasurement(Basis::X, -0.1), DomainError);
    EXPECT_THROW(WeakMeasurement(Basis::X, std::nan("")), DomainError);
}

TEST(protocol, weak_measure_projective_limit) {
    const auto out = weak_measure(prepare_state({0, 0}), WeakMeasurement(Basis::X, 1.0));
    EXPECT_NEAR(out[0].probability, 0.853553390593273762, kTol);
    EXPECT_NEAR(out[0].probability + out[1].probability, 1.0, kTol);
    ASSERT_TRUE(out[0].post_state.has_value());
    const auto r = to_bloch(*out[0].post_state);
    EXPECT_NEAR(r.x, 1.0, kTol);
    EXPECT_NEAR(r.y, 0.0, kTol);
    EXPECT_NEAR(r.z, 0.0, kTol);
}

TEST(protocol, weak_measure_zero_strength_is_uninformative) {
    const auto rho = prepare_state({0, 0});
    const auto out = weak_measure(rho, WeakMeasurement(Basis::X, 0.0));
    EXPECT_NEAR(out[0].probability, 0.5, kTol);
    C2x2 avg = C2x2::zero();
    for (const auto &o : out) avg += o.probability * o.post_state->matrix();
    EXPECT_LE(max_abs_diff(avg, rho.matrix()), kTol);
}

TEST(protocol, weak_measure_mixed_state) {
    for (double eta : {0.0, 0.3, 0.77, 1.0}) {
        const auto out = weak_measure(DensityMatrix{}, WeakMeasurement(Basis::Z, eta));
        EXPECT_NEAR(out[0].probability, 0.5, kTol);
        EXPECT_NEAR(out[1].probability, 0.5, kTol);
    }
}

TEST(protocol, weak_measure_null_event_has_no_post_state) {
    // |+> measured projectively in X never yields outcome 1.
    const auto plus = DensityMatrix::from_bloch({1.0, 0.0, 0.0});
    const auto out = weak_measure(plus, WeakMeasurement(Basis::X, 1.0));
    EXPECT_NEAR(out[1].probability, 0.0, 1e-15);
    EXPECT_FALSE(out[1].post_state.has_value());
    EXPECT_TRUE(out[0].post_state.has_value());
}

TEST(protocol, average_post_state_examples) {
    const auto rho = prepare_state({0, 0});
    EXPECT_LE(max_abs_diff(average_post_state(rho, 0.0).matrix(), rho.matrix()), kTol);
    const auto r = to_bloch(average_post_state(rho, 1.0));
    EXPECT_NEAR(r.x, 1.0 / (2.0 * std::sqrt(2.0)), kTol);
    EXPECT_NEAR(r.z, 1.0 / (2.0 * std::sqrt(2.0)), kTol);
    EXPECT_LE(max_abs_diff(average_post_state(DensityMatrix{}, 0.7).matrix(), DensityMatrix{}.matrix()), kTol);
    for (double eta : grid(21))
        for (const auto x : kAllInputs) {
            const auto shrunk = to_bloch(average_post_state(prepare_state(x), eta));
            const auto orig = to_bloch(prepare_state(x));
            EXPECT_NEAR(shrunk.x, shrink_factor(eta) * orig.x, kTol);
            EXPECT_NEAR(shrunk.y, 0.0, kTol);
            EXPECT_NEAR(shrunk.z, shrink_factor(eta) * orig.z, kTol);
        }
}

TEST(protocol, joint_distribution_examples) {
    const auto p1 = joint_distribution(1.0);
    EXPECT_NEAR(p1({0, 0, 0, 0, 0, 0}), 0.853553390593273762, kTol);
    for (double eta : grid(11)) {
        const auto p = joint_distribution(eta);
        for (std::size_t g = 0; g < 16; ++g) {
            double sum = 0.0;
            for (unsigned b = 0; b < 2; ++b)
                for (unsigned c = 0; c < 2; ++c)
                    sum += p({unsigned(g >> 3) & 1, unsigned(g >> 2) & 1, unsigned(g >> 1) & 1, b, unsigned(g) & 1, c});
            EXPECT_NEAR(sum, 1.0, kTol);
        }
    }
    // Strength zero: Bob's outcome is a fair coin independent of Charlie's.
    const auto p0 = joint_distribution(0.0);
    for (std::size_t i = 0; i < kNumSettings; ++i) {
        const auto s = Setting::from_index(i);
        if (s.y == s.z) continue;
        const double charlie = expectation(projector(basis_from_bit(s.z), s.c), prepare_state(s.input()));
        EXPECT_NEAR(p0(s), 0.5 * charlie, kTol) << s.str();
    }
}

TEST(protocol, joint_distribution_matches_oracle) {
    for (double eta : grid(101)) {
        const auto p = joint_distribution(eta);
        const auto o = oracle::joint(eta);
        for (std::size_t i = 0; i < kNumSettings; ++i) EXPECT_NEAR(p[i], o[i], kTol) << "eta=" << eta << " i=" << i;
    }
}

TEST(protocol, witness_spot_values) {
    EXPECT_NEAR(witness_ab(1.0), 0.853553390593273762, kTol);
    EXPECT_NEAR(witness_ac(1.0), 0.676776695296636881, kTol);
    EXPECT_NEAR(witness_ab(0.8), 0.782842712474619010, kTol);
    EXPECT_NEAR(witness_ac(0.8), 0.782842712474619010, kTol);
    EXPECT_NEAR(witness_ab(0.0), 0.5, kTol);
    EXPECT_NEAR(witness_ac(0.0), 0.853553390593273762, kTol);
    EXPECT_NEAR(witness_abc(kInvSqrt2), 0.5, kTol);
    EXPECT_NEAR(witness_abc(0.0), 0.426776695296636881, kTol);
    EXPECT_NEAR(witness_abc(1.0), witness_abc(0.0), kTol);
}

TEST(protocol, closed_forms_match_enumeration) {
    for (double eta : grid(101)) {
        const WitnessSet enumerated = witnesses_from_joint(joint_distribution(eta));
        const oracle::Witnesses o = oracle::witnesses(eta);
        EXPECT_NEAR(enumerated.w_ab, witness_ab(eta), kTol);
        EXPECT_NEAR(enumerated.w_ac, witness_ac(eta), kTol);
        EXPECT_NEAR(enumerated.w_abc, witness_abc(eta), kTol);
        EXPECT_NEAR(o.ab, witness_ab(eta), kTol);
        EXPECT_NEAR(o.ac, witness_ac(eta), kTol);
        EXPECT_NEAR(o.abc, witness_abc(eta), kTol);
        EXPECT_LE(witness_abc(eta), 0.5 + kTol);
    }
}

TEST(protocol, tradeoff_bound_examples) {
    EXPECT_NEAR(tradeoff_bound(0.75), 0.801776695296636881, kTol);
    EXPECT_NEAR(tradeoff_bound(kMaxWitness), 0.676776695296636881, kTol);
    EXPECT_THROW(tradeoff_bound(0.9), DomainError);
    EXPECT_NEAR(tradeoff_bound(0.9, RadicandPolicy::Clamp), (4.0 + std::sqrt(2.0)) / 8.0, kTol);
    for (double eta : grid(101)) EXPECT_NEAR(tradeoff_bound(witness_ab(eta)), witness_ac(eta), 1e-9);
}

TEST(protocol, inverse_tradeoff_bound_examples) {
    EXPECT_NEAR(inverse_tradeoff_bound(kCrossingWitness), kCrossingWitness, kTol);
    EXPECT_NEAR(inverse_tradeoff_bound(kMaxWitness), 0.5, 1e-7);
    for (double eta : grid(101)) EXPECT_NEAR(inverse_tradeoff_bound(witness_ac(eta)), witness_ab(eta), 1e-7);
    for (double w : {0.7829, 0.79, 0.82, 0.85}) EXPECT_LT(inverse_tradeoff_bound(w), w);
    for (double w : {0.70, 0.75, 0.78}) EXPECT_GT(inverse_tradeoff_bound(w), w);
    EXPECT_THROW(inverse_tradeoff_bound(0.9), DomainError);
    EXPECT_THROW(inverse_tradeoff_bound(0.45), DomainError);
    EXPECT_NEAR(inverse_tradeoff_bound(0.5), 0.5, 1e-6);
}

TEST(protocol, eta_bounds_examples) {
    const auto b = eta_bounds(witness_ab(0.6), witness_ac(0.6));
    EXPECT_NEAR(b.low, 0.6, 1e-9);
    EXPECT_NEAR(b.up, 0.6, 1e-9);
    EXPECT_NEAR(eta_lower_bound(0.75), kInvSqrt2, kTol);
    EXPECT_NEAR(eta_upper_bound(kMaxWitness), 0.0, 1e-6);
    for (double eta : grid(101)) {
        const auto e = eta_bounds(witness_ab(eta), witness_ac(eta));
        EXPECT_NEAR(e.low, eta, 1e-9);
        EXPECT_NEAR(e.up, eta, 1e-9);
    }
    EXPECT_THROW(eta_bounds(0.7, 0.9), DomainError);
    EXPECT_EQ(eta_bounds(0.7, 0.9, RadicandPolicy::Clamp).up, 0.0);
    EXPECT_EQ(eta_lower_bound(0.45), 0.0);
    EXPECT_EQ(eta_lower_bound(0.9), 1.0);
}

TEST(protocol, classical_region_escape) {
    const double hi = std::sqrt(2.0 * std::sqrt(2.0) - 2.0);
    for (int k = 1; k < 100; ++k) {
        const double eta = kInvSqrt2 + (hi - kInvSqrt2) * k / 100.0;
        EXPECT_GT(witness_ab(eta), kClassicalLimit) << eta;
        EXPECT_GT(witness_ac(eta), kClassicalLimit) << eta;
    }
    for (double eta : grid(101)) EXPECT_TRUE(witness_ab(eta) > kClassicalLimit || witness_ac(eta) > kClassicalLimit);
}

TEST(protocol, witness_chain_examples) {
    for (double eta : grid(11)) {
        const std::vector<double> one{eta};
        EXPECT_NEAR(witness_chain(one)[0], witness_ab(eta), kTol);
        const std::vector<double> two{eta, 1.0};
        const auto w = witness_chain(two);
        EXPECT_NEAR(w[0], witness_ab(eta), kTol);
        EXPECT_NEAR(w[1], witness_ac(eta), kTol);
    }
    const std::vector<double> edge{kInvSqrt2, 2.0 * (std::sqrt(2.0) - 1.0), 1.0};
    const auto w = witness_chain(edge);
    EXPECT_NEAR(w[0], 0.75, kTol);
    EXPECT_NEAR(w[1], 0.75, kTol);
    EXPECT_NEAR(w[2], 0.735400438239190733, kTol);
    EXPECT_THROW(witness_chain({}), DomainError);
    const std::vector<double> bad{0.5, 1.5};
    EXPECT_THROW(witness_chain(bad), DomainError);
}

TEST(protocol, witness_chain_matches_sequential_simulation) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> etas(1 + t % 5);
        for (auto &e : etas) e = u(rng);
        const auto closed = witness_chain(etas);
        const auto simulated = oracle::chain(etas);
        for (std::size_t k = 0; k < etas.size(); ++k) EXPECT_NEAR(closed[k], simulated[k], kTol);
    }
}

TEST(protocol, witness_chain_monotonicity_property) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    const double h = 1e-6;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> etas(2 + t % 4);
        for (auto &e : etas) e = u(rng);
        const std::size_t n = etas.size();
        const double base = witness_chain(etas).back();
        for (std::size_t i = 0; i < n; ++i) {
            auto bumped = etas;
            bumped[i] += h;
            const double diff = witness_chain(bumped).back() - base;
            if (i + 1 == n)
                EXPECT_GT(diff, 0.0);
            else
                EXPECT_LT(diff, 0.0);
        }
    }
}

TEST(protocol, three_receiver_no_go) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = three_receiver_no_go();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(r.max_third_witness, 0.75);
    EXPECT_NEAR(r.max_third_witness, three_receiver_supremum(), 1e-4);
    EXPECT_NEAR(three_receiver_supremum(), 0.735400438239190733, kTol);
    EXPECT_NEAR(r.max_third_witness, 0.7354, 1e-4);
    EXPECT_LT(secs, 10.0);
    // The optimum hugs both constraints.
    EXPECT_NEAR(r.eta1, kInvSqrt2, 1e-5);
    EXPECT_NEAR(r.eta2, 2.0 * (std::sqrt(2.0) - 1.0), 1e-5);
    const std::vector<double> at{r.eta1, r.eta2, 1.0};
    const auto w = witness_chain(at);
    EXPECT_GT(w[0], 0.75);
    EXPECT_GT(w[1], 0.75);
    EXPECT_NEAR(w[2], r.max_third_witness, kTol);
    EXPECT_EQ(three_receiver_no_go().max_third_witness, r.max_third_witness);
}

TEST(protocol, setting_index_roundtrip) {
    for (std::size_t i = 0; i < kNumSettings; ++i) EXPECT_EQ(Setting::from_index(i).index(), i);
    EXPECT_EQ((Setting{1, 0, 1, 1, 0, 1}).index(), 0b101101u);
    EXPECT_EQ((Setting{1, 0, 1, 1, 0, 1}).group(), 0b1010u);
}
