// Copyright 2026 The kerrqnd Authors
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

#include "kerrqnd/state.hpp"

#include <cmath>

#include "gtest/gtest.h"
#include "kerrqnd/fock_oracle.hpp"
#include "kerrqnd/rng.hpp"

using namespace kerrqnd;

namespace {

const double kH = std::sqrt(0.5);

}  // namespace

TEST(new_state, basis_state) {
    auto s = new_state({{1.0, 0.0}});
    ASSERT_EQ(s.branches().size(), 1U);
    EXPECT_EQ(s.branches()[0].basis, BasisString::parse("H"));
    EXPECT_EQ(s.branches()[0].amplitude, Complex(1.0));
    EXPECT_EQ(s.probe_count(), 0U);
}

TEST(new_state, uniform_product) {
    auto s = new_state({{kH, kH}, {kH, kH}});
    ASSERT_EQ(s.branches().size(), 4U);
    for (const auto &b : s.branches()) {
        EXPECT_NEAR(std::abs(b.amplitude - 0.5), 0.0, 1e-15);
    }
}

TEST(new_state, tensor_expansion_prunes_zeros) {
    auto s = new_state({{0.6, 0.8}, {1.0, 0.0}});
    ASSERT_EQ(s.branches().size(), 2U);
    EXPECT_NEAR(std::abs(amplitude_of(s, BasisString::parse("HH")) - 0.6), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(amplitude_of(s, BasisString::parse("VH")) - 0.8), 0.0, 1e-15);
}

TEST(new_state, rejects_bad_input) {
    EXPECT_THROW(new_state({{1.0, 1.0}}), ValidationError);
    EXPECT_THROW(new_state(std::span<const std::pair<Complex, Complex>>{}), ValidationError);
}

TEST(norm, fresh_and_single_branch) {
    EXPECT_NEAR(norm(new_state({{0.6, 0.8}, {kH, Complex(0.0, kH)}})), 1.0, 1e-15);
    HybridState s(1, {}, {Branch{0.5, BasisString::parse("H"), {}}});
    EXPECT_DOUBLE_EQ(norm(s), 0.5);
}

TEST(norm, coherent_overlap_matches_fock_oracle) {
    // |H> (|alpha> + |alpha e^{i theta}>) / sqrt2 with alpha=2, theta=0.4.
    ProbeMode probe{2.0, 0.4};
    HybridState s(1, {probe},
                  {Branch{kH, BasisString::parse("H"), {0}}, Branch{kH, BasisString::parse("H"), {1}}});
    // Frozen from an mpmath Fock-space sum at N=60.
    EXPECT_NEAR(norm(s), 1.004773345615645786795, 1e-12);
    auto dense = oracle::oracle_embed(s, 60);
    EXPECT_NEAR(std::sqrt(oracle::oracle_squared_norm(dense)), norm(s), 1e-9);
}

TEST(coherent_overlap, identical_labels_and_monotone_decay) {
    ProbeMode probe{3.0, 0.2};
    EXPECT_EQ(probe.overlap(4, 4), Complex(1.0));
    EXPECT_EQ(coherent_overlap({1.5, -0.3}, {1.5, -0.3}), Complex(1.0));
    double last = 1.0;
    for (int k = 1; k <= 15; ++k) {
        // |beta - beta'| = 2 alpha sin(k theta / 2) grows for k theta < pi.
        double mag = std::abs(probe.overlap(0, k));
        EXPECT_LT(mag, last);
        last = mag;
    }
    // Generic formula agrees with the integer-label fast path.
    EXPECT_NEAR(std::abs(coherent_overlap(probe.label(2), probe.label(-1)) - probe.overlap(2, -1)), 0.0, 1e-14);
}

TEST(merge_and_prune, sums_identical_keys) {
    HybridState s(1);
    s.add_branch({0.3, BasisString::parse("V"), {}});
    s.add_branch({0.2, BasisString::parse("V"), {}});
    ASSERT_EQ(s.branches().size(), 1U);
    EXPECT_NEAR(s.branches()[0].amplitude.real(), 0.5, 1e-15);
}

TEST(merge_and_prune, drops_and_reports_tiny_branches) {
    HybridState s(1, {}, {Branch{1.0, BasisString::parse("H"), {}}, Branch{1e-15, BasisString::parse("V"), {}}});
    auto pruned = merge_and_prune(s, 1e-12);
    ASSERT_EQ(pruned.branches().size(), 1U);
    EXPECT_NEAR(pruned.pruned_mass(), 1e-30, 1e-40);
    // No renormalization.
    EXPECT_EQ(pruned.branches()[0].amplitude, Complex(1.0));
}

TEST(merge_and_prune, identity_and_idempotence) {
    RngStream rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Branch> branches;
        ProbeMode probe{1.0, 0.3};
        for (int i = 0; i < 12; ++i) {
            double mag = rng.uniform() < 0.3 ? 1e-16 : rng.uniform();
            branches.push_back({std::polar(mag, 6.0 * rng.uniform()),
                                BasisString(static_cast<std::uint64_t>(rng.uniform() * 4)),
                                {static_cast<int>(rng.uniform() * 3) - 1}});
        }
        HybridState s(2, {probe}, branches);
        auto once = merge_and_prune(s, 1e-12);
        auto twice = merge_and_prune(once, 1e-12);
        ASSERT_EQ(once.branches().size(), twice.branches().size());
        for (std::size_t i = 0; i < once.branches().size(); ++i) {
            EXPECT_TRUE(once.branches()[i].same_key(twice.branches()[i]));
            EXPECT_EQ(once.branches()[i].amplitude, twice.branches()[i].amplitude);
        }
        EXPECT_EQ(once.pruned_mass(), twice.pruned_mass());
    }
    auto s = new_state({{0.6, 0.8}, {kH, kH}});
    auto same = merge_and_prune(s);
    ASSERT_EQ(same.branches().size(), s.branches().size());
    EXPECT_EQ(same.pruned_mass(), 0.0);
}

TEST(fidelity, examples) {
    auto bell = basis_superposition(2, {{"HH", kH}, {"VV", kH}});
    auto hh = basis_superposition(2, {{"HH", 1.0}});
    auto vv = basis_superposition(2, {{"VV", 1.0}});
    EXPECT_NEAR(fidelity(bell, bell), 1.0, 1e-15);
    EXPECT_EQ(fidelity(hh, vv), 0.0);
    EXPECT_NEAR(fidelity(bell, hh), 0.5, 1e-15);
}

TEST(fidelity, requires_measured_probes) {
    auto s = new_state({{kH, kH}});
    auto with_probe = s;
    with_probe.add_probe({1.0, 0.5});
    EXPECT_THROW(fidelity(with_probe, s), ContractError);
    EXPECT_THROW(fidelity(s, new_state({{1.0, 0.0}, {1.0, 0.0}})), ValidationError);
}

TEST(hybrid_state, branch_invariants) {
    HybridState s(2);
    s.add_probe({1.0, 0.5});
    EXPECT_THROW(s.add_branch({1.0, BasisString::parse("HH"), {}}), ValidationError);
    EXPECT_THROW(s.add_branch({Complex(NAN, 0.0), BasisString::parse("HH"), {0}}), ValidationError);
    EXPECT_THROW(s.add_branch({1.0, BasisString::parse("HHV"), {0}}), ValidationError);
    EXPECT_THROW(s.check_probe(1), ContractError);
    EXPECT_THROW(ProbeMode({-1.0, 0.5}).validate(), ValidationError);
    EXPECT_THROW(ProbeMode({1.0, 3.5}).validate(), ValidationError);
}

TEST(basis_string, parse_and_print) {
    auto b = BasisString::parse("HVVH");
    EXPECT_EQ(b.at(0), Pol::H);
    EXPECT_EQ(b.at(1), Pol::V);
    EXPECT_EQ(b.to_string(4), "HVVH");
    EXPECT_EQ(b.with(0, Pol::V).to_string(4), "VVVH");
    EXPECT_THROW(BasisString::parse("HX"), ValidationError);
}
