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

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "kerrqnd/kerrqnd.hpp"

namespace kerrqnd::testing {

inline const double kH = std::numbers::sqrt2 / 2.0;

/// Haar-random single-qubit amplitudes.
inline std::pair<Complex, Complex> random_qubit(RngStream &rng) {
    double t = std::acos(2.0 * rng.uniform() - 1.0) / 2.0;
    return {std::cos(t), std::polar(std::sin(t), 2.0 * std::numbers::pi * rng.uniform())};
}

/// A homodyne value at the centre of the peak for `parity`, shifted by `offset`.
/// With alpha theta^2 large the classification is then certain.
inline double forced_x(const ProbeMode &probe, Parity parity, double offset = 0.0) {
    double peak = parity == Parity::even ? 2.0 * probe.alpha : 2.0 * probe.alpha * std::cos(probe.theta);
    return peak + offset;
}

/// Ideal CNOT(0 -> 2) with the ancilla (qubit 1) in polarization `ancilla`.
inline HybridState ideal_cnot_with_ancilla(std::pair<Complex, Complex> c, std::pair<Complex, Complex> d, Pol ancilla) {
    HybridState ideal = reference::ideal_cnot(new_state({c, {1.0, 0.0}, d}), 0, 2);
    if (ancilla == Pol::V) {
        ideal = apply_single_qubit(ideal, {mat::bit_flip(), 1});
    }
    return ideal;
}

/// Runs cnot on c (x) D (x) d with both homodyne records forced into the
/// given sectors and the ancilla photon outcome forced to `photon`.
inline std::pair<GateTrace, HybridState> forced_cnot(std::pair<Complex, Complex> c, std::pair<Complex, Complex> d,
                                                     const ProbeMode &probe, Parity first, Parity second, Pol photon,
                                                     double offset1 = 0.0, double offset2 = 0.0) {
    ScriptedOutcomes src({forced_x(probe, first, offset1), forced_x(probe, second, offset2)}, {photon});
    return cnot(new_state({c, {kH, kH}, d}), 0, 1, 2, {probe, probe}, src);
}

/// Haar-random 2x2 unitary.
inline Mat2 random_unitary(RngStream &rng) {
    auto [a, b] = random_qubit(rng);
    Complex g = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
    return {a, -g * std::conj(b), b, g * std::conj(a)};
}

struct OracleTrial {
    double state_fidelity = 0.0;
    double density_deviation = 0.0;
};

/// Random two-qubit circuit of cross-Kerr kicks and single-qubit gates with
/// alpha <= 3, run in the branch model and in the truncated Fock oracle.
inline OracleTrial run_oracle_trial(RngStream &rng, int ops = 8, int grid_points = 241) {
    const ProbeMode probe{0.2 + 2.8 * rng.uniform(), 0.05 + 3.0 * rng.uniform()};
    HybridState s = new_state({random_qubit(rng), random_qubit(rng)});
    const int index = s.add_probe(probe);
    const int n_trunc = oracle::required_truncation(probe.alpha) + 10;
    oracle::FockOracleState f = oracle::oracle_embed(s, n_trunc);
    for (int op = 0; op < ops; ++op) {
        int qubit = rng.uniform() < 0.5 ? 0 : 1;
        if (rng.uniform() < 0.5) {
            KerrCoupling c{qubit, rng.uniform() < 0.5 ? Pol::H : Pol::V, index, rng.uniform() < 0.5 ? 1 : -1};
            s = apply_cross_kerr(s, c);
            f = oracle::oracle_cross_kerr(f, c);
        } else {
            SingleQubitGate g{random_unitary(rng), qubit};
            s = apply_single_qubit(s, g);
            f = oracle::oracle_single_qubit(f, g);
        }
    }
    OracleTrial t;
    t.state_fidelity = oracle::oracle_fidelity(oracle::oracle_embed(s, n_trunc), f);
    auto p_branch = outcome_density(s, index);
    auto p_oracle = oracle::oracle_homodyne_density(f, index);
    const double lo = -2.0 * probe.alpha - 8.0;
    const double hi = 2.0 * probe.alpha + 8.0;
    for (int i = 0; i < grid_points; ++i) {
        double x = lo + (hi - lo) * i / (grid_points - 1);
        t.density_deviation = std::max(t.density_deviation, std::abs(p_branch(x) - p_oracle(x)));
    }
    return t;
}

}  // namespace kerrqnd::testing
