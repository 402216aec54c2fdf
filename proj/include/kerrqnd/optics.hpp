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

// Unitary primitives on the qubit level. The PBS -> which-path -> Kerr -> PBS
// sandwich is modelled directly as a conditional phase kick on the probe label
// of every branch whose chosen rail holds the photon.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/state.hpp"

namespace kerrqnd {

/// Row-major 2x2 acting on (H, V) amplitudes: new_H = m[0] H + m[1] V,
/// new_V = m[2] H + m[3] V.
using Mat2 = std::array<Complex, 4>;

inline Mat2 matmul(const Mat2 &a, const Mat2 &b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

inline bool is_unitary(const Mat2 &m, double tol = 1e-12) {
    // U U^dagger
    Complex d0 = std::norm(m[0]) + std::norm(m[1]);
    Complex d1 = std::norm(m[2]) + std::norm(m[3]);
    Complex off = m[0] * std::conj(m[2]) + m[1] * std::conj(m[3]);
    return std::abs(d0 - 1.0) <= tol && std::abs(d1 - 1.0) <= tol && std::abs(off) <= tol;
}

namespace mat {

inline Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
inline Mat2 bit_flip() { return {0.0, 1.0, 1.0, 0.0}; }
/// |V> -> -|V>.
inline Mat2 sign_flip() { return {1.0, 0.0, 0.0, -1.0}; }
/// H -> (H+V)/sqrt2, V -> (H-V)/sqrt2: the {H,V} <-> {D, Dbar} basis change.
inline Mat2 diagonal_basis_change() {
    const double s = std::numbers::sqrt2 / 2.0;
    return {s, s, s, -s};
}
inline Mat2 diag(Complex h, Complex v) { return {h, 0.0, 0.0, v}; }
inline Mat2 phase(double phi) { return diag(1.0, std::polar(1.0, phi)); }

}  // namespace mat

struct SingleQubitGate {
    Mat2 matrix;
    int qubit = 0;
};

enum class ParityBasis { computational, diagonal };

struct KerrCoupling {
    int qubit = 0;
    Pol trigger = Pol::V;
    int probe = 0;
    int sign = +1;
};

inline HybridState apply_single_qubit(const HybridState &state, const SingleQubitGate &gate) {
    state.check_qubit(gate.qubit);
    if (!is_unitary(gate.matrix)) {
        throw ValidationError("single-qubit gate matrix is not unitary");
    }
    const auto &m = gate.matrix;
    std::vector<Branch> out;
    out.reserve(state.branches().size() * 2);
    for (const auto &b : state.branches()) {
        // The column of m selected by the branch's current label.
        int col = b.basis.at(gate.qubit) == Pol::H ? 0 : 1;
        Complex to_h = m[static_cast<std::size_t>(col)];
        Complex to_v = m[static_cast<std::size_t>(2 + col)];
        if (to_h != Complex(0.0, 0.0)) {
            out.push_back({b.amplitude * to_h, b.basis.with(gate.qubit, Pol::H), b.phase_units});
        }
        if (to_v != Complex(0.0, 0.0)) {
            out.push_back({b.amplitude * to_v, b.basis.with(gate.qubit, Pol::V), b.phase_units});
        }
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    HybridState next(state.n_qubits(), std::move(probes), std::move(out), state.pruned_mass());
    return merge_and_prune(next);
}

inline HybridState apply_cross_kerr(const HybridState &state, const KerrCoupling &coupling) {
    state.check_probe(coupling.probe);
    state.check_qubit(coupling.qubit);
    if (coupling.sign != 1 && coupling.sign != -1) {
        throw ValidationError("cross-Kerr sign must be +1 or -1");
    }
    std::vector<Branch> out(state.branches().begin(), state.branches().end());
    for (auto &b : out) {
        if (b.basis.at(coupling.qubit) == coupling.trigger) {
            b.phase_units[static_cast<std::size_t>(coupling.probe)] += coupling.sign;
        }
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    return HybridState(state.n_qubits(), std::move(probes), std::move(out), state.pruned_mass());
}

/// +theta on qubit_a's H rail, -theta on qubit_b's H rail: HH and VV get no
/// net kick, HV gets +theta, VH gets -theta. The diagonal-basis detector uses
/// the same couplings inside a basis-change conjugation (see parity gates).
inline std::vector<KerrCoupling> build_parity_coupling_pair(int qubit_a, int qubit_b, int probe) {
    if (qubit_a == qubit_b) {
        throw ValidationError("parity coupling needs two distinct qubits");
    }
    return {KerrCoupling{qubit_a, Pol::H, probe, +1}, KerrCoupling{qubit_b, Pol::H, probe, -1}};
}

inline HybridState apply_couplings(HybridState state, const std::vector<KerrCoupling> &couplings) {
    for (const auto &c : couplings) {
        state = apply_cross_kerr(state, c);
    }
    return state;
}

/// Applies the D-basis change to each listed qubit. The change is its own
/// inverse.
inline HybridState change_to_diagonal(HybridState state, std::initializer_list<int> qubits) {
    for (int q : qubits) {
        state = apply_single_qubit(state, {mat::diagonal_basis_change(), q});
    }
    return state;
}

}  // namespace kerrqnd
