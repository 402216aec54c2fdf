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

// Composite procedures built on the two-qubit parity detector: the detector
// itself, the entangler with feed-forward, its diagonal-basis variant and the
// CNOT that chains the two through one recyclable ancilla photon.
//
// Gate procedures are templated on an OutcomeSource so that the same code
// runs with sampled outcomes (RandomOutcomes) and with forced ones
// (ScriptedOutcomes). Feed-forward is applied right after each measurement.
// A misclassified parity is not detected; the wrong correction is applied,
// which is exactly the logical-error mechanism of the detector.

#pragma once

#include <array>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/measurement.hpp"
#include "kerrqnd/optics.hpp"
#include "kerrqnd/rng.hpp"
#include "kerrqnd/state.hpp"

namespace kerrqnd {

template <class S>
concept OutcomeSource = requires(S &src, const HybridState &state, int index) {
    { src.homodyne(state, index) } -> std::convertible_to<double>;
    { src.photon(state, index) } -> std::convertible_to<Pol>;
};

/// Born-rule outcomes drawn from an explicit stream.
class RandomOutcomes {
  public:
    explicit RandomOutcomes(RngStream &rng) : rng_(&rng) {}

    double homodyne(const HybridState &state, int probe) { return sample_homodyne(state, probe, *rng_); }

    Pol photon(const HybridState &state, int qubit) {
        return rng_->uniform() < photon_probability(state, qubit, Pol::H) ? Pol::H : Pol::V;
    }

  private:
    RngStream *rng_;
};

/// Replays fixed outcomes in order. Running out is a contract error.
class ScriptedOutcomes {
  public:
    ScriptedOutcomes(std::vector<double> xs, std::vector<Pol> photons = {})
        : xs_(std::move(xs)), photons_(std::move(photons)) {}

    double homodyne(const HybridState &, int) {
        if (next_x_ >= xs_.size()) {
            throw ContractError("scripted homodyne outcomes exhausted");
        }
        return xs_[next_x_++];
    }

    Pol photon(const HybridState &, int) {
        if (next_photon_ >= photons_.size()) {
            throw ContractError("scripted photon outcomes exhausted");
        }
        return photons_[next_photon_++];
    }

  private:
    std::vector<double> xs_;
    std::vector<Pol> photons_;
    std::size_t next_x_ = 0;
    std::size_t next_photon_ = 0;
};

static_assert(OutcomeSource<RandomOutcomes>);
static_assert(OutcomeSource<ScriptedOutcomes>);

struct GateTrace {
    std::vector<HomodyneRecord> homodyne;
    std::vector<Pol> photons;
    int ancilla_consumed = 0;

    void append(const GateTrace &other) {
        homodyne.insert(homodyne.end(), other.homodyne.begin(), other.homodyne.end());
        photons.insert(photons.end(), other.photons.begin(), other.photons.end());
        ancilla_consumed += other.ancilla_consumed;
    }
};

/// One correction applied when a homodyne record has parity `when`. With
/// `in_parity_frame` set, the gate is conjugated by the basis change of a
/// diagonal-basis detector before it is applied.
struct ConditionalGate {
    Parity when = Parity::odd;
    int qubit = 0;
    bool in_parity_frame = true;
    std::function<Mat2(const HomodyneRecord &)> gate;
};

using FeedForwardPlan = std::vector<ConditionalGate>;

inline HybridState apply_feed_forward(HybridState state, const FeedForwardPlan &plan, const HomodyneRecord &record,
                                      ParityBasis basis) {
    for (const auto &action : plan) {
        if (action.when != record.parity) {
            continue;
        }
        Mat2 m = action.gate(record);
        if (action.in_parity_frame && basis == ParityBasis::diagonal) {
            m = matmul(mat::diagonal_basis_change(), matmul(m, mat::diagonal_basis_change()));
        }
        state = apply_single_qubit(state, {m, action.qubit});
    }
    return state;
}

/// Odd-outcome corrections shared by both entanglers: undo the
/// x-dependent phases e^{+-i phi} with a phase gate on qubit_a, then flip
/// qubit_b to turn HV/VH into HH/VV.
inline FeedForwardPlan entangler_plan(int qubit_a, int qubit_b) {
    return {
        {Parity::odd, qubit_a, true,
         [](const HomodyneRecord &r) { return mat::diag(std::polar(1.0, -r.phi), std::polar(1.0, r.phi)); }},
        {Parity::odd, qubit_b, true, [](const HomodyneRecord &) { return mat::bit_flip(); }},
    };
}

namespace detail {

inline void check_pair(const HybridState &state, int qubit_a, int qubit_b) {
    state.check_qubit(qubit_a);
    state.check_qubit(qubit_b);
    if (qubit_a == qubit_b) {
        throw ValidationError("parity detector needs two distinct qubits");
    }
}

}  // namespace detail

/// Two-qubit parity detector: couples both qubits to a fresh probe and
/// measures its X quadrature. No feed-forward.
template <OutcomeSource Source>
std::pair<HomodyneRecord, HybridState> parity_gate(const HybridState &state, int qubit_a, int qubit_b,
                                                   const ProbeMode &probe, ParityBasis basis, Source &src) {
    detail::check_pair(state, qubit_a, qubit_b);
    probe.validate();
    HybridState s = state;
    if (basis == ParityBasis::diagonal) {
        s = change_to_diagonal(std::move(s), {qubit_a, qubit_b});
    }
    const int index = s.add_probe(probe);
    s = apply_couplings(std::move(s), build_parity_coupling_pair(qubit_a, qubit_b, index));
    const double x = src.homodyne(s, index);
    auto [record, collapsed] = collapse_at(s, index, x);
    if (basis == ParityBasis::diagonal) {
        collapsed = change_to_diagonal(std::move(collapsed), {qubit_a, qubit_b});
    }
    return {record, std::move(collapsed)};
}

inline std::pair<HomodyneRecord, HybridState> parity_gate(const HybridState &state, int qubit_a, int qubit_b,
                                                          const ProbeMode &probe, ParityBasis basis, RngStream &rng) {
    RandomOutcomes src(rng);
    return parity_gate(state, qubit_a, qubit_b, probe, basis, src);
}

/// Parity detector followed by feed-forward; every outcome ends in the
/// even-parity form.
template <OutcomeSource Source>
std::pair<GateTrace, HybridState> entangler(const HybridState &state, int qubit_a, int qubit_b,
                                            const ProbeMode &probe, ParityBasis basis, Source &src) {
    auto [record, s] = parity_gate(state, qubit_a, qubit_b, probe, basis, src);
    s = apply_feed_forward(std::move(s), entangler_plan(qubit_a, qubit_b), record, basis);
    GateTrace trace;
    trace.homodyne.push_back(record);
    return {std::move(trace), std::move(s)};
}

inline std::pair<GateTrace, HybridState> entangler(const HybridState &state, int qubit_a, int qubit_b,
                                                   const ProbeMode &probe, ParityBasis basis, RngStream &rng) {
    RandomOutcomes src(rng);
    return entangler(state, qubit_a, qubit_b, probe, basis, src);
}

/// Entangler in the {D, Dbar} basis. On the odd outcome, after the usual
/// phase correction and (diagonal-frame) bit flip of qubit_b, `sign_qubit`
/// additionally gets |V> -> -|V>. Inside the CNOT the sign qubit is the
/// control, which is the only choice that leaves the odd branch equal to the
/// even one.
template <OutcomeSource Source>
std::pair<GateTrace, HybridState> entangler_45(const HybridState &state, int qubit_a, int qubit_b,
                                               std::optional<int> sign_qubit, const ProbeMode &probe, Source &src) {
    if (sign_qubit) {
        state.check_qubit(*sign_qubit);
    }
    auto [record, s] = parity_gate(state, qubit_a, qubit_b, probe, ParityBasis::diagonal, src);
    FeedForwardPlan plan = entangler_plan(qubit_a, qubit_b);
    if (sign_qubit) {
        plan.push_back({Parity::odd, *sign_qubit, false, [](const HomodyneRecord &) { return mat::sign_flip(); }});
    }
    s = apply_feed_forward(std::move(s), plan, record, ParityBasis::diagonal);
    GateTrace trace;
    trace.homodyne.push_back(record);
    return {std::move(trace), std::move(s)};
}

inline std::pair<GateTrace, HybridState> entangler_45(const HybridState &state, int qubit_a, int qubit_b,
                                                      std::optional<int> sign_qubit, const ProbeMode &probe,
                                                      RngStream &rng) {
    RandomOutcomes src(rng);
    return entangler_45(state, qubit_a, qubit_b, sign_qubit, probe, src);
}

/// True when `qubit` factors out of a probe-free state as (|H> + |V>)/sqrt2.
inline bool is_diagonal_ancilla(const HybridState &state, int qubit, double tol = 1e-12) {
    if (state.probe_count() != 0) {
        return false;
    }
    HybridState rotated = apply_single_qubit(state, {mat::diagonal_basis_change(), qubit});
    return squared_norm(project_photon(rotated, qubit, Pol::V)) <= tol;
}

/// Returns a measured ancilla in definite polarization `current` to
/// (|H> + |V>)/sqrt2 so it can serve the next CNOT.
inline HybridState recycle_ancilla(const HybridState &state, int ancilla, Pol current) {
    HybridState s = state;
    if (current == Pol::V) {
        s = apply_single_qubit(s, {mat::bit_flip(), ancilla});
    }
    return apply_single_qubit(s, {mat::diagonal_basis_change(), ancilla});
}

/// CNOT(control -> target) through two entanglers sharing the ancilla:
/// an {H,V} entangler on (control, ancilla), a {D,Dbar} entangler on
/// (target, ancilla) with the sign change on the control, then a
/// nondestructive {H,V} measurement of the ancilla and a target bit flip on V.
/// The ancilla photon is left in the register in the recorded polarization.
template <OutcomeSource Source>
std::pair<GateTrace, HybridState> cnot(const HybridState &state, int control, int ancilla, int target,
                                       const std::array<ProbeMode, 2> &probes, Source &src) {
    state.check_qubit(control);
    state.check_qubit(ancilla);
    state.check_qubit(target);
    if (control == ancilla || control == target || ancilla == target) {
        throw ValidationError("cnot needs three distinct qubits");
    }
    if (!is_diagonal_ancilla(state, ancilla)) {
        throw ValidationError("cnot ancilla must be prepared in (|H> + |V>)/sqrt2 with no active probe");
    }
    GateTrace trace;
    auto [first, s1] = entangler(state, control, ancilla, probes[0], ParityBasis::computational, src);
    trace.append(first);
    auto [second, s2] = entangler_45(s1, target, ancilla, control, probes[1], src);
    trace.append(second);

    const Pol outcome = src.photon(s2, ancilla);
    HybridState out = collapse_photon(s2, ancilla, outcome);
    if (outcome == Pol::V) {
        out = apply_single_qubit(out, {mat::bit_flip(), target});
    }
    trace.photons.push_back(outcome);
    return {std::move(trace), std::move(out)};
}

inline std::pair<GateTrace, HybridState> cnot(const HybridState &state, int control, int ancilla, int target,
                                              const std::array<ProbeMode, 2> &probes, RngStream &rng) {
    RandomOutcomes src(rng);
    return cnot(state, control, ancilla, target, probes, src);
}

struct CnotStep {
    int control = 0;
    int target = 0;
};

struct CircuitRun {
    std::vector<GateTrace> traces;
    HybridState state;
    int ancilla = 0;
};

/// Runs a sequence of CNOTs on an n-qubit register with a single ancilla
/// appended as qubit n and recycled between gates.
template <OutcomeSource Source>
CircuitRun run_cnot_circuit(const HybridState &input, const std::vector<CnotStep> &steps,
                            const std::array<ProbeMode, 2> &probes, Source &src) {
    if (input.probe_count() != 0) {
        throw ContractError("circuit input must not carry active probes");
    }
    const double s = std::numbers::sqrt2 / 2.0;
    const int ancilla = input.n_qubits();
    CircuitRun run{{}, append_qubit(input, s, s), ancilla};
    for (std::size_t g = 0; g < steps.size(); ++g) {
        if (steps[g].control >= ancilla || steps[g].target >= ancilla) {
            throw ValidationError("circuit step addresses a qubit outside the register");
        }
        if (g > 0) {
            run.state = recycle_ancilla(run.state, ancilla, run.traces.back().photons.back());
        }
        auto [trace, next] = cnot(run.state, steps[g].control, ancilla, steps[g].target, probes, src);
        run.traces.push_back(std::move(trace));
        run.state = std::move(next);
    }
    return run;
}

}  // namespace kerrqnd
