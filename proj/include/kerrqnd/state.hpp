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

// Joint state of polarization qubits and coherent probe beams.
//
// Every cross-Kerr interaction maps a coherent probe |alpha> to another
// coherent state |alpha e^{ik theta}>, so the joint state stays a finite
// superposition of (polarization basis string) x (coherent label per probe).
// A label is stored as the integer k; the probe carries alpha and theta.
// Different labels are not orthogonal, so the norm and every Born
// probability include the coherent overlaps between same-basis branches.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kerrqnd/errors.hpp"

namespace kerrqnd {

using Complex = std::complex<double>;

inline constexpr double kDefaultPruneEpsilon = 1e-14;
inline constexpr double kNormTolerance = 1e-12;
inline constexpr int kMaxQubits = 64;

enum class Pol : std::uint8_t { H = 0, V = 1 };

inline constexpr Pol flipped(Pol p) { return p == Pol::H ? Pol::V : Pol::H; }
inline constexpr char to_char(Pol p) { return p == Pol::H ? 'H' : 'V'; }

/// Polarization labels of all qubits packed into a bit mask (bit q set = V).
class BasisString {
  public:
    constexpr BasisString() = default;
    constexpr explicit BasisString(std::uint64_t bits) : bits_(bits) {}

    /// Parses "HVV...", qubit 0 first.
    static BasisString parse(std::string_view labels) {
        if (labels.size() > static_cast<std::size_t>(kMaxQubits)) {
            throw ValidationError("basis string longer than 64 qubits");
        }
        std::uint64_t bits = 0;
        for (std::size_t q = 0; q < labels.size(); ++q) {
            if (labels[q] == 'V') {
                bits |= std::uint64_t{1} << q;
            } else if (labels[q] != 'H') {
                throw ValidationError("basis label must be H or V, got '" + std::string(1, labels[q]) + "'");
            }
        }
        return BasisString(bits);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr Pol at(int qubit) const { return ((bits_ >> qubit) & 1U) != 0 ? Pol::V : Pol::H; }
    constexpr BasisString with(int qubit, Pol p) const {
        std::uint64_t mask = std::uint64_t{1} << qubit;
        return BasisString(p == Pol::V ? (bits_ | mask) : (bits_ & ~mask));
    }

    std::string to_string(int n_qubits) const {
        std::string out;
        out.reserve(static_cast<std::size_t>(n_qubits));
        for (int q = 0; q < n_qubits; ++q) {
            out.push_back(to_char(at(q)));
        }
        return out;
    }

    constexpr auto operator<=>(const BasisString &) const = default;

  private:
    std::uint64_t bits_ = 0;
};

/// A coherent probe beam: real amplitude alpha and Kerr phase per photon
/// theta (the product chi * t; the factors are never needed separately).
struct ProbeMode {
    double alpha = 0.0;
    double theta = 0.0;

    void validate() const {
        if (!std::isfinite(alpha) || alpha < 0.0) {
            throw ValidationError("probe alpha must be finite and >= 0");
        }
        // theta = 0 is accepted as the uncoupled limit.
        if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
            throw ValidationError("probe theta must lie in [0, pi]");
        }
    }

    Complex label(int phase_units) const { return std::polar(alpha, phase_units * theta); }

    /// <alpha e^{i bra theta} | alpha e^{i ket theta}>.
    Complex overlap(int bra_units, int ket_units) const {
        if (bra_units == ket_units) {
            return 1.0;
        }
        double delta = (ket_units - bra_units) * theta;
        double half_sin = std::sin(0.5 * delta);
        double a2 = alpha * alpha;
        // -|b - b'|^2 / 2 + i Im(conj(b') b)
        return std::exp(Complex(-2.0 * a2 * half_sin * half_sin, a2 * std::sin(delta)));
    }
};

/// <bra|ket> for arbitrary coherent amplitudes.
inline Complex coherent_overlap(Complex bra, Complex ket) {
    return std::exp(-0.5 * std::norm(ket - bra) + Complex(0.0, std::imag(std::conj(bra) * ket)));
}

struct Branch {
    Complex amplitude;
    BasisString basis;
    std::vector<int> phase_units;  // one entry per active probe

    bool same_key(const Branch &other) const {
        return basis == other.basis && phase_units == other.phase_units;
    }
};

inline bool key_less(const Branch &a, const Branch &b) {
    if (a.basis != b.basis) {
        return a.basis < b.basis;
    }
    return a.phase_units < b.phase_units;
}

class HybridState {
  public:
    explicit HybridState(int n_qubits) : n_qubits_(n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw ValidationError("qubit count must be in [1, 64]");
        }
    }

    HybridState(int n_qubits, std::vector<ProbeMode> probes, std::vector<Branch> branches, double pruned_mass = 0.0)
        : HybridState(n_qubits) {
        for (const auto &p : probes) {
            p.validate();
        }
        probes_ = std::move(probes);
        pruned_mass_ = pruned_mass;
        for (auto &b : branches) {
            check_branch(b);
        }
        branches_ = std::move(branches);
        canonicalize();
    }

    int n_qubits() const { return n_qubits_; }
    std::span<const Branch> branches() const { return branches_; }
    std::span<const ProbeMode> probes() const { return probes_; }
    std::size_t probe_count() const { return probes_.size(); }
    double pruned_mass() const { return pruned_mass_; }
    void add_pruned_mass(double m) { pruned_mass_ += m; }

    const ProbeMode &probe(int index) const {
        check_probe(index);
        return probes_[static_cast<std::size_t>(index)];
    }

    void check_probe(int index) const {
        if (index < 0 || static_cast<std::size_t>(index) >= probes_.size()) {
            throw ContractError("probe " + std::to_string(index) + " is not active");
        }
    }

    void check_qubit(int qubit) const {
        if (qubit < 0 || qubit >= n_qubits_) {
            throw ValidationError("qubit index " + std::to_string(qubit) + " out of range");
        }
    }

    /// Activates a probe in its unshifted coherent state; returns its index.
    int add_probe(const ProbeMode &probe) {
        probe.validate();
        probes_.push_back(probe);
        for (auto &b : branches_) {
            b.phase_units.push_back(0);
        }
        return static_cast<int>(probes_.size()) - 1;
    }

    /// Drops a probe's column. Branches that become key-equal are summed,
    /// so only call this once the probe has been projected out.
    void remove_probe(int index) {
        check_probe(index);
        probes_.erase(probes_.begin() + index);
        for (auto &b : branches_) {
            b.phase_units.erase(b.phase_units.begin() + index);
        }
        canonicalize();
    }

    void add_branch(Branch b) {
        check_branch(b);
        branches_.push_back(std::move(b));
        canonicalize();
    }

    /// Replaces every branch; used by operations that rebuild the list.
    void assign_branches(std::vector<Branch> branches) {
        for (auto &b : branches) {
            check_branch(b);
        }
        branches_ = std::move(branches);
        canonicalize();
    }

    void scale(Complex factor) {
        for (auto &b : branches_) {
            b.amplitude *= factor;
        }
    }

    /// Sort by key, sum duplicates, drop exact zeros.
    void canonicalize() {
        std::sort(branches_.begin(), branches_.end(), key_less);
        std::vector<Branch> merged;
        merged.reserve(branches_.size());
        for (auto &b : branches_) {
            if (!merged.empty() && merged.back().same_key(b)) {
                merged.back().amplitude += b.amplitude;
            } else {
                merged.push_back(std::move(b));
            }
        }
        std::erase_if(merged, [](const Branch &b) { return b.amplitude == Complex(0.0, 0.0); });
        branches_ = std::move(merged);
    }

  private:
    void check_branch(const Branch &b) const {
        if (!std::isfinite(b.amplitude.real()) || !std::isfinite(b.amplitude.imag())) {
            throw ValidationError("branch amplitude is not finite");
        }
        if (b.phase_units.size() != probes_.size()) {
            throw ValidationError("branch needs one phase index per active probe");
        }
        if (n_qubits_ < kMaxQubits && (b.basis.bits() >> n_qubits_) != 0) {
            throw ValidationError("basis string has labels beyond the qubit count");
        }
    }

    int n_qubits_;
    std::vector<ProbeMode> probes_;
    std::vector<Branch> branches_;
    double pruned_mass_ = 0.0;
};

/// Overlap weight between two branches over all active probes:
/// prod_p <label of bra on p | label of ket on p>.
inline Complex probe_overlap(const HybridState &state, const Branch &bra, const Branch &ket) {
    Complex w = 1.0;
    auto probes = state.probes();
    for (std::size_t p = 0; p < probes.size(); ++p) {
        w *= probes[p].overlap(bra.phase_units[p], ket.phase_units[p]);
    }
    return w;
}

/// Squared norm including coherent overlaps. Branches are sorted by basis,
/// so only same-basis runs interfere.
inline double squared_norm(const HybridState &state) {
    auto br = state.branches();
    double total = 0.0;
    std::size_t start = 0;
    while (start < br.size()) {
        std::size_t end = start;
        while (end < br.size() && br[end].basis == br[start].basis) {
            ++end;
        }
        for (std::size_t i = start; i < end; ++i) {
            total += std::norm(br[i].amplitude);
            for (std::size_t j = i + 1; j < end; ++j) {
                Complex cross = br[i].amplitude * std::conj(br[j].amplitude) * probe_overlap(state, br[j], br[i]);
                total += 2.0 * cross.real();
            }
        }
        start = end;
    }
    return total;
}

inline double norm(const HybridState &state) { return std::sqrt(std::max(0.0, squared_norm(state))); }

inline void renormalize(HybridState &state) {
    double n = norm(state);
    if (!(n > 0.0)) {
        throw ContractError("cannot renormalize a zero state");
    }
    state.scale(1.0 / n);
}

/// Product state from one (c0, c1) pair per qubit. Qubit 0 is the first pair.
inline HybridState new_state(std::span<const std::pair<Complex, Complex>> qubit_specs) {
    if (qubit_specs.empty()) {
        throw ValidationError("at least one qubit is required");
    }
    if (qubit_specs.size() > static_cast<std::size_t>(kMaxQubits)) {
        throw ValidationError("at most 64 qubits are supported");
    }
    for (std::size_t q = 0; q < qubit_specs.size(); ++q) {
        auto [c0, c1] = qubit_specs[q];
        double n2 = std::norm(c0) + std::norm(c1);
        if (!std::isfinite(n2) || std::abs(n2 - 1.0) > kNormTolerance) {
            throw ValidationError("qubit " + std::to_string(q) + " amplitudes are not normalized");
        }
    }
    std::vector<Branch> branches{Branch{1.0, BasisString{}, {}}};
    for (std::size_t q = 0; q < qubit_specs.size(); ++q) {
        auto [c0, c1] = qubit_specs[q];
        std::vector<Branch> next;
        next.reserve(branches.size() * 2);
        for (const auto &b : branches) {
            if (c0 != Complex(0.0, 0.0)) {
                next.push_back({b.amplitude * c0, b.basis, {}});
            }
            if (c1 != Complex(0.0, 0.0)) {
                next.push_back({b.amplitude * c1, b.basis.with(static_cast<int>(q), Pol::V), {}});
            }
        }
        branches = std::move(next);
    }
    return HybridState(static_cast<int>(qubit_specs.size()), {}, std::move(branches));
}

inline HybridState new_state(std::initializer_list<std::pair<Complex, Complex>> qubit_specs) {
    return new_state(std::span<const std::pair<Complex, Complex>>(qubit_specs.begin(), qubit_specs.size()));
}

/// Polarization-only state from explicit amplitudes, e.g. {{"HH", 1/sqrt2}, {"VV", 1/sqrt2}}.
inline HybridState basis_superposition(int n_qubits, std::span<const std::pair<std::string_view, Complex>> terms) {
    std::vector<Branch> branches;
    for (auto [labels, amp] : terms) {
        if (labels.size() != static_cast<std::size_t>(n_qubits)) {
            throw ValidationError("basis string length must equal the qubit count");
        }
        branches.push_back({amp, BasisString::parse(labels), {}});
    }
    return HybridState(n_qubits, {}, std::move(branches));
}

inline HybridState basis_superposition(int n_qubits,
                                       std::initializer_list<std::pair<std::string_view, Complex>> terms) {
    return basis_superposition(n_qubits,
                               std::span<const std::pair<std::string_view, Complex>>(terms.begin(), terms.size()));
}

/// Appends a new last qubit in c0|H> + c1|V>.
inline HybridState append_qubit(const HybridState &state, Complex c0, Complex c1) {
    if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > kNormTolerance) {
        throw ValidationError("appended qubit amplitudes are not normalized");
    }
    const int q = state.n_qubits();
    std::vector<Branch> out;
    for (const auto &b : state.branches()) {
        if (c0 != Complex(0.0, 0.0)) {
            out.push_back({b.amplitude * c0, b.basis, b.phase_units});
        }
        if (c1 != Complex(0.0, 0.0)) {
            out.push_back({b.amplitude * c1, b.basis.with(q, Pol::V), b.phase_units});
        }
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    return HybridState(q + 1, std::move(probes), std::move(out), state.pruned_mass());
}

/// Sums key-equal branches and drops branches with |amplitude| < epsilon.
/// No renormalization; the dropped probability is added to pruned_mass().
inline HybridState merge_and_prune(const HybridState &state, double epsilon = kDefaultPruneEpsilon) {
    if (!(epsilon >= 0.0)) {
        throw ValidationError("epsilon must be >= 0");
    }
    std::vector<Branch> kept;
    double dropped = 0.0;
    for (const auto &b : state.branches()) {
        if (std::abs(b.amplitude) < epsilon) {
            dropped += std::norm(b.amplitude);
        } else {
            kept.push_back(b);
        }
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    return HybridState(state.n_qubits(), std::move(probes), std::move(kept), state.pruned_mass() + dropped);
}

/// |<reference|state>|^2 over the polarization space. Both states must have
/// every probe measured out.
inline double fidelity(const HybridState &state, const HybridState &reference) {
    if (state.n_qubits() != reference.n_qubits()) {
        throw ValidationError("fidelity needs states with equal qubit counts");
    }
    if (state.probe_count() != 0 || reference.probe_count() != 0) {
        throw ContractError("fidelity needs pure polarization states; measure the probes first");
    }
    auto a = state.branches();
    auto b = reference.branches();
    Complex inner = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].basis == b[j].basis) {
            inner += std::conj(b[j].amplitude) * a[i].amplitude;
            ++i;
            ++j;
        } else if (a[i].basis < b[j].basis) {
            ++i;
        } else {
            ++j;
        }
    }
    return std::clamp(std::norm(inner), 0.0, 1.0);
}

/// Amplitude of a basis string in a probe-free state (0 if absent).
inline Complex amplitude_of(const HybridState &state, BasisString basis) {
    for (const auto &b : state.branches()) {
        if (b.basis == basis && std::all_of(b.phase_units.begin(), b.phase_units.end(), [](int k) { return k == 0; })) {
            return b.amplitude;
        }
    }
    return 0.0;
}

inline std::ostream &operator<<(std::ostream &out, const HybridState &state) {
    out << "HybridState(n=" << state.n_qubits() << ", probes=" << state.probe_count() << ")";
    for (const auto &b : state.branches()) {
        out << "\n  " << b.amplitude << " |" << b.basis.to_string(state.n_qubits()) << ">";
        for (int k : b.phase_units) {
            out << " k=" << k;
        }
    }
    return out;
}

}  // namespace kerrqnd
