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

// Dense truncated Fock-space simulation of qubits x probes, used only to
// certify the branch-label model at small alpha. Nothing in here reuses the
// coherent-overlap or kernel formulas of the branch model: probes are plain
// photon-number vectors, the cross-Kerr map is the diagonal e^{i theta n},
// and homodyne densities come from oscillator eigenfunctions.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/optics.hpp"
#include "kerrqnd/state.hpp"

namespace kerrqnd::oracle {

inline constexpr double kMaxTruncationLoss = 1e-10;
inline constexpr int kMaxOracleQubits = 12;

/// Poisson tail 1 - sum_{n<=n_trunc} e^{-a^2} a^{2n} / n!, summed directly
/// over n > n_trunc to avoid cancellation.
inline double truncation_loss(double alpha, int n_trunc) {
    const double mean = alpha * alpha;
    if (mean == 0.0) {
        return 0.0;
    }
    int n = n_trunc + 1;
    double log_term = -mean + n * std::log(mean) - std::lgamma(n + 1.0);
    double term = std::exp(log_term);
    double tail = 0.0;
    for (int k = 0; k < 100000; ++k) {
        tail += term;
        ++n;
        term *= mean / n;
        if (n > mean && (term == 0.0 || term < 1e-18 * tail)) {
            break;
        }
    }
    return tail;
}

/// Smallest truncation whose loss for |alpha| stays within `max_loss`.
inline int required_truncation(double alpha, double max_loss = kMaxTruncationLoss) {
    int n = 0;
    while (truncation_loss(alpha, n) > max_loss) {
        ++n;
    }
    return n;
}

/// Oscillator eigenfunctions psi_0..psi_n_max at x, in the x = a + a^dagger
/// convention: psi_n(x) = (2 pi)^{-1/4} (2^n n!)^{-1/2} H_n(x / sqrt2) e^{-x^2/4}.
/// Upward recurrence x psi_n = sqrt(n+1) psi_{n+1} + sqrt(n) psi_{n-1}, run on
/// an unscaled seed with a running log scale so neither the Gaussian factor
/// nor the polynomial growth overflows.
inline std::vector<double> oscillator_eigenfunctions(double x, int n_max) {
    std::vector<double> v(static_cast<std::size_t>(n_max) + 1, 0.0);
    std::vector<double> log_scale(v.size(), 0.0);
    double scale = 0.0;
    double prev = 0.0;
    double cur = 1.0;
    v[0] = cur;
    for (int n = 0; n < n_max; ++n) {
        double next = (x * cur - std::sqrt(static_cast<double>(n)) * prev) / std::sqrt(n + 1.0);
        prev = cur;
        cur = next;
        if (std::abs(cur) > 1e100) {
            prev *= 1e-100;
            cur *= 1e-100;
            scale += 100.0 * std::numbers::ln10;
        }
        v[static_cast<std::size_t>(n) + 1] = cur;
        log_scale[static_cast<std::size_t>(n) + 1] = scale;
    }
    const double log_psi0 = -0.25 * std::log(2.0 * std::numbers::pi) - 0.25 * x * x;
    for (std::size_t n = 0; n < v.size(); ++n) {
        v[n] = v[n] == 0.0 ? 0.0 : std::copysign(std::exp(std::log(std::abs(v[n])) + log_scale[n] + log_psi0), v[n]);
    }
    return v;
}

/// Fock coefficients e^{-|b|^2/2} b^n / sqrt(n!) for n = 0..n_trunc.
inline std::vector<Complex> coherent_coefficients(Complex beta, int n_trunc) {
    std::vector<Complex> c(static_cast<std::size_t>(n_trunc) + 1);
    c[0] = std::exp(-0.5 * std::norm(beta));
    for (int n = 1; n <= n_trunc; ++n) {
        c[static_cast<std::size_t>(n)] = c[static_cast<std::size_t>(n) - 1] * beta / std::sqrt(static_cast<double>(n));
    }
    return c;
}

class FockOracleState {
  public:
    FockOracleState(int n_qubits, int n_trunc, std::vector<ProbeMode> probes)
        : n_qubits_(n_qubits), n_trunc_(n_trunc), probes_(std::move(probes)) {
        if (n_qubits < 1 || n_qubits > kMaxOracleQubits) {
            throw ValidationError("oracle supports 1.." + std::to_string(kMaxOracleQubits) + " qubits");
        }
        if (n_trunc < 0) {
            throw ValidationError("truncation must be >= 0");
        }
        fock_size_ = 1;
        for (std::size_t p = 0; p < probes_.size(); ++p) {
            fock_size_ *= static_cast<std::size_t>(n_trunc) + 1;
        }
        amps_.assign((std::size_t{1} << n_qubits) * fock_size_, Complex(0.0, 0.0));
    }

    int n_qubits() const { return n_qubits_; }
    int n_trunc() const { return n_trunc_; }
    const std::vector<ProbeMode> &probes() const { return probes_; }
    std::size_t fock_size() const { return fock_size_; }
    std::size_t basis_count() const { return std::size_t{1} << n_qubits_; }

    /// Photon number of `probe` inside a flattened Fock index.
    int photons(std::size_t fock_index, std::size_t probe) const {
        for (std::size_t p = 0; p < probe; ++p) {
            fock_index /= static_cast<std::size_t>(n_trunc_) + 1;
        }
        return static_cast<int>(fock_index % (static_cast<std::size_t>(n_trunc_) + 1));
    }

    Complex &at(std::uint64_t basis, std::size_t fock_index) { return amps_[basis * fock_size_ + fock_index]; }
    Complex at(std::uint64_t basis, std::size_t fock_index) const { return amps_[basis * fock_size_ + fock_index]; }
    std::vector<Complex> &amplitudes() { return amps_; }
    const std::vector<Complex> &amplitudes() const { return amps_; }

  private:
    int n_qubits_;
    int n_trunc_;
    std::vector<ProbeMode> probes_;
    std::size_t fock_size_ = 1;
    std::vector<Complex> amps_;
};

/// Expands every coherent label into Fock amplitudes.
inline FockOracleState oracle_embed(const HybridState &state, int n_trunc) {
    for (const auto &probe : state.probes()) {
        if (truncation_loss(probe.alpha, n_trunc) > kMaxTruncationLoss) {
            throw ValidationError("truncation " + std::to_string(n_trunc) + " too small for alpha=" +
                                  std::to_string(probe.alpha) + "; need n_trunc >= " +
                                  std::to_string(required_truncation(probe.alpha)));
        }
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    FockOracleState out(state.n_qubits(), n_trunc, probes);
    const std::size_t levels = static_cast<std::size_t>(n_trunc) + 1;
    for (const auto &b : state.branches()) {
        // Tensor product of the per-probe coefficient vectors.
        std::vector<Complex> joint{b.amplitude};
        for (std::size_t p = 0; p < probes.size(); ++p) {
            auto c = coherent_coefficients(probes[p].label(b.phase_units[p]), n_trunc);
            std::vector<Complex> next(joint.size() * levels);
            for (std::size_t n = 0; n < levels; ++n) {
                for (std::size_t j = 0; j < joint.size(); ++j) {
                    next[n * joint.size() + j] = joint[j] * c[n];
                }
            }
            joint = std::move(next);
        }
        for (std::size_t f = 0; f < joint.size(); ++f) {
            out.at(b.basis.bits(), f) += joint[f];
        }
    }
    return out;
}

inline FockOracleState oracle_cross_kerr(const FockOracleState &state, const KerrCoupling &coupling) {
    if (coupling.probe < 0 || static_cast<std::size_t>(coupling.probe) >= state.probes().size()) {
        throw ContractError("oracle probe index out of range");
    }
    const double theta = state.probes()[static_cast<std::size_t>(coupling.probe)].theta;
    FockOracleState out = state;
    for (std::uint64_t basis = 0; basis < state.basis_count(); ++basis) {
        if (BasisString(basis).at(coupling.qubit) != coupling.trigger) {
            continue;
        }
        for (std::size_t f = 0; f < state.fock_size(); ++f) {
            int n = state.photons(f, static_cast<std::size_t>(coupling.probe));
            out.at(basis, f) *= std::polar(1.0, coupling.sign * theta * n);
        }
    }
    return out;
}

inline FockOracleState oracle_single_qubit(const FockOracleState &state, const SingleQubitGate &gate) {
    FockOracleState out(state.n_qubits(), state.n_trunc(), state.probes());
    const auto &m = gate.matrix;
    for (std::uint64_t basis = 0; basis < state.basis_count(); ++basis) {
        BasisString bs(basis);
        if (bs.at(gate.qubit) == Pol::V) {
            continue;
        }
        std::uint64_t h = bs.bits();
        std::uint64_t v = bs.with(gate.qubit, Pol::V).bits();
        for (std::size_t f = 0; f < state.fock_size(); ++f) {
            Complex a_h = state.at(h, f);
            Complex a_v = state.at(v, f);
            out.at(h, f) = m[0] * a_h + m[1] * a_v;
            out.at(v, f) = m[2] * a_h + m[3] * a_v;
        }
    }
    return out;
}

inline Complex oracle_inner(const FockOracleState &bra, const FockOracleState &ket) {
    if (bra.amplitudes().size() != ket.amplitudes().size()) {
        throw ValidationError("oracle states have different dimensions");
    }
    Complex s = 0.0;
    for (std::size_t i = 0; i < bra.amplitudes().size(); ++i) {
        s += std::conj(bra.amplitudes()[i]) * ket.amplitudes()[i];
    }
    return s;
}

inline double oracle_squared_norm(const FockOracleState &s) { return oracle_inner(s, s).real(); }

inline double oracle_fidelity(const FockOracleState &a, const FockOracleState &b) {
    return std::norm(oracle_inner(a, b)) / (oracle_squared_norm(a) * oracle_squared_norm(b));
}

/// X-quadrature density of `probe`, traced over the qubits and the other
/// probes' photon numbers.
inline std::function<double(double)> oracle_homodyne_density(const FockOracleState &state, int probe = 0) {
    if (probe < 0 || static_cast<std::size_t>(probe) >= state.probes().size()) {
        throw ContractError("oracle probe index out of range");
    }
    return [state, probe](double x) {
        const auto psi = oscillator_eigenfunctions(x, state.n_trunc());
        const std::size_t levels = static_cast<std::size_t>(state.n_trunc()) + 1;
        std::size_t stride = 1;
        for (int p = 0; p < probe; ++p) {
            stride *= levels;
        }
        double total = 0.0;
        for (std::uint64_t basis = 0; basis < state.basis_count(); ++basis) {
            for (std::size_t f = 0; f < state.fock_size(); ++f) {
                if (state.photons(f, static_cast<std::size_t>(probe)) != 0) {
                    continue;  // f enumerates the other probes' occupations
                }
                Complex amp = 0.0;
                for (std::size_t n = 0; n < levels; ++n) {
                    amp += state.at(basis, f + n * stride) * psi[n];
                }
                total += std::norm(amp);
            }
        }
        return total;
    };
}

}  // namespace kerrqnd::oracle
