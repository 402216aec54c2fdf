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
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/gates.hpp"
#include "kerrqnd/measurement.hpp"
#include "kerrqnd/optics.hpp"
#include "kerrqnd/rng.hpp"
#include "kerrqnd/state.hpp"

namespace kerrqnd {

/// Fidelity below this counts as a logical error. Correctly fed-forward
/// states sit within 1e-9 of the ideal, misclassified ones far below.
inline constexpr double kLogicalErrorFidelity = 1.0 - 1e-6;

struct DiscriminationGeometry {
    double x0 = 0.0;              // midpoint threshold alpha (1 + cos theta)
    double xd = 0.0;              // peak separation 2 alpha (1 - cos theta)
    double alpha_theta_sq = 0.0;  // small-angle figure of merit
};

namespace detail {

inline void check_probe_params(double alpha, double theta) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw ValidationError("alpha must be finite and >= 0");
    }
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw ValidationError("theta must lie in [0, pi]");
    }
}

}  // namespace detail

inline DiscriminationGeometry geometry(double alpha, double theta) {
    detail::check_probe_params(alpha, theta);
    const double s = std::sin(0.5 * theta);
    // 1 - cos(theta) = 2 sin^2(theta / 2), without the cancellation.
    return {alpha * (1.0 + std::cos(theta)), 4.0 * alpha * s * s, alpha * theta * theta};
}

/// Probability that the midpoint threshold assigns an outcome to the wrong
/// peak: 1/2 erfc(X_d / (2 sqrt2)).
inline double p_error(double alpha, double theta) {
    return 0.5 * std::erfc(geometry(alpha, theta).xd / (2.0 * std::numbers::sqrt2));
}

/// 3-sigma normal-approximation half width.
inline double binomial_ci_half_width(double p, std::int64_t n) {
    if (n <= 0) {
        return 0.0;
    }
    return 3.0 * std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution (small-sample correction of Stephens).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw ValidationError("KS test needs two non-empty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) {
            ++i;
        }
        while (j < b.size() && b[j] <= v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    const double lambda = (ne + 0.12 + 0.11 / ne) * d;
    double q = 0.0;
    if (lambda < 1e-3) {
        q = 1.0;
    } else {
        double sign = 1.0;
        for (int k = 1; k <= 200; ++k) {
            double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
            q += term;
            if (std::abs(term) < 1e-16) {
                break;
            }
            sign = -sign;
        }
        q = std::clamp(2.0 * q, 0.0, 1.0);
    }
    return {d, q};
}

enum class Experiment { parity, entangler, entangler45, cnot };

inline std::string_view to_string(Experiment e) {
    switch (e) {
    case Experiment::parity:
        return "parity";
    case Experiment::entangler:
        return "entangler";
    case Experiment::entangler45:
        return "entangler45";
    case Experiment::cnot:
        return "cnot";
    }
    return "?";
}

inline Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::parity, Experiment::entangler, Experiment::entangler45, Experiment::cnot}) {
        if (to_string(e) == name) {
            return e;
        }
    }
    throw ValidationError("unknown experiment '" + std::string(name) + "'");
}

using AmplitudePair = std::pair<Complex, Complex>;

struct ShotStats {
    std::int64_t shots = 0;
    std::uint64_t seed = 0;
    std::int64_t logical_errors = 0;
    double error_rate = 0.0;
    double error_ci = 0.0;  // half width, 3 sigma
    double mean_fidelity = 0.0;
    double even_frequency = 0.0;  // of the first homodyne record in each shot
    double odd_frequency = 0.0;
};

struct ShotOutcome {
    double fidelity = 0.0;
    Parity first_parity = Parity::even;
};

namespace reference {

/// Ideal parity projection of a probe-free two-qubit state onto `sector`,
/// in the frame of `basis`, followed by `frame_gate_b` on qubit_b in that
/// frame when the sector is odd. Returns nullopt if the sector is empty.
inline std::optional<HybridState> project_parity(const HybridState &input, int qubit_a, int qubit_b, Parity sector,
                                                 ParityBasis basis, const std::optional<Mat2> &odd_gate_b,
                                                 double phi = 0.0) {
    HybridState s = input;
    if (basis == ParityBasis::diagonal) {
        s = change_to_diagonal(std::move(s), {qubit_a, qubit_b});
    }
    std::vector<Branch> kept;
    for (const auto &b : s.branches()) {
        bool odd = b.basis.at(qubit_a) != b.basis.at(qubit_b);
        if (odd != (sector == Parity::odd)) {
            continue;
        }
        Branch copy = b;
        if (odd && phi != 0.0) {
            copy.amplitude *= std::polar(1.0, b.basis.at(qubit_a) == Pol::H ? phi : -phi);
        }
        kept.push_back(std::move(copy));
    }
    HybridState out(s.n_qubits(), {}, std::move(kept));
    if (!(squared_norm(out) > 0.0)) {
        return std::nullopt;
    }
    renormalize(out);
    if (sector == Parity::odd && odd_gate_b) {
        out = apply_single_qubit(out, {*odd_gate_b, qubit_b});
    }
    if (basis == ParityBasis::diagonal) {
        out = change_to_diagonal(std::move(out), {qubit_a, qubit_b});
    }
    return out;
}

/// CNOT as a basis permutation: flip `target` wherever `control` is V.
inline HybridState ideal_cnot(const HybridState &input, int control, int target) {
    std::vector<Branch> out;
    for (const auto &b : input.branches()) {
        Branch copy = b;
        if (b.basis.at(control) == Pol::V) {
            copy.basis = b.basis.with(target, flipped(b.basis.at(target)));
        }
        out.push_back(std::move(copy));
    }
    return HybridState(input.n_qubits(), {}, std::move(out));
}

}  // namespace reference

/// One shot of `experiment`. Qubit layout: parity/entangler/entangler45 act
/// on (0, 1); cnot uses control 0, ancilla 1, target 2.
inline ShotOutcome run_single_shot(Experiment experiment, const std::vector<AmplitudePair> &inputs,
                                   const ProbeMode &probe, RngStream &rng) {
    if (inputs.size() != 2) {
        throw ValidationError("experiments take exactly two input qubit states");
    }
    const HybridState input = new_state(inputs);
    ShotOutcome out;
    auto fid_or_zero = [](const HybridState &s, const std::optional<HybridState> &ideal) {
        return ideal ? fidelity(s, *ideal) : 0.0;
    };
    switch (experiment) {
    case Experiment::parity: {
        auto [rec, s] = parity_gate(input, 0, 1, probe, ParityBasis::computational, rng);
        out.first_parity = rec.parity;
        out.fidelity = fid_or_zero(
            s, reference::project_parity(input, 0, 1, rec.parity, ParityBasis::computational, std::nullopt, rec.phi));
        break;
    }
    case Experiment::entangler: {
        auto [trace, s] = entangler(input, 0, 1, probe, ParityBasis::computational, rng);
        const auto &rec = trace.homodyne.front();
        out.first_parity = rec.parity;
        out.fidelity = fid_or_zero(s, reference::project_parity(input, 0, 1, rec.parity, ParityBasis::computational,
                                                               mat::bit_flip()));
        break;
    }
    case Experiment::entangler45: {
        auto [trace, s] = entangler_45(input, 0, 1, std::nullopt, probe, rng);
        const auto &rec = trace.homodyne.front();
        out.first_parity = rec.parity;
        out.fidelity =
            fid_or_zero(s, reference::project_parity(input, 0, 1, rec.parity, ParityBasis::diagonal, mat::bit_flip()));
        break;
    }
    case Experiment::cnot: {
        const double h = std::numbers::sqrt2 / 2.0;
        const HybridState with_ancilla = new_state({inputs[0], {h, h}, inputs[1]});
        auto [trace, s] = cnot(with_ancilla, 0, 1, 2, {probe, probe}, rng);
        out.first_parity = trace.homodyne.front().parity;
        // Ideal: CNOT on (control, target) with the ancilla in its recorded state.
        HybridState ideal = reference::ideal_cnot(new_state({inputs[0], {1.0, 0.0}, inputs[1]}), 0, 2);
        if (trace.photons.back() == Pol::V) {
            ideal = apply_single_qubit(ideal, {mat::bit_flip(), 1});
        }
        out.fidelity = fidelity(s, ideal);
        break;
    }
    }
    return out;
}

/// Runs `shots` independent shots, shot i seeded by RngStream::derive(seed, i).
/// Shots are spread over threads; per-shot results are reduced in shot order,
/// so the statistics do not depend on scheduling.
inline ShotStats run_shots(Experiment experiment, const std::vector<AmplitudePair> &inputs, double alpha,
                           double theta, std::int64_t shots, std::uint64_t seed, unsigned threads = 0) {
    detail::check_probe_params(alpha, theta);
    if (shots < 1) {
        throw ValidationError("shots must be >= 1");
    }
    const ProbeMode probe{alpha, theta};
    // Validates the inputs before any worker starts.
    (void)new_state(inputs);
    if (inputs.size() != 2) {
        throw ValidationError("experiments take exactly two input qubit states");
    }

    std::vector<ShotOutcome> results(static_cast<std::size_t>(shots));
    if (threads == 0) {
        threads = std::max(1U, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, shots));
    auto worker = [&](unsigned w) {
        for (std::int64_t i = w; i < shots; i += threads) {
            RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(i));
            results[static_cast<std::size_t>(i)] = run_single_shot(experiment, inputs, probe, rng);
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back(worker, w);
        }
    }

    ShotStats stats;
    stats.shots = shots;
    stats.seed = seed;
    double fid_sum = 0.0;
    std::int64_t even = 0;
    for (const auto &r : results) {
        fid_sum += r.fidelity;
        if (r.fidelity < kLogicalErrorFidelity) {
            ++stats.logical_errors;
        }
        if (r.first_parity == Parity::even) {
            ++even;
        }
    }
    const double n = static_cast<double>(shots);
    stats.error_rate = static_cast<double>(stats.logical_errors) / n;
    stats.error_ci = binomial_ci_half_width(stats.error_rate, shots);
    stats.mean_fidelity = fid_sum / n;
    stats.even_frequency = static_cast<double>(even) / n;
    stats.odd_frequency = static_cast<double>(shots - even) / n;
    return stats;
}

}  // namespace kerrqnd
