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

// Homodyne X-quadrature measurement of a probe and nondestructive {H, V}
// measurement of a photon.
//
// Quadrature convention: x = a + a^dagger, so a coherent state |beta> gives a
// Gaussian outcome with mean 2 Re(beta) and unit variance, and the projection
// amplitude is
//
//     <x|beta> = (2 pi)^{-1/4} exp(-x^2/4 + beta x - beta^2/2 - |beta|^2/2)
//              = (2 pi)^{-1/4} exp(-(x - 2a)^2 / 4) exp(i (b x - a b)),
//
// with beta = a + ib. For beta = alpha e^{i theta} the phase is
// alpha x sin(theta) - (alpha^2 / 2) sin(2 theta). The correction phase in a
// HomodyneRecord is taken from this kernel, not from a closed form, so the
// feed-forward undoes exactly the phase the collapse produced. The
// x-independent offset differs from the commonly quoted
// alpha x sin(theta) - alpha^2 sin(2 theta) by a factor of two in the second
// term; under this convention the kernel value is the self-consistent one.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "kerrqnd/errors.hpp"
#include "kerrqnd/rng.hpp"
#include "kerrqnd/state.hpp"

namespace kerrqnd {

enum class Parity { even, odd };

inline const char *to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

struct HomodyneRecord {
    double x = 0.0;
    double x0 = 0.0;
    Parity parity = Parity::even;
    double phi = 0.0;  // radians, in [0, 2 pi)
};

enum class SamplingStrategy { exact_mixture, grid_inverse_cdf };

inline constexpr int kGridPoints = 8192;
inline constexpr double kGridMargin = 8.0;

/// Natural log of <x|beta>.
inline Complex kernel_log(double x, Complex beta) {
    const double a = beta.real();
    const double b = beta.imag();
    const double d = x - 2.0 * a;
    return {-0.25 * d * d - 0.25 * std::log(2.0 * std::numbers::pi), b * x - a * b};
}

inline Complex kernel_value(double x, Complex beta) { return std::exp(kernel_log(x, beta)); }

inline double wrap_phase(double phi) {
    double r = std::fmod(phi, 2.0 * std::numbers::pi);
    if (r < 0.0) {
        r += 2.0 * std::numbers::pi;
    }
    return r;
}

/// Threshold between the unshifted peak and the peaks at alpha e^{+-i theta}.
inline double threshold_x0(const ProbeMode &probe) { return probe.alpha * (1.0 + std::cos(probe.theta)); }

/// Phase of <x|alpha e^{i theta}> relative to <x|alpha>, reduced mod 2 pi.
inline double correction_phase(const ProbeMode &probe, double x) {
    return wrap_phase(kernel_log(x, probe.label(1)).imag() - kernel_log(x, probe.label(0)).imag());
}

inline HomodyneRecord make_record(const ProbeMode &probe, double x) {
    HomodyneRecord rec;
    rec.x = x;
    rec.x0 = threshold_x0(probe);
    rec.parity = x > rec.x0 ? Parity::even : Parity::odd;
    rec.phi = correction_phase(probe, x);
    return rec;
}

namespace detail {

/// Overlap over all probes except `skip`.
inline Complex other_probe_overlap(const HybridState &state, const Branch &bra, const Branch &ket, int skip) {
    Complex w = 1.0;
    auto probes = state.probes();
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (static_cast<int>(p) != skip) {
            w *= probes[p].overlap(bra.phase_units[p], ket.phase_units[p]);
        }
    }
    return w;
}

struct DensityTerm {
    Complex weight;  // amp_i conj(amp_j) * overlap over the other probes
    Complex beta_i;
    Complex beta_j;
};

}  // namespace detail

/// Probability density of the X-quadrature outcome of `probe`, including the
/// interference between same-basis branches.
inline std::function<double(double)> outcome_density(const HybridState &state, int probe) {
    state.check_probe(probe);
    const ProbeMode &mode = state.probe(probe);
    auto br = state.branches();
    std::vector<detail::DensityTerm> terms;
    std::size_t start = 0;
    while (start < br.size()) {
        std::size_t end = start;
        while (end < br.size() && br[end].basis == br[start].basis) {
            ++end;
        }
        for (std::size_t i = start; i < end; ++i) {
            for (std::size_t j = start; j < end; ++j) {
                Complex w = br[i].amplitude * std::conj(br[j].amplitude) *
                            detail::other_probe_overlap(state, br[j], br[i], probe);
                terms.push_back({w, mode.label(br[i].phase_units[static_cast<std::size_t>(probe)]),
                                 mode.label(br[j].phase_units[static_cast<std::size_t>(probe)])});
            }
        }
        start = end;
    }
    return [terms = std::move(terms)](double x) {
        double p = 0.0;
        for (const auto &t : terms) {
            p += (t.weight * std::exp(kernel_log(x, t.beta_i) + std::conj(kernel_log(x, t.beta_j)))).real();
        }
        return std::max(p, 0.0);
    };
}

/// Exact mixture sampling is available when no basis string carries two
/// branches, because then the density has no interference terms.
inline SamplingStrategy sampling_strategy(const HybridState &state, int probe) {
    state.check_probe(probe);
    auto br = state.branches();
    for (std::size_t i = 1; i < br.size(); ++i) {
        if (br[i].basis == br[i - 1].basis) {
            return SamplingStrategy::grid_inverse_cdf;
        }
    }
    return SamplingStrategy::exact_mixture;
}

/// Tabulated inverse CDF of the outcome density on a uniform grid covering
/// every peak +- kGridMargin; draws interpolate linearly between grid
/// points. Build once per state when drawing many samples.
class GridInverseCdf {
  public:
    GridInverseCdf(const HybridState &state, int probe) {
        state.check_probe(probe);
        const ProbeMode &mode = state.probe(probe);
        if (state.branches().empty()) {
            throw ContractError("cannot measure an empty state");
        }
        lo_ = std::numeric_limits<double>::infinity();
        double hi = -lo_;
        for (const auto &b : state.branches()) {
            double mean = 2.0 * mode.label(b.phase_units[static_cast<std::size_t>(probe)]).real();
            lo_ = std::min(lo_, mean - kGridMargin);
            hi = std::max(hi, mean + kGridMargin);
        }
        auto density = outcome_density(state, probe);
        step_ = (hi - lo_) / (kGridPoints - 1);
        cdf_.assign(kGridPoints, 0.0);
        double prev = density(lo_);
        for (int i = 1; i < kGridPoints; ++i) {
            double cur = density(lo_ + i * step_);
            cdf_[static_cast<std::size_t>(i)] = cdf_[static_cast<std::size_t>(i - 1)] + 0.5 * (prev + cur) * step_;
            prev = cur;
        }
    }

    double draw(RngStream &rng) const {
        double target = rng.uniform() * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        if (it == cdf_.begin()) {
            return lo_;
        }
        if (it == cdf_.end()) {
            return lo_ + (kGridPoints - 1) * step_;
        }
        auto i = static_cast<std::size_t>(it - cdf_.begin());
        double span = cdf_[i] - cdf_[i - 1];
        double frac = span > 0.0 ? (target - cdf_[i - 1]) / span : 0.0;
        return lo_ + (static_cast<double>(i - 1) + frac) * step_;
    }

  private:
    double lo_ = 0.0;
    double step_ = 0.0;
    std::vector<double> cdf_;
};

inline double sample_homodyne(const HybridState &state, int probe, RngStream &rng, SamplingStrategy strategy) {
    state.check_probe(probe);
    const ProbeMode &mode = state.probe(probe);
    auto br = state.branches();
    if (br.empty()) {
        throw ContractError("cannot measure an empty state");
    }
    const auto k_of = [probe](const Branch &b) { return b.phase_units[static_cast<std::size_t>(probe)]; };

    if (strategy == SamplingStrategy::exact_mixture) {
        double total = 0.0;
        for (const auto &b : br) {
            total += std::norm(b.amplitude);
        }
        double u = rng.uniform() * total;
        std::size_t pick = br.size() - 1;
        for (std::size_t i = 0; i < br.size(); ++i) {
            u -= std::norm(br[i].amplitude);
            if (u < 0.0) {
                pick = i;
                break;
            }
        }
        return rng.normal(2.0 * mode.label(k_of(br[pick])).real(), 1.0);
    }

    return GridInverseCdf(state, probe).draw(rng);
}

inline double sample_homodyne(const HybridState &state, int probe, RngStream &rng) {
    return sample_homodyne(state, probe, rng, sampling_strategy(state, probe));
}

/// Multiplies each branch by <x|label> on `probe` and drops the probe,
/// without renormalizing. The squared norm of the result equals the outcome
/// density at x.
inline HybridState apply_kernel(const HybridState &state, int probe, double x) {
    state.check_probe(probe);
    const ProbeMode &mode = state.probe(probe);
    std::vector<Branch> out(state.branches().begin(), state.branches().end());
    for (auto &b : out) {
        b.amplitude *= kernel_value(x, mode.label(b.phase_units[static_cast<std::size_t>(probe)]));
        b.phase_units.erase(b.phase_units.begin() + probe);
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    probes.erase(probes.begin() + probe);
    return HybridState(state.n_qubits(), std::move(probes), std::move(out), state.pruned_mass());
}

/// Projects `probe` onto the quadrature eigenstate x: weights every branch
/// by <x|label>, removes the probe, renormalizes. The weights are rescaled
/// by the largest magnitude first, so far-tail outcomes do not underflow.
inline std::pair<HomodyneRecord, HybridState> collapse_at(const HybridState &state, int probe, double x) {
    state.check_probe(probe);
    const ProbeMode &mode = state.probe(probe);
    std::vector<Branch> out(state.branches().begin(), state.branches().end());
    std::vector<Complex> logs;
    logs.reserve(out.size());
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto &b : out) {
        logs.push_back(kernel_log(x, mode.label(b.phase_units[static_cast<std::size_t>(probe)])));
        peak = std::max(peak, logs.back().real());
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].amplitude *= std::exp(logs[i] - peak);
        out[i].phase_units.erase(out[i].phase_units.begin() + probe);
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    probes.erase(probes.begin() + probe);
    HybridState next(state.n_qubits(), std::move(probes), std::move(out), state.pruned_mass());
    renormalize(next);
    next = merge_and_prune(next);
    return {make_record(mode, x), std::move(next)};
}

inline std::pair<HomodyneRecord, HybridState> sample_and_collapse(const HybridState &state, int probe,
                                                                  RngStream &rng) {
    double x = sample_homodyne(state, probe, rng);
    return collapse_at(state, probe, x);
}

/// Unnormalized projection of `qubit` onto polarization `outcome`.
inline HybridState project_photon(const HybridState &state, int qubit, Pol outcome) {
    state.check_qubit(qubit);
    std::vector<Branch> kept;
    for (const auto &b : state.branches()) {
        if (b.basis.at(qubit) == outcome) {
            kept.push_back(b);
        }
    }
    std::vector<ProbeMode> probes(state.probes().begin(), state.probes().end());
    return HybridState(state.n_qubits(), std::move(probes), std::move(kept), state.pruned_mass());
}

/// Born probability of finding `qubit` in `outcome`.
inline double photon_probability(const HybridState &state, int qubit, Pol outcome) {
    return squared_norm(project_photon(state, qubit, outcome)) / squared_norm(state);
}

/// Nondestructive measurement with a chosen outcome. The photon stays in
/// the register, now in the definite state `outcome`.
inline HybridState collapse_photon(const HybridState &state, int qubit, Pol outcome) {
    HybridState next = project_photon(state, qubit, outcome);
    if (!(squared_norm(next) > 0.0)) {
        throw ContractError("photon outcome has zero probability");
    }
    renormalize(next);
    return next;
}

inline std::pair<Pol, HybridState> qnd_photon_measure(const HybridState &state, int qubit, RngStream &rng) {
    double p_h = photon_probability(state, qubit, Pol::H);
    Pol outcome = rng.uniform() < p_h ? Pol::H : Pol::V;
    return {outcome, collapse_photon(state, qubit, outcome)};
}

}  // namespace kerrqnd
