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

// Runs the weak cross-Kerr CNOT on the four basis inputs and on a
// superposed control, printing the measurement record and output state.

#include <cmath>
#include <cstdlib>
#include <iostream>

#include "kerrqnd/kerrqnd.hpp"

using namespace kerrqnd;

namespace {

void report(const char *label, const GateTrace &trace, const HybridState &out) {
    std::cout << label << "  x=";
    for (const auto &rec : trace.homodyne) {
        std::cout << rec.x << (rec.parity == Parity::even ? "(even) " : "(odd) ");
    }
    std::cout << "ancilla=" << to_char(trace.photons.front()) << "\n    " << out << "\n";
}

}  // namespace

int main(int argc, char **argv) {
    const double alpha = argc > 1 ? std::atof(argv[1]) : 40.0;
    const double theta = argc > 2 ? std::atof(argv[2]) : 0.5;
    const ProbeMode probe{alpha, theta};
    const double h = std::sqrt(0.5);
    RngStream rng(argc > 3 ? std::strtoull(argv[3], nullptr, 10) : 2026);

    std::cout << "alpha=" << alpha << " theta=" << theta << " X_d=" << geometry(alpha, theta).xd
              << " p_error=" << p_error(alpha, theta) << "\n";
    std::cout << "qubit order: control, ancilla, target\n";

    const std::pair<Complex, Complex> H{1.0, 0.0};
    const std::pair<Complex, Complex> V{0.0, 1.0};
    const char *names[] = {"HH", "HV", "VH", "VV"};
    int i = 0;
    for (auto c : {H, V}) {
        for (auto d : {H, V}) {
            auto [trace, out] = cnot(new_state({c, {h, h}, d}), 0, 1, 2, {probe, probe}, rng);
            report(names[i++], trace, out);
        }
    }

    auto [trace, out] = cnot(new_state({{h, h}, {h, h}, H}), 0, 1, 2, {probe, probe}, rng);
    report("DH", trace, out);
    return 0;
}
