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

#include <stdexcept>
#include <string>

namespace kerrqnd {

/// Bad input values: non-normalized amplitudes, out-of-range parameters,
/// non-unitary matrices, truncation too small.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An operation was called on a state that does not satisfy its
/// precondition (e.g. measuring a probe that is not active).
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace kerrqnd
