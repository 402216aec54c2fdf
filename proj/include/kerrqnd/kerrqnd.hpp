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

#include "kerrqnd/analysis.hpp"
#include "kerrqnd/errors.hpp"
#include "kerrqnd/fock_oracle.hpp"
#include "kerrqnd/gates.hpp"
#include "kerrqnd/measurement.hpp"
#include "kerrqnd/optics.hpp"
#include "kerrqnd/rng.hpp"
#include "kerrqnd/state.hpp"
