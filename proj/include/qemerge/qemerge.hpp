// Copyright 2026 The qemerge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QEMERGE_QEMERGE_HPP_
#define QEMERGE_QEMERGE_HPP_

#include "qemerge/bit_chains.hpp"
#include "qemerge/classical_ensemble.hpp"
#include "qemerge/core.hpp"
#include "qemerge/evolution.hpp"
#include "qemerge/generator_basis.hpp"
#include "qemerge/measurement.hpp"
#include "qemerge/observables.hpp"
#include "qemerge/quantum_state.hpp"

#endif  // QEMERGE_QEMERGE_HPP_
