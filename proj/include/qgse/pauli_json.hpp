// Copyright 2026 The qgse Authors
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

#pragma once

#include <nlohmann/json.hpp>

#include "qgse/pauli.hpp"

namespace qgse {

// {"n_qubits": 4, "terms": [{"coeff": [re, im], "paulis": "X0 Z1"}]}
nlohmann::json to_json(const PauliSum& a);
PauliSum pauli_sum_from_json(const nlohmann::json& j);

}  // namespace qgse
