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

#include "qgse/pauli_json.hpp"

#include <stdexcept>

namespace qgse {

nlohmann::json to_json(const PauliSum& a) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : a) {
    terms.push_back({{"coeff", {t.coeff.real(), t.coeff.imag()}}, {"paulis", t.pauli.to_string()}});
  }
  return {{"n_qubits", a.n_qubits()}, {"terms", std::move(terms)}};
}

PauliSum pauli_sum_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n_qubits") || !j.contains("terms")) {
    throw std::invalid_argument("Pauli-sum JSON needs 'n_qubits' and 'terms'");
  }
  const int n = j.at("n_qubits").get<int>();
  std::vector<PauliTerm> terms;
  for (const auto& t : j.at("terms")) {
    const auto& c = t.at("coeff");
    cplx coeff;
    if (c.is_array()) {
      if (c.size() != 2) throw std::invalid_argument("coeff must be [re, im]");
      coeff = {c[0].get<double>(), c[1].get<double>()};
    } else {
      coeff = c.get<double>();
    }
    terms.push_back({PauliString::parse(t.at("paulis").get<std::string>()), coeff});
  }
  return PauliSum(n, std::move(terms));
}

}  // namespace qgse
