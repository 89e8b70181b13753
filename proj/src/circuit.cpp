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

#include "qgse/circuit.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <string>

#include "qgse/pauli_json.hpp"
#include "qgse/propagator.hpp"

namespace qgse {

namespace {

struct KindInfo {
  GateKind kind;
  std::string_view name;
};

constexpr std::array<KindInfo, 12> kKinds = {{
    {GateKind::kH, "h"},
    {GateKind::kS, "s"},
    {GateKind::kSdg, "sdg"},
    {GateKind::kRx, "rx"},
    {GateKind::kRz, "rz"},
    {GateKind::kZZPhase, "zzphase"},
    {GateKind::kCX, "cx"},
    {GateKind::kCZ, "cz"},
    {GateKind::kPauliExp, "pauliexp"},
    {GateKind::kCPauliExp, "cpauliexp"},
    {GateKind::kEvolve, "evolve"},
    {GateKind::kCEvolve, "cevolve"},
}};

std::vector<int> support_qubits(const PauliString& p) {
  std::vector<int> out;
  for (const auto& [q, a] : p.support()) out.push_back(q);
  return out;
}

}  // namespace

std::string_view gate_name(GateKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k.name;
  }
  return "?";
}

GateKind gate_kind_from_name(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

bool is_rotation(GateKind kind) {
  switch (kind) {
    case GateKind::kRx:
    case GateKind::kRz:
    case GateKind::kZZPhase:
    case GateKind::kPauliExp:
    case GateKind::kCPauliExp:
    case GateKind::kEvolve:
    case GateKind::kCEvolve:
      return true;
    default:
      return false;
  }
}

double resolve(const Angle& angle, std::span<const double> params) {
  if (const auto* v = std::get_if<double>(&angle)) return *v;
  const int id = std::get<ParamRef>(angle).id;
  if (id < 0 || static_cast<std::size_t>(id) >= params.size()) {
    throw std::out_of_range("parameter " + std::to_string(id) + " not bound");
  }
  return params[static_cast<std::size_t>(id)];
}

Circuit& Circuit::add(Gate gate) {
  std::size_t arity = 0;
  switch (gate.kind) {
    case GateKind::kH:
    case GateKind::kS:
    case GateKind::kSdg:
    case GateKind::kRx:
    case GateKind::kRz:
      arity = 1;
      break;
    case GateKind::kZZPhase:
    case GateKind::kCX:
    case GateKind::kCZ:
      arity = 2;
      break;
    case GateKind::kPauliExp:
      gate.qubits = support_qubits(gate.pauli);
      arity = gate.qubits.size();
      break;
    case GateKind::kCPauliExp: {
      if (gate.qubits.empty()) throw std::invalid_argument("cpauliexp needs a control qubit");
      const int control = gate.qubits.front();
      if (control >= 0 && control < kMaxPauliQubits && gate.pauli.axis(control) != Axis::I) {
        throw std::invalid_argument("cpauliexp control inside the rotation support");
      }
      gate.qubits = {control};
      for (int q : support_qubits(gate.pauli)) gate.qubits.push_back(q);
      arity = gate.qubits.size();
      break;
    }
    case GateKind::kEvolve:
    case GateKind::kCEvolve:
      if (!gate.evolution) throw std::invalid_argument("evolve gate without a generator");
      arity = static_cast<std::size_t>(gate.evolution->n_qubits()) +
              (gate.kind == GateKind::kCEvolve ? 1 : 0);
      break;
  }
  if (gate.qubits.size() != arity) {
    throw std::invalid_argument(std::string(gate_name(gate.kind)) + " expects " +
                                std::to_string(arity) + " qubits");
  }
  std::set<int> seen;
  for (int q : gate.qubits) {
    if (q < 0 || q >= n_qubits_) {
      throw std::out_of_range(std::string(gate_name(gate.kind)) + ": qubit " + std::to_string(q) +
                              " outside register of width " + std::to_string(n_qubits_));
    }
    if (!seen.insert(q).second) throw std::invalid_argument("gate qubits repeat");
  }
  gates_.push_back(std::move(gate));
  return *this;
}

Circuit& Circuit::pauliexp(const PauliString& p, Angle a) {
  Gate g{GateKind::kPauliExp, {}, a};
  g.pauli = p;
  return add(std::move(g));
}

Circuit& Circuit::cpauliexp(int control, const PauliString& p, Angle a) {
  Gate g{GateKind::kCPauliExp, {control}, a};
  g.pauli = p;
  return add(std::move(g));
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ > n_qubits_) throw std::invalid_argument("append: wider circuit");
  for (const auto& g : other.gates_) add(g);
  return *this;
}

int Circuit::num_parameters() const {
  std::set<int> ids;
  for (const auto& g : gates_) {
    if (const auto* p = std::get_if<ParamRef>(&g.angle)) ids.insert(p->id);
  }
  if (ids.empty()) return 0;
  if (*ids.begin() != 0 || *ids.rbegin() != static_cast<int>(ids.size()) - 1) {
    throw std::logic_error("symbolic parameter ids are not contiguous from 0");
  }
  return static_cast<int>(ids.size());
}

nlohmann::json to_json(const Circuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.gates()) {
    nlohmann::json jg = {{"kind", gate_name(g.kind)}, {"qubits", g.qubits}};
    if (is_rotation(g.kind)) {
      if (const auto* p = std::get_if<ParamRef>(&g.angle)) {
        jg["angle"] = {{"param", p->id}};
      } else {
        jg["angle"] = std::get<double>(g.angle);
      }
    }
    if (g.kind == GateKind::kPauliExp || g.kind == GateKind::kCPauliExp) {
      jg["paulis"] = g.pauli.to_string();
    }
    if (g.evolution) jg["hamiltonian"] = to_json(g.evolution->hamiltonian());
    gates.push_back(std::move(jg));
  }
  return {{"n_qubits", c.n_qubits()}, {"gates", std::move(gates)}};
}

Circuit circuit_from_json(const nlohmann::json& j) {
  Circuit c(j.at("n_qubits").get<int>());
  for (const auto& jg : j.at("gates")) {
    Gate g;
    g.kind = gate_kind_from_name(jg.at("kind").get<std::string>());
    g.qubits = jg.at("qubits").get<std::vector<int>>();
    if (jg.contains("angle")) {
      const auto& a = jg.at("angle");
      if (a.is_object()) {
        g.angle = ParamRef{a.at("param").get<int>()};
      } else {
        g.angle = a.get<double>();
      }
    }
    if (jg.contains("paulis")) g.pauli = PauliString::parse(jg.at("paulis").get<std::string>());
    if (jg.contains("hamiltonian")) {
      g.evolution = std::make_shared<const ExactPropagator>(pauli_sum_from_json(jg.at("hamiltonian")));
    }
    c.add(std::move(g));
  }
  return c;
}

}  // namespace qgse
