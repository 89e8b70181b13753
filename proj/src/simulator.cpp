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

#include "qgse/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qgse/rng.hpp"

namespace qgse {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr cplx kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

using Amps = std::span<cplx>;

template <class Fn>
void for_pairs(std::size_t dim, std::uint64_t bit, Fn&& fn) {
  for (std::uint64_t b = 0; b < dim; ++b) {
    if ((b & bit) == 0) fn(b, b | bit);
  }
}

void apply_1q(Amps a, int q, const cplx m[2][2]) {
  for_pairs(a.size(), std::uint64_t{1} << q, [&](std::uint64_t b0, std::uint64_t b1) {
    const cplx a0 = a[b0], a1 = a[b1];
    a[b0] = m[0][0] * a0 + m[0][1] * a1;
    a[b1] = m[1][0] * a0 + m[1][1] * a1;
  });
}

// cos(t/2) - i sin(t/2) P on the amplitudes whose control bits are all set.
void apply_pauli_rotation(Amps a, const PauliString& p, double theta, std::uint64_t control) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const std::uint64_t x = p.x_bits(), z = p.z_bits();
  const cplx base = kIPow[std::popcount(x & z) & 3];
  auto phase = [&](std::uint64_t b) { return (std::popcount(b & z) & 1) ? -base : base; };
  for (std::uint64_t b = 0; b < a.size(); ++b) {
    if ((b & control) != control) continue;
    const std::uint64_t partner = b ^ x;
    if (x == 0) {
      a[b] *= c - kI * s * phase(b);
    } else if (b < partner) {
      const cplx ab = a[b], ap = a[partner];
      // (P a)[b] = phase(partner) a[partner]
      a[b] = c * ab - kI * s * phase(partner) * ap;
      a[partner] = c * ap - kI * s * phase(b) * ab;
    }
  }
}

// Applies exp(-itH) of `prop` to the register qubits `targets` on the
// subspace where every bit in `control` is set.
void apply_evolution(Amps a, const ExactPropagator& prop, std::span<const int> targets,
                     double t, std::uint64_t control) {
  const std::size_t k = targets.size();
  const std::size_t sub = std::size_t{1} << k;
  std::uint64_t target_mask = 0;
  for (int q : targets) target_mask |= std::uint64_t{1} << q;
  std::vector<std::uint64_t> offsets(sub, 0);
  for (std::size_t local = 0; local < sub; ++local) {
    for (std::size_t i = 0; i < k; ++i) {
      if ((local >> i) & 1U) offsets[local] |= std::uint64_t{1} << targets[i];
    }
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(sub));
  for (std::uint64_t base = 0; base < a.size(); ++base) {
    if ((base & target_mask) != 0 || (base & control) != control) continue;
    for (std::size_t local = 0; local < sub; ++local) {
      v(static_cast<Eigen::Index>(local)) = a[base | offsets[local]];
    }
    const Eigen::VectorXcd w = prop.apply(v, t);
    for (std::size_t local = 0; local < sub; ++local) {
      a[base | offsets[local]] = w(static_cast<Eigen::Index>(local));
    }
  }
}

}  // namespace

void apply_gate(StateVector& state, const Gate& g, std::span<const double> params) {
  for (int q : g.qubits) {
    if (q < 0 || q >= state.n_qubits()) {
      throw std::out_of_range("gate qubit " + std::to_string(q) + " outside register of width " +
                              std::to_string(state.n_qubits()));
    }
  }
  Amps a = state.amplitudes();
  const double theta = is_rotation(g.kind) ? resolve(g.angle, params) : 0.0;
  switch (g.kind) {
    case GateKind::kH: {
      const double r = 1.0 / std::sqrt(2.0);
      const cplx m[2][2] = {{r, r}, {r, -r}};
      apply_1q(a, g.qubits[0], m);
      break;
    }
    case GateKind::kS:
    case GateKind::kSdg: {
      const cplx ph = g.kind == GateKind::kS ? kI : -kI;
      const std::uint64_t bit = std::uint64_t{1} << g.qubits[0];
      for (std::uint64_t b = 0; b < a.size(); ++b) {
        if (b & bit) a[b] *= ph;
      }
      break;
    }
    case GateKind::kRx: {
      const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
      const cplx m[2][2] = {{c, -kI * s}, {-kI * s, c}};
      apply_1q(a, g.qubits[0], m);
      break;
    }
    case GateKind::kRz: {
      const cplx m[2][2] = {{std::polar(1.0, -0.5 * theta), 0.0},
                            {0.0, std::polar(1.0, 0.5 * theta)}};
      apply_1q(a, g.qubits[0], m);
      break;
    }
    case GateKind::kZZPhase: {
      const std::uint64_t m0 = std::uint64_t{1} << g.qubits[0], m1 = std::uint64_t{1} << g.qubits[1];
      const cplx even = std::polar(1.0, -0.5 * theta), odd = std::polar(1.0, 0.5 * theta);
      for (std::uint64_t b = 0; b < a.size(); ++b) {
        a[b] *= (((b & m0) != 0) == ((b & m1) != 0)) ? even : odd;
      }
      break;
    }
    case GateKind::kCX: {
      const std::uint64_t c = std::uint64_t{1} << g.qubits[0], t = std::uint64_t{1} << g.qubits[1];
      for (std::uint64_t b = 0; b < a.size(); ++b) {
        if ((b & c) && !(b & t)) std::swap(a[b], a[b | t]);
      }
      break;
    }
    case GateKind::kCZ: {
      const std::uint64_t both = (std::uint64_t{1} << g.qubits[0]) | (std::uint64_t{1} << g.qubits[1]);
      for (std::uint64_t b = 0; b < a.size(); ++b) {
        if ((b & both) == both) a[b] = -a[b];
      }
      break;
    }
    case GateKind::kPauliExp:
      apply_pauli_rotation(a, g.pauli, theta, 0);
      break;
    case GateKind::kCPauliExp:
      apply_pauli_rotation(a, g.pauli, theta, std::uint64_t{1} << g.qubits[0]);
      break;
    case GateKind::kEvolve:
      apply_evolution(a, *g.evolution, g.qubits, theta, 0);
      break;
    case GateKind::kCEvolve:
      apply_evolution(a, *g.evolution, std::span<const int>(g.qubits).subspan(1), theta,
                      std::uint64_t{1} << g.qubits[0]);
      break;
  }
}

void apply_circuit_inplace(StateVector& state, const Circuit& c, std::span<const double> params) {
  if (c.n_qubits() != state.n_qubits()) {
    throw std::invalid_argument("apply_circuit: circuit width " + std::to_string(c.n_qubits()) +
                                " vs state width " + std::to_string(state.n_qubits()));
  }
  for (const auto& g : c.gates()) apply_gate(state, g, params);
}

StateVector apply_circuit(StateVector state, const Circuit& c, std::span<const double> params) {
  apply_circuit_inplace(state, c, params);
  return state;
}

std::vector<double> probabilities(const StateVector& state) {
  std::vector<double> p(state.dim());
  const auto a = state.amplitudes();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(a[i]);
  return p;
}

double z_expectation(const StateVector& state, std::uint64_t z_mask) {
  double s = 0.0;
  const auto a = state.amplitudes();
  for (std::uint64_t b = 0; b < a.size(); ++b) {
    const double p = std::norm(a[b]);
    s += (std::popcount(b & z_mask) & 1) ? -p : p;
  }
  return s;
}

ShotRecord sample_z(const StateVector& state, std::size_t spc, std::uint64_t seed,
                    const SampleOptions& options) {
  if (spc == 0) throw std::invalid_argument("sample_z: spc must be >= 1");
  if (options.depolarizing < 0.0 || options.depolarizing > 1.0) {
    throw std::invalid_argument("sample_z: depolarizing strength outside [0, 1]");
  }
  std::vector<double> cdf = probabilities(state);
  for (std::size_t i = 1; i < cdf.size(); ++i) cdf[i] += cdf[i - 1];
  const double total = cdf.back();

  ShotRecord rec;
  rec.n_qubits = state.n_qubits();
  rec.seed = seed;
  rec.bitstrings.reserve(spc);
  CounterRng rng(seed);
  for (std::size_t s = 0; s < spc; ++s) {
    if (options.depolarizing > 0.0 && rng.uniform() < options.depolarizing) {
      rec.bitstrings.push_back(rng.below(state.dim()));
      continue;
    }
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    rec.bitstrings.push_back(static_cast<std::uint64_t>(it - cdf.begin()));
  }
  return rec;
}

double estimate_pauli_z(const ShotRecord& record, std::uint64_t z_mask) {
  if (record.n_qubits < 64 && (z_mask >> record.n_qubits) != 0) {
    throw std::invalid_argument("estimate_pauli_z: mask outside register");
  }
  if (record.bitstrings.empty()) throw std::invalid_argument("estimate_pauli_z: no shots");
  long long acc = 0;
  for (std::uint64_t b : record.bitstrings) acc += (std::popcount(b & z_mask) & 1) ? -1 : 1;
  return static_cast<double>(acc) / static_cast<double>(record.bitstrings.size());
}

void write_shots_csv(std::ostream& os, const ShotRecord& record) {
  os << "# seed=" << record.seed << " spc=" << record.spc() << " n_qubits=" << record.n_qubits
     << "\nbitstring\n";
  std::string row(static_cast<std::size_t>(record.n_qubits), '0');
  for (std::uint64_t b : record.bitstrings) {
    for (int q = 0; q < record.n_qubits; ++q) row[static_cast<std::size_t>(q)] = ((b >> q) & 1U) ? '1' : '0';
    os << row << '\n';
  }
}

ShotRecord read_shots_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) {
    throw std::invalid_argument("shot CSV: missing '# seed=... spc=... n_qubits=...' header");
  }
  ShotRecord rec;
  std::size_t spc = 0;
  std::istringstream hs(line.substr(2));
  std::string kv;
  while (hs >> kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("shot CSV: bad header field " + kv);
    const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "seed") {
      rec.seed = std::stoull(val);
    } else if (key == "spc") {
      spc = std::stoull(val);
    } else if (key == "n_qubits") {
      rec.n_qubits = std::stoi(val);
    } else {
      throw std::invalid_argument("shot CSV: unknown header field " + key);
    }
  }
  if (!std::getline(is, line) || line != "bitstring") {
    throw std::invalid_argument("shot CSV: missing column header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.size() != static_cast<std::size_t>(rec.n_qubits)) {
      throw std::invalid_argument("shot CSV: row width does not match n_qubits");
    }
    std::uint64_t b = 0;
    for (int q = 0; q < rec.n_qubits; ++q) {
      const char ch = line[static_cast<std::size_t>(q)];
      if (ch != '0' && ch != '1') throw std::invalid_argument("shot CSV: non-binary row");
      if (ch == '1') b |= std::uint64_t{1} << q;
    }
    rec.bitstrings.push_back(b);
  }
  if (rec.bitstrings.size() != spc) throw std::invalid_argument("shot CSV: row count != spc");
  return rec;
}

}  // namespace qgse
