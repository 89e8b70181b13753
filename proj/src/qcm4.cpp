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

#include "qgse/qcm4.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>

#include "qgse/parallel.hpp"
#include "qgse/rng.hpp"

namespace qgse {

TermCapExceeded::TermCapExceeded(int moment, std::size_t terms, std::size_t cap)
    : std::runtime_error("H^" + std::to_string(moment) + " has " + std::to_string(terms) +
                         " terms, above the cap of " + std::to_string(cap)),
      moment_(moment) {}

MomentOperators build_moments(const PauliSum& h, double threshold, std::size_t term_cap) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("build_moments: H not Hermitian");
  if (threshold < 0.0) throw std::invalid_argument("build_moments: negative threshold");
  MomentOperators m;
  m.threshold = threshold;
  m.powers[0] = h;
  if (h.size() > term_cap) throw TermCapExceeded(1, h.size(), term_cap);
  for (int n = 1; n < kMoments; ++n) {
    m.powers[n] = sum_multiply(m.powers[n - 1], h);
    if (m.powers[n].size() > term_cap) throw TermCapExceeded(n + 1, m.powers[n].size(), term_cap);
  }
  for (int n = 0; n < kMoments; ++n) {
    Truncation t = truncate(m.powers[n], threshold);
    m.powers[n] = std::move(t.kept);
    m.dropped_weights[n] = t.dropped_weight;
    m.term_counts[n] = m.powers[n].size();
  }
  return m;
}

FilteredMoments pauli_filter(const MomentOperators& m, const StateVector& psi, double tol) {
  FilteredMoments out;
  out.moments = m;
  std::map<PauliString, double> values;
  for (int n = 0; n < kMoments; ++n) {
    if (m.powers[n].n_qubits() != psi.n_qubits()) throw std::invalid_argument("pauli_filter: width mismatch");
    std::vector<PauliTerm> kept;
    for (const auto& t : m.powers[n]) {
      auto it = values.find(t.pauli);
      if (it == values.end()) it = values.emplace(t.pauli, expectation(psi, t.pauli).real()).first;
      if (std::abs(it->second) > tol) {
        kept.push_back(t);
        ++out.report.kept[n];
      } else {
        ++out.report.dropped[n];
      }
    }
    out.moments.powers[n] = PauliSum(psi.n_qubits(), std::move(kept));
    out.moments.term_counts[n] = out.moments.powers[n].size();
  }
  for (const auto& [p, v] : values) {
    if (std::abs(v) <= tol) out.report.audit.emplace_back(p, v);
  }
  return out;
}

std::size_t MeasurementPlan::term_count() const {
  std::size_t n = 0;
  for (const auto& c : circuits) n += c.terms.size();
  return n;
}

namespace {

struct Row {
  std::uint64_t x = 0, z = 0;
  bool r = false;
};

bool bit(std::uint64_t v, int q) { return (v >> q) & 1U; }
void flip(std::uint64_t& v, int q) { v ^= std::uint64_t{1} << q; }

class Tableau {
 public:
  Tableau(std::vector<Row> rows, int n) : rows_(std::move(rows)), circuit_(n) {}

  void h(int q) {
    for (auto& row : rows_) {
      const bool x = bit(row.x, q), z = bit(row.z, q);
      row.r ^= x && z;
      if (x != z) {
        flip(row.x, q);
        flip(row.z, q);
      }
    }
    circuit_.h(q);
  }
  void sdg(int q) {
    for (auto& row : rows_) {
      const bool x = bit(row.x, q), z = bit(row.z, q);
      row.r ^= x && !z;
      if (x) flip(row.z, q);
    }
    circuit_.sdg(q);
  }
  void cx(int c, int t) {
    cx_rows(c, t);
    circuit_.cx(c, t);
  }
  void cz(int a, int b) {
    h_rows(b);
    cx_rows(a, b);
    h_rows(b);
    circuit_.cz(a, b);
  }

  std::vector<Row>& rows() { return rows_; }
  Circuit take_circuit() { return std::move(circuit_); }

 private:
  void h_rows(int q) {
    for (auto& row : rows_) {
      const bool x = bit(row.x, q), z = bit(row.z, q);
      row.r ^= x && z;
      if (x != z) {
        flip(row.x, q);
        flip(row.z, q);
      }
    }
  }
  void cx_rows(int c, int t) {
    for (auto& row : rows_) {
      const bool xc = bit(row.x, c), zc = bit(row.z, c), xt = bit(row.x, t), zt = bit(row.z, t);
      row.r ^= xc && zt && (xt == zc);
      if (xc) flip(row.x, t);
      if (zt) flip(row.z, c);
    }
  }

  std::vector<Row> rows_;
  Circuit circuit_;
};

}  // namespace

MeasurementCircuit diagonalize(std::span<const PauliString> set, int n_qubits) {
  std::vector<Row> rows;
  for (const auto& p : set) {
    if (p.max_qubit() >= n_qubits) throw std::invalid_argument("diagonalize: string outside the register");
    rows.push_back({p.x_bits(), p.z_bits(), false});
  }
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = i + 1; j < set.size(); ++j) {
      if (!commutes(set[i], set[j], CommuteMode::kFull)) {
        throw std::invalid_argument("diagonalize: " + set[i].to_string() + " and " +
                                    set[j].to_string() + " anticommute");
      }
    }
  }
  Tableau tab(std::move(rows), n_qubits);
  for (;;) {
    const auto& cur = tab.rows();
    const auto it = std::find_if(cur.begin(), cur.end(), [](const Row& r) { return r.x != 0; });
    if (it == cur.end()) break;
    const std::size_t idx = static_cast<std::size_t>(it - cur.begin());
    const int q = std::countr_zero(it->x);
    for (std::uint64_t rest = it->x & ~(std::uint64_t{1} << q); rest != 0; rest &= rest - 1) {
      tab.cx(q, std::countr_zero(rest));
    }
    for (std::uint64_t rest = tab.rows()[idx].z & ~(std::uint64_t{1} << q); rest != 0; rest &= rest - 1) {
      tab.cz(q, std::countr_zero(rest));
    }
    if (bit(tab.rows()[idx].z, q)) tab.sdg(q);
    tab.h(q);
  }
  MeasurementCircuit mc;
  const auto& done = tab.rows();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (done[i].x != 0) throw std::logic_error("diagonalize: " + set[i].to_string() + " not diagonalized");
    mc.terms.push_back({set[i], done[i].z, done[i].r ? -1 : 1, {}});
  }
  mc.clifford = tab.take_circuit();
  return mc;
}

MeasurementPlan plan(const MomentOperators& m, CommuteMode mode) {
  MeasurementPlan p;
  p.n_qubits = m.powers[0].n_qubits();
  p.mode = mode;
  std::map<PauliString, MomentArray> coeffs;
  for (int n = 0; n < kMoments; ++n) {
    for (const auto& t : m.powers[n]) {
      if (t.pauli.is_identity()) {
        p.constants[n] = t.coeff.real();
      } else {
        coeffs[t.pauli][n] = t.coeff.real();
      }
    }
  }
  std::vector<PauliString> strings;
  for (const auto& [s, c] : coeffs) strings.push_back(s);
  const CommutingSets groups = group_commuting(strings, mode);
  for (const auto& set : groups.sets) {
    std::vector<PauliString> members;
    for (std::size_t i : set) members.push_back(strings[i]);
    MeasurementCircuit mc = diagonalize(members, p.n_qubits);
    for (auto& t : mc.terms) t.coeff = coeffs.at(t.pauli);
    p.circuits.push_back(std::move(mc));
  }
  return p;
}

namespace {

MomentArray accumulate(const MeasurementPlan& p, const std::vector<std::vector<double>>& values) {
  MomentArray m = p.constants;
  for (std::size_t c = 0; c < p.circuits.size(); ++c) {
    const auto& terms = p.circuits[c].terms;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      for (int n = 0; n < kMoments; ++n) m[n] += terms[k].coeff[n] * values[c][k];
    }
  }
  return m;
}

std::vector<double> term_values(const MeasurementCircuit& mc, const ShotRecord& rec) {
  std::unordered_map<std::uint64_t, std::size_t> hist;
  for (auto b : rec.bitstrings) ++hist[b];
  std::vector<double> out;
  const auto spc = static_cast<double>(rec.spc());
  for (const auto& t : mc.terms) {
    double s = 0.0;
    for (const auto& [b, count] : hist) {
      s += (std::popcount(b & t.z_mask) & 1) ? -static_cast<double>(count) : static_cast<double>(count);
    }
    out.push_back(t.sign * s / spc);
  }
  return out;
}

}  // namespace

MomentEstimates estimate(const MeasurementPlan& p, const StateVector& psi, const EstimateOptions& options) {
  if (psi.n_qubits() != p.n_qubits) throw std::invalid_argument("estimate: width mismatch");
  MomentEstimates est;
  est.mode = options.mode;
  est.seed = options.seed;
  const std::size_t nc = p.circuits.size();
  std::vector<std::vector<double>> values(nc);

  if (options.mode == EstimateMode::kExact) {
    parallel_for(nc, options.threads, [&](std::size_t c) {
      const StateVector s = apply_circuit(psi, p.circuits[c].clifford);
      for (const auto& t : p.circuits[c].terms) values[c].push_back(t.sign * z_expectation(s, t.z_mask));
    });
    est.moments = accumulate(p, values);
    return est;
  }

  if (options.spc == 0) throw std::invalid_argument("estimate: shots mode needs spc >= 1");
  est.spc = options.spc;
  std::vector<std::size_t> shots(nc, options.spc);
  if (options.allocation == ShotAllocation::kVarianceWeighted && nc > 0) {
    std::vector<double> w(nc, 0.0);
    double total_w = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      for (const auto& t : p.circuits[c].terms) {
        for (double a : t.coeff) w[c] += std::abs(a);
      }
      total_w += w[c];
    }
    const double budget = static_cast<double>(options.spc * nc);
    for (std::size_t c = 0; c < nc; ++c) {
      shots[c] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(budget * w[c] / total_w)));
    }
  }
  est.records.resize(nc);
  parallel_for(nc, options.threads, [&](std::size_t c) {
    const StateVector s = apply_circuit(psi, p.circuits[c].clifford);
    est.records[c] = sample_z(s, shots[c], derive_seed(options.seed, c), SampleOptions{options.depolarizing});
  });
  est.moments = moments_from_records(p, est.records);
  return est;
}

MomentArray moments_from_records(const MeasurementPlan& p, std::span<const ShotRecord> records) {
  if (records.size() != p.circuits.size()) {
    throw std::invalid_argument("moments_from_records: one record per circuit required");
  }
  std::vector<std::vector<double>> values;
  for (std::size_t c = 0; c < records.size(); ++c) values.push_back(term_values(p.circuits[c], records[c]));
  return accumulate(p, values);
}

MomentArray cumulants(const MomentArray& m) {
  // Binomial coefficients C(n-1, p) for n = 1..4.
  static constexpr int kBinom[4][3] = {{0, 0, 0}, {1, 0, 0}, {1, 2, 0}, {1, 3, 3}};
  MomentArray c{};
  for (int n = 1; n <= kMoments; ++n) {
    double v = m[n - 1];
    for (int p = 0; p <= n - 2; ++p) v -= kBinom[n - 1][p] * c[p] * m[n - p - 2];
    c[n - 1] = v;
  }
  return c;
}

std::string_view formula_name(Qcm4Formula f) {
  return f == Qcm4Formula::kC2Cubed ? "c2_cubed" : "connected_moments";
}

Qcm4Formula qcm4_formula_from_name(std::string_view name) {
  if (name == "c2_cubed") return Qcm4Formula::kC2Cubed;
  if (name == "connected_moments") return Qcm4Formula::kConnectedMoments;
  throw std::invalid_argument("unknown QCM4 formula '" + std::string(name) + "'");
}

double qcm4_energy(const MomentArray& c, double guard, double clamp, Qcm4Formula formula) {
  const double c1 = c[0], c2 = c[1], c3 = c[2], c4 = c[3];
  if (std::abs(c2) < guard) return c1;
  double disc = 3.0 * c3 * c3 - 2.0 * c2 * c4;
  if (disc < 0.0) {
    if (disc < -clamp) throw std::domain_error("qcm4_energy: negative discriminant " + std::to_string(disc));
    disc = 0.0;
  }
  if (formula == Qcm4Formula::kConnectedMoments) {
    const double den = c3 * c3 - c2 * c4;
    if (den == 0.0 || !std::isfinite(den)) throw std::domain_error("qcm4_energy: zero denominator");
    return c1 - c2 * c2 / den * (std::sqrt(disc) - c3);
  }
  const double den = c2 * c2 * c2 - c2 * c4;
  if (den == 0.0 || !std::isfinite(den)) throw std::domain_error("qcm4_energy: zero denominator");
  return c1 - c2 * c2 * c2 / den * (std::sqrt(disc) - c3);
}

BootstrapResult bootstrap(const MeasurementPlan& p, const MomentEstimates& est, std::size_t resamples,
                          std::uint64_t seed, int threads, Qcm4Formula formula) {
  if (est.mode == EstimateMode::kExact || est.records.empty() != p.circuits.empty()) {
    throw std::invalid_argument("bootstrap: needs shot records");
  }
  if (est.records.size() != p.circuits.size()) throw std::invalid_argument("bootstrap: record count mismatch");
  std::vector<double> energies(resamples, std::numeric_limits<double>::quiet_NaN());
  parallel_for(resamples, threads, [&](std::size_t r) {
    std::vector<ShotRecord> res(est.records.size());
    for (std::size_t c = 0; c < est.records.size(); ++c) {
      const auto& src = est.records[c];
      CounterRng rng(derive_seed(derive_seed(seed, r), c));
      res[c].n_qubits = src.n_qubits;
      res[c].bitstrings.resize(src.spc());
      for (auto& b : res[c].bitstrings) b = src.bitstrings[rng.below(src.spc())];
    }
    try {
      energies[r] = qcm4_energy(cumulants(moments_from_records(p, res)), 1e-10, 1e-9, formula);
    } catch (const std::domain_error&) {
      // counted as a failure below
    }
  });
  BootstrapResult out;
  out.resamples = resamples;
  for (std::size_t r = 0; r < resamples; ++r) {
    if (std::isfinite(energies[r])) {
      out.indices.push_back(r);
      out.energies.push_back(energies[r]);
    } else {
      ++out.failures;
    }
  }
  const auto k = out.energies.size();
  if (k > 0) {
    double sum = 0.0;
    for (double e : out.energies) sum += e;
    out.mean = sum / static_cast<double>(k);
    double ss = 0.0;
    for (double e : out.energies) ss += (e - out.mean) * (e - out.mean);
    out.std = k > 1 ? std::sqrt(ss / static_cast<double>(k - 1)) : 0.0;
  }
  return out;
}

nlohmann::json moment_report(const MomentOperators& m, const MeasurementPlan& p, const FilterReport* filter) {
  nlohmann::json j = {{"term_counts", m.term_counts},
                      {"threshold", m.threshold},
                      {"dropped_weights", m.dropped_weights},
                      {"distinct_measured_terms", p.term_count()},
                      {"circuits", p.circuits.size()},
                      {"grouping", p.mode == CommuteMode::kFull ? "full" : "qubitwise"}};
  if (filter != nullptr) {
    j["filter"] = {{"kept", filter->kept}, {"dropped", filter->dropped}, {"audit_strings", filter->audit.size()}};
  }
  return j;
}

void write_bootstrap_csv(std::ostream& os, const BootstrapResult& b) {
  os << "resample,energy\n" << std::setprecision(17);
  for (std::size_t i = 0; i < b.energies.size(); ++i) os << b.indices[i] << ',' << b.energies[i] << '\n';
}

}  // namespace qgse
