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

#include "qgse/chem.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <unordered_map>

namespace qgse {

// ---------------------------------------------------------------------------
// Integrals and FCIDUMP

FermionIntegrals::FermionIntegrals(int norb, int nelec, int ms2)
    : norb_(norb), nelec_(nelec), ms2_(ms2) {
  if (norb <= 0 || norb > kMaxPauliQubits / 2) {
    throw std::invalid_argument("norb must be in [1, 32]");
  }
  if (nelec < 0 || nelec > 2 * norb) throw std::invalid_argument("nelec outside [0, 2*norb]");
  if (std::abs(ms2) > nelec || (nelec + ms2) % 2 != 0) {
    throw std::invalid_argument("ms2 inconsistent with nelec");
  }
  const auto n = static_cast<std::size_t>(norb);
  h1_.assign(n * n, 0.0);
  h2_.assign(n * n * n * n, 0.0);
}

void FermionIntegrals::set_one_body(int p, int q, double v) {
  h1_[idx2(p, q)] = v;
  h1_[idx2(q, p)] = v;
}

void FermionIntegrals::set_two_body(int p, int q, int r, int s, double v) {
  for (auto [a, b] : {std::pair{p, q}, std::pair{q, p}}) {
    for (auto [c, d] : {std::pair{r, s}, std::pair{s, r}}) {
      h2_[idx4(a, b, c, d)] = v;
      h2_[idx4(c, d, a, b)] = v;
    }
  }
}

namespace {

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

double parse_real(std::string tok, int line) {
  std::replace(tok.begin(), tok.end(), 'D', 'E');
  std::replace(tok.begin(), tok.end(), 'd', 'e');
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("non-numeric value '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("non-numeric value '" + tok + "'", line);
  return v;
}

int parse_index(const std::string& tok, int line) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(tok, &used);
  } catch (const std::exception&) {
    throw ParseError("non-integer index '" + tok + "'", line);
  }
  if (used != tok.size()) throw ParseError("non-integer index '" + tok + "'", line);
  return v;
}

}  // namespace

FermionIntegrals parse_fcidump(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;

  std::string header;
  bool started = false, finished = false;
  while (!finished && std::getline(in, line)) {
    ++lineno;
    std::string u = upper(line);
    if (!started) {
      const auto pos = u.find("&FCI");
      if (pos == std::string::npos) {
        if (u.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError("malformed header: expected '&FCI'", lineno);
      }
      started = true;
      u = u.substr(pos + 4);
    }
    const auto end_pos = std::min(u.find("&END"), u.find('/'));
    if (end_pos != std::string::npos) {
      u = u.substr(0, end_pos);
      finished = true;
    }
    header += u + ' ';
  }
  if (!started) throw ParseError("malformed header: expected '&FCI'", 0);
  if (!finished) throw ParseError("malformed header: missing '&END' or '/'", lineno);

  std::map<std::string, std::string> fields;
  static const std::regex kField(R"(([A-Z][A-Z0-9_]*)\s*=\s*([^=]*?)\s*(?=(?:[A-Z][A-Z0-9_]*\s*=)|$))");
  for (auto it = std::sregex_iterator(header.begin(), header.end(), kField);
       it != std::sregex_iterator(); ++it) {
    std::string value = (*it)[2].str();
    while (!value.empty() && (value.back() == ',' || std::isspace(static_cast<unsigned char>(value.back())))) {
      value.pop_back();
    }
    fields[(*it)[1].str()] = value;
  }
  auto header_int = [&](const char* key, std::optional<int> fallback) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      if (fallback) return *fallback;
      throw ParseError(std::string("malformed header: missing ") + key, 0);
    }
    try {
      std::size_t used = 0;
      const int v = std::stoi(it->second, &used);
      if (used != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw ParseError(std::string("malformed header: bad ") + key + " '" + it->second + "'", 0);
    }
  };
  const int norb = header_int("NORB", std::nullopt);
  const int nelec = header_int("NELEC", std::nullopt);
  const int ms2 = header_int("MS2", 0);
  FermionIntegrals fi;
  try {
    fi = FermionIntegrals(norb, nelec, ms2);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("malformed header: ") + e.what(), 0);
  }

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 5) throw ParseError("expected 'value i j k l'", lineno);
    const double v = parse_real(tok[0], lineno);
    int idx[4];
    for (int k = 0; k < 4; ++k) {
      idx[k] = parse_index(tok[static_cast<std::size_t>(k) + 1], lineno);
      if (idx[k] < 0 || idx[k] > norb) {
        throw ParseError("index " + std::to_string(idx[k]) + " out of range [0, " +
                             std::to_string(norb) + "]",
                         lineno);
      }
    }
    const auto [i, j, k, l] = idx;
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      fi.set_core_energy(v);
    } else if (i > 0 && j > 0 && k > 0 && l > 0) {
      fi.set_two_body(i - 1, j - 1, k - 1, l - 1, v);
    } else if (i > 0 && j > 0 && k == 0 && l == 0) {
      fi.set_one_body(i - 1, j - 1, v);
    } else if (i > 0 && j == 0 && k == 0 && l == 0) {
      continue;  // orbital energy
    } else {
      throw ParseError("unsupported index pattern", lineno);
    }
  }
  return fi;
}

FermionIntegrals read_fcidump(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path.string() + "'", 0);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_fcidump(ss.str());
}

// ---------------------------------------------------------------------------
// Jordan-Wigner

namespace {

using TermList = std::vector<PauliTerm>;

// a_j^dagger = Z_{<j} (X_j - iY_j)/2, a_j = Z_{<j} (X_j + iY_j)/2.
TermList ladder(int j, bool create) {
  const std::uint64_t below = (std::uint64_t{1} << j) - 1;
  const PauliString zs = PauliString::z_mask(below);
  const PauliString xj = PauliString::from_bits(zs.x_bits() | (std::uint64_t{1} << j), zs.z_bits());
  const PauliString yj = PauliString::from_bits(zs.x_bits() | (std::uint64_t{1} << j),
                                                zs.z_bits() | (std::uint64_t{1} << j));
  const cplx yc = create ? cplx{0.0, -0.5} : cplx{0.0, 0.5};
  return {{xj, 0.5}, {yj, yc}};
}

TermList product(const TermList& a, const TermList& b) {
  TermList out;
  out.reserve(a.size() * b.size());
  for (const auto& ta : a) {
    for (const auto& tb : b) {
      const PauliProduct p = multiply(ta.pauli, tb.pauli);
      out.push_back({p.product, p.phase() * ta.coeff * tb.coeff});
    }
  }
  return out;
}

}  // namespace

PauliSum jordan_wigner(const FermionIntegrals& fi) {
  const int norb = fi.norb();
  const int n = 2 * norb;
  std::vector<TermList> cre(static_cast<std::size_t>(n)), ann(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    cre[static_cast<std::size_t>(j)] = ladder(j, true);
    ann[static_cast<std::size_t>(j)] = ladder(j, false);
  }
  std::unordered_map<PauliString, cplx, PauliStringHash> acc;
  auto add = [&](const TermList& terms, double scale) {
    for (const auto& t : terms) acc[t.pauli] += scale * t.coeff;
  };
  acc[PauliString{}] += fi.core_energy();
  constexpr double kSkip = 1e-15;
  auto so = [](int p, int sigma) { return static_cast<std::size_t>(2 * p + sigma); };

  for (int p = 0; p < norb; ++p) {
    for (int q = 0; q < norb; ++q) {
      const double h = fi.one_body(p, q);
      if (std::abs(h) < kSkip) continue;
      for (int s = 0; s < 2; ++s) add(product(cre[so(p, s)], ann[so(q, s)]), h);
    }
  }
  // 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}
  for (int p = 0; p < norb; ++p) {
    for (int q = 0; q < norb; ++q) {
      for (int r = 0; r < norb; ++r) {
        for (int s = 0; s < norb; ++s) {
          const double g = fi.two_body(p, q, r, s);
          if (std::abs(g) < kSkip) continue;
          for (int sig = 0; sig < 2; ++sig) {
            for (int tau = 0; tau < 2; ++tau) {
              if (so(p, sig) == so(r, tau) || so(s, tau) == so(q, sig)) continue;
              const TermList left = product(cre[so(p, sig)], cre[so(r, tau)]);
              const TermList right = product(ann[so(s, tau)], ann[so(q, sig)]);
              add(product(left, right), 0.5 * g);
            }
          }
        }
      }
    }
  }
  std::vector<PauliTerm> terms;
  for (const auto& [pauli, c] : acc) {
    if (std::abs(c.imag()) > 1e-10) {
      throw std::logic_error("jordan_wigner: complex coefficient on " + pauli.to_string());
    }
    terms.push_back({pauli, c.real()});
  }
  return PauliSum(n, std::move(terms));
}

PauliSum number_operator(int n_spin_orbitals) {
  std::vector<PauliTerm> terms{{PauliString{}, 0.5 * n_spin_orbitals}};
  for (int j = 0; j < n_spin_orbitals; ++j) terms.push_back({PauliString::single(j, Axis::Z), -0.5});
  return PauliSum(n_spin_orbitals, std::move(terms));
}

// ---------------------------------------------------------------------------
// Determinants

namespace {

std::uint64_t parse_mask(const nlohmann::json& j) {
  if (j.is_number_unsigned() || j.is_number_integer()) return j.get<std::uint64_t>();
  const std::string s = j.get<std::string>();
  if (s.rfind("0b", 0) != 0 || s.size() == 2 || s.size() > 66) {
    throw std::invalid_argument("determinant mask must look like '0b0101'");
  }
  std::uint64_t m = 0;
  for (std::size_t i = 2; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("bad mask '" + s + "'");
    m = (m << 1) | static_cast<std::uint64_t>(s[i] - '0');
  }
  return m;
}

std::string mask_string(std::uint64_t m, int width) {
  std::string s = "0b";
  for (int q = std::max(width, 1) - 1; q >= 0; --q) s += ((m >> q) & 1U) ? '1' : '0';
  return s;
}

}  // namespace

DeterminantList determinants_from_json(const nlohmann::json& j) {
  DeterminantList dl;
  dl.norb = j.at("norb").get<int>();
  if (dl.norb <= 0 || dl.norb > kMaxPauliQubits / 2) throw std::invalid_argument("bad norb");
  for (const auto& d : j.at("dets")) {
    Determinant det{parse_mask(d.at("mask")), d.at("coeff").get<double>()};
    if (2 * dl.norb < 64 && (det.mask >> (2 * dl.norb)) != 0) {
      throw std::invalid_argument("determinant mask wider than 2*norb");
    }
    dl.dets.push_back(det);
  }
  return dl;
}

nlohmann::json to_json(const DeterminantList& dl) {
  nlohmann::json dets = nlohmann::json::array();
  for (const auto& d : dl.dets) dets.push_back({{"mask", mask_string(d.mask, 2 * dl.norb)}, {"coeff", d.coeff}});
  return {{"norb", dl.norb}, {"dets", std::move(dets)}};
}

Determinant hartree_fock_determinant(int norb, int nelec, int ms2) {
  const int n_alpha = (nelec + ms2) / 2, n_beta = (nelec - ms2) / 2;
  if (n_alpha < 0 || n_beta < 0 || n_alpha > norb || n_beta > norb || (nelec + ms2) % 2 != 0) {
    throw std::invalid_argument("hartree_fock_determinant: inconsistent electron counts");
  }
  Determinant d;
  for (int p = 0; p < n_alpha; ++p) d.mask |= std::uint64_t{1} << (2 * p);
  for (int p = 0; p < n_beta; ++p) d.mask |= std::uint64_t{1} << (2 * p + 1);
  return d;
}

StateVector ci_initial_state(std::span<const Determinant> dets, int n_qubits, double threshold) {
  StateVector s(n_qubits);
  auto amps = s.amplitudes();
  amps[0] = 0.0;
  int popcount = -1;
  double norm2 = 0.0;
  for (const auto& d : dets) {
    if (n_qubits < 64 && (d.mask >> n_qubits) != 0) {
      throw std::invalid_argument("determinant wider than the register");
    }
    const int pc = std::popcount(d.mask);
    if (popcount >= 0 && pc != popcount) {
      throw std::invalid_argument("determinants span several particle sectors");
    }
    popcount = pc;
    if (std::abs(d.coeff) <= threshold) continue;
    amps[d.mask] += d.coeff;
    norm2 += d.coeff * d.coeff;
  }
  if (!(norm2 > 0.0)) throw std::invalid_argument("no determinant survives the threshold");
  const double nrm = s.norm();
  for (auto& a : amps) a /= nrm;
  return s;
}

// ---------------------------------------------------------------------------
// Z2 tapering

namespace {

using Row = std::vector<std::uint8_t>;

// In-place reduced row echelon form over GF(2); returns pivot columns.
std::vector<std::size_t> rref(std::vector<Row>& m, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && !m[p][c]) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i != r && m[i][c]) {
        for (std::size_t k = 0; k < cols; ++k) m[i][k] ^= m[r][k];
      }
    }
    pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  return pivots;
}

std::vector<Row> kernel(std::vector<Row> m, std::size_t cols) {
  const auto pivots = rref(m, cols);
  std::vector<char> is_pivot(cols, 0);
  for (auto c : pivots) is_pivot[c] = 1;
  std::vector<Row> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Row v(cols, 0);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = m[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

// Column layout [x_0..x_{n-1} | z_0..z_{n-1}].
PauliString row_to_pauli(const Row& v, int n) {
  std::uint64_t x = 0, z = 0;
  for (int q = 0; q < n; ++q) {
    if (v[static_cast<std::size_t>(q)]) x |= std::uint64_t{1} << q;
    if (v[static_cast<std::size_t>(n + q)]) z |= std::uint64_t{1} << q;
  }
  return PauliString::from_bits(x, z);
}

Row pauli_to_row(const PauliString& p, int n) {
  Row v(static_cast<std::size_t>(2 * n), 0);
  for (int q = 0; q < n; ++q) {
    v[static_cast<std::size_t>(q)] = (p.x_bits() >> q) & 1U;
    v[static_cast<std::size_t>(n + q)] = (p.z_bits() >> q) & 1U;
  }
  return v;
}

PauliString product_of(const PauliString& a, const PauliString& b) {
  return PauliString::from_bits(a.x_bits() ^ b.x_bits(), a.z_bits() ^ b.z_bits());
}

// U A U with U = (sigma + tau)/sqrt(2), for a term A commuting with tau.
PauliTerm conjugate(const PauliTerm& t, const PauliString& sigma, const PauliString& tau) {
  if (commutes(t.pauli, sigma)) return t;
  const PauliProduct a = multiply(t.pauli, tau);
  const PauliProduct b = multiply(a.product, sigma);
  return {b.product, t.coeff * a.phase() * b.phase()};
}

}  // namespace

std::vector<PauliString> symmetry_generators(const PauliSum& h) {
  const int n = h.n_qubits();
  const auto cols = static_cast<std::size_t>(2 * n);
  // tau = (a|b) commutes with term (x|z) iff x.b + z.a = 0.
  std::vector<Row> m;
  for (const auto& t : h) {
    if (t.pauli.is_identity()) continue;
    Row r(cols, 0);
    for (int q = 0; q < n; ++q) {
      r[static_cast<std::size_t>(q)] = (t.pauli.z_bits() >> q) & 1U;
      r[static_cast<std::size_t>(n + q)] = (t.pauli.x_bits() >> q) & 1U;
    }
    m.push_back(std::move(r));
  }
  std::vector<PauliString> k;
  for (const auto& v : kernel(std::move(m), cols)) k.push_back(row_to_pauli(v, n));

  // Keep the part of the kernel that commutes with the whole kernel.
  std::vector<Row> omega;
  for (const auto& a : k) {
    Row r(k.size(), 0);
    for (std::size_t j = 0; j < k.size(); ++j) r[j] = commutes(a, k[j]) ? 0 : 1;
    omega.push_back(std::move(r));
  }
  std::vector<Row> center_rows;
  for (const auto& combo : kernel(std::move(omega), k.size())) {
    PauliString g;
    for (std::size_t j = 0; j < k.size(); ++j) {
      if (combo[j]) g = product_of(g, k[j]);
    }
    center_rows.push_back(pauli_to_row(g, n));
  }
  rref(center_rows, cols);
  std::vector<PauliString> out;
  for (const auto& r : center_rows) out.push_back(row_to_pauli(r, n));
  return out;
}

TaperingReport taper_z2(const PauliSum& h, const Determinant& reference, TaperMode mode) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("taper_z2: H not Hermitian");
  const int n = h.n_qubits();
  TaperingReport rep;
  rep.original_qubits = n;

  std::vector<PauliString> gens;
  if (mode == TaperMode::kFullKernel) {
    gens = symmetry_generators(h);
  } else {
    if (n % 2 != 0) throw std::invalid_argument("particle-spin tapering needs 2*norb qubits");
    std::uint64_t alpha = 0;
    for (int q = 0; q < n; q += 2) alpha |= std::uint64_t{1} << q;
    for (const auto& g : {PauliString::z_mask(alpha), PauliString::z_mask(alpha << 1)}) {
      for (const auto& t : h) {
        if (!commutes(g, t.pauli)) {
          throw std::invalid_argument("spin parity " + g.to_string() + " is not a symmetry of H");
        }
      }
      gens.push_back(g);
    }
  }

  // Pair generator i with a single-qubit Pauli σ_i on its own qubit such that
  // σ_i anticommutes with τ_j exactly when i = j, recombining generators as
  // needed. For an independent commuting set this greedy choice cannot stall.
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < gens.size(); ++i) {
    bool found = false;
    for (std::size_t r = i; r < gens.size() && !found; ++r) {
      for (int q = 0; q < n && !found; ++q) {
        if (used[static_cast<std::size_t>(q)]) continue;
        for (Axis axis : {Axis::X, Axis::Z}) {
          const PauliString sigma = PauliString::single(q, axis);
          if (commutes(sigma, gens[r])) continue;
          std::swap(gens[i], gens[r]);
          for (std::size_t j = 0; j < gens.size(); ++j) {
            if (j != i && !commutes(sigma, gens[j])) gens[j] = product_of(gens[j], gens[i]);
          }
          used[static_cast<std::size_t>(q)] = 1;
          rep.tapered_qubits.push_back(q);
          rep.pivot_axes.push_back(axis);
          found = true;
          break;
        }
      }
    }
    if (!found) throw std::logic_error("taper_z2: generators are not independent");
  }
  for (const auto& g : gens) {
    if (g.x_bits() != 0) {
      throw std::invalid_argument("taper_z2: reference determinant is not an eigenvector of " +
                                  g.to_string());
    }
    rep.generators.push_back(g);
    rep.signs.push_back((std::popcount(reference.mask & g.z_bits()) & 1) ? -1 : 1);
  }
  for (int q = 0; q < n; ++q) {
    if (!used[static_cast<std::size_t>(q)]) rep.kept_qubits.push_back(q);
  }

  std::vector<PauliTerm> reduced;
  for (auto t : h) {
    for (std::size_t i = 0; i < rep.generators.size(); ++i) {
      t = conjugate(t, PauliString::single(rep.tapered_qubits[i], rep.pivot_axes[i]),
                    rep.generators[i]);
    }
    for (std::size_t i = 0; i < rep.generators.size(); ++i) {
      const Axis a = t.pauli.axis(rep.tapered_qubits[i]);
      if (a == Axis::I) continue;
      if (a != rep.pivot_axes[i]) {
        throw std::logic_error("taper_z2: conjugated term " + t.pauli.to_string() +
                               " is not diagonal on a tapered qubit");
      }
      t.coeff *= rep.signs[i];
      t.pauli = t.pauli.with(rep.tapered_qubits[i], Axis::I);
    }
    PauliString relabeled;
    for (std::size_t k = 0; k < rep.kept_qubits.size(); ++k) {
      relabeled = relabeled.with(static_cast<int>(k), t.pauli.axis(rep.kept_qubits[k]));
    }
    reduced.push_back({relabeled, t.coeff.real()});
  }
  rep.reduced = PauliSum(static_cast<int>(rep.kept_qubits.size()), std::move(reduced));
  return rep;
}

StateVector taper_state(const TaperingReport& rep, const StateVector& state) {
  if (state.n_qubits() != rep.original_qubits) throw std::invalid_argument("taper_state: width mismatch");
  std::vector<cplx> amps(state.amplitudes().begin(), state.amplitudes().end());
  const double r2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < rep.generators.size(); ++i) {
    const auto a = apply_pauli(amps, PauliString::single(rep.tapered_qubits[i], rep.pivot_axes[i]));
    const auto b = apply_pauli(amps, rep.generators[i]);
    for (std::size_t k = 0; k < amps.size(); ++k) amps[k] = r2 * (a[k] + b[k]);
  }
  const std::size_t kept = rep.kept_qubits.size();
  const std::size_t ntap = rep.tapered_qubits.size();
  std::vector<cplx> out(std::size_t{1} << kept, cplx{0.0, 0.0});
  for (std::uint64_t r = 0; r < out.size(); ++r) {
    std::uint64_t base = 0;
    for (std::size_t k = 0; k < kept; ++k) {
      if ((r >> k) & 1U) base |= std::uint64_t{1} << rep.kept_qubits[k];
    }
    for (std::uint64_t combo = 0; combo < (std::uint64_t{1} << ntap); ++combo) {
      std::uint64_t full = base;
      double w = 1.0;
      for (std::size_t i = 0; i < ntap; ++i) {
        const bool bit = (combo >> i) & 1U;
        if (bit) full |= std::uint64_t{1} << rep.tapered_qubits[i];
        if (rep.pivot_axes[i] == Axis::X) {
          w *= (bit && rep.signs[i] < 0) ? -r2 : r2;
        } else if (bit != (rep.signs[i] < 0)) {
          w = 0.0;
        }
      }
      if (w != 0.0) out[r] += w * amps[full];
    }
  }
  double n2 = 0.0;
  for (const auto& a : out) n2 += std::norm(a);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-8) {
    throw std::invalid_argument("taper_state: state has weight outside the tapered sector");
  }
  return StateVector::from_amplitudes(std::move(out), true);
}

QubitProjection project_qubits(const PauliSum& h, std::span<const std::pair<int, int>> pinned) {
  std::uint64_t pinned_mask = 0, ones = 0;
  for (const auto& [q, b] : pinned) {
    if (q < 0 || q >= h.n_qubits()) throw std::out_of_range("project_qubits: qubit out of range");
    pinned_mask |= std::uint64_t{1} << q;
    if (b) ones |= std::uint64_t{1} << q;
  }
  QubitProjection out;
  for (int q = 0; q < h.n_qubits(); ++q) {
    if (!((pinned_mask >> q) & 1U)) out.kept_qubits.push_back(q);
  }
  std::vector<PauliTerm> terms;
  for (const auto& t : h) {
    if (t.pauli.x_bits() & pinned_mask) continue;
    cplx c = t.coeff;
    if (std::popcount(t.pauli.z_bits() & ones) & 1) c = -c;
    PauliString p;
    for (std::size_t k = 0; k < out.kept_qubits.size(); ++k) {
      p = p.with(static_cast<int>(k), t.pauli.axis(out.kept_qubits[k]));
    }
    terms.push_back({p, c});
  }
  out.reduced = PauliSum(static_cast<int>(out.kept_qubits.size()), std::move(terms));
  return out;
}

std::uint64_t compress_mask(std::uint64_t mask, std::span<const int> kept_qubits) {
  std::uint64_t r = 0;
  for (std::size_t k = 0; k < kept_qubits.size(); ++k) {
    if ((mask >> kept_qubits[k]) & 1U) r |= std::uint64_t{1} << k;
  }
  return r;
}

}  // namespace qgse
