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

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>

#include "qgse/chem.hpp"
#include "test_support.hpp"

namespace qgse {
namespace {

using testing::Mat;
using testing::oracle_matrix;

PauliString P(const char* s) { return PauliString::parse(s); }

double reference_fci(const char* key) {
  return testing::read_json(testing::fixture("reference.json")).at(key).at("e_fci").get<double>();
}

PauliSum h2(const char* file = "h2_eq.fcidump") { return jordan_wigner(read_fcidump(testing::fixture(file))); }

TEST(Fcidump, HeaderFields) {
  const auto fi = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n");
  EXPECT_EQ(fi.norb(), 2);
  EXPECT_EQ(fi.nelec(), 2);
  EXPECT_EQ(fi.ms2(), 0);
}

TEST(Fcidump, SlashTerminatorAndFortranExponent) {
  const auto fi = parse_fcidump(" &FCI NORB=2,\n NELEC=2, MS2=0\n /\n 0.5D+00 1 2 0 0\n 2.5d-1 0 0 0 0\n 9.0 1 0 0 0\n");
  EXPECT_DOUBLE_EQ(fi.one_body(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(fi.one_body(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(fi.core_energy(), 0.25);
  EXPECT_DOUBLE_EQ(fi.one_body(0, 0), 0.0);
}

TEST(Fcidump, TwoBodyEightFoldImages) {
  const auto fi = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.75 1 1 1 1\n0.125 1 2 1 1\n");
  EXPECT_DOUBLE_EQ(fi.two_body(0, 0, 0, 0), 0.75);
  for (auto [p, q, r, s] : {std::array{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}) {
    EXPECT_DOUBLE_EQ(fi.two_body(p, q, r, s), 0.125);
  }
}

TEST(Fcidump, ErrorsCarryLineNumbers) {
  try {
    parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.1 1 1 1 1\n0.2 3 1 1 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_NE(std::string(e.what()).find("out of range"), std::string::npos);
  }
  try {
    parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\nabc 1 1 1 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_fcidump("NORB=2\n"), ParseError);
  EXPECT_THROW(parse_fcidump("&FCI NELEC=2 &END\n"), ParseError);
  EXPECT_THROW(parse_fcidump("&FCI NORB=2,NELEC=2\n0.1 1 1 1 1\n"), ParseError);
  EXPECT_THROW(read_fcidump("/nonexistent/file.fcidump"), ParseError);
}

TEST(JordanWigner, NumberOperatorOfOneOrbital) {
  FermionIntegrals fi(1, 1, 1);
  fi.set_one_body(0, 0, 1.0);
  // a+_{0a} a_{0a} + a+_{0b} a_{0b} = (I - Z0)/2 + (I - Z1)/2.
  const PauliSum h = jordan_wigner(fi);
  EXPECT_DOUBLE_EQ(h.identity_coefficient().real(), 1.0);
  EXPECT_DOUBLE_EQ(h.coefficient(P("Z0")).real(), -0.5);
  EXPECT_DOUBLE_EQ(h.coefficient(P("Z1")).real(), -0.5);
  EXPECT_EQ(h.size(), 3U);
}

TEST(JordanWigner, HoppingCarriesTheParityString) {
  FermionIntegrals fi(2, 1, 1);
  fi.set_one_body(0, 1, 1.0);
  // Alpha spin-orbitals 0 and 2 sit around beta orbital 1.
  const PauliSum h = jordan_wigner(fi);
  EXPECT_DOUBLE_EQ(h.coefficient(P("X0 Z1 X2")).real(), 0.5);
  EXPECT_DOUBLE_EQ(h.coefficient(P("Y0 Z1 Y2")).real(), 0.5);
  EXPECT_DOUBLE_EQ(h.coefficient(P("X1 Z2 X3")).real(), 0.5);
  EXPECT_DOUBLE_EQ(h.coefficient(P("Y1 Z2 Y3")).real(), 0.5);
  EXPECT_EQ(h.size(), 4U);
}

TEST(JordanWigner, H2MatchesReferenceFci) {
  for (const auto& [file, key] : {std::pair{"h2_eq.fcidump", "h2_eq"}, std::pair{"h2_stretched.fcidump", "h2_stretched"}}) {
    const PauliSum h = h2(file);
    EXPECT_EQ(h.n_qubits(), 4);
    EXPECT_TRUE(h.is_hermitian(1e-12));
    for (const auto& t : h) EXPECT_LT(std::abs(t.coeff.imag()), 1e-12);
    EXPECT_NEAR(testing::sector_ground(oracle_matrix(h), 2), reference_fci(key), 1e-8) << file;
  }
}

TEST(JordanWigner, HartreeFockEnergyMatchesReference) {
  const PauliSum h = h2();
  const auto hf = hartree_fock_determinant(2, 2, 0);
  EXPECT_EQ(hf.mask, 0b0011U);
  const double e = expectation(StateVector::basis(4, hf.mask), h).real();
  EXPECT_NEAR(e, testing::read_json(testing::fixture("reference.json")).at("h2_eq").at("e_hf").get<double>(), 1e-8);
}

TEST(JordanWigner, NumberOperatorCommutesWithHamiltonian) {
  for (const char* file : {"h2_eq.fcidump", "spinpol4.fcidump"}) {
    const PauliSum h = h2(file);
    const PauliSum n = number_operator(h.n_qubits());
    for (const auto& t : n) {
      if (!t.pauli.is_identity()) {
        EXPECT_DOUBLE_EQ(t.coeff.real(), -0.5);
      }
    }
    const Mat mh = oracle_matrix(h), mn = oracle_matrix(n);
    EXPECT_LT((mh * mn - mn * mh).norm(), 1e-10) << file;
  }
}

TEST(Determinants, JsonRoundTrip) {
  const auto dl = determinants_from_json(testing::read_json(testing::fixture("h2_eq_ci.json")));
  ASSERT_EQ(dl.dets.size(), 2U);
  EXPECT_EQ(dl.dets[0].mask, 0b0011U);
  EXPECT_EQ(dl.dets[1].mask, 0b1100U);
  const auto back = determinants_from_json(to_json(dl));
  EXPECT_EQ(back.dets[1].coeff, dl.dets[1].coeff);
  EXPECT_EQ(to_json(dl).at("dets")[0].at("mask"), "0b0011");
  EXPECT_THROW(determinants_from_json(nlohmann::json::parse(R"({"norb":1,"dets":[{"mask":"0b111","coeff":1}]})")),
               std::invalid_argument);
}

TEST(CiInitialState, Examples) {
  const std::vector<Determinant> one{{0b0101, 0.4}};
  const auto s1 = ci_initial_state(one, 4, 0.03);
  EXPECT_NEAR(std::abs(s1[0b0101]), 1.0, 1e-15);

  const std::vector<Determinant> two{{0b0011, 0.9995}, {0b1100, 0.01}};
  const auto s2 = ci_initial_state(two, 4, 0.03);
  EXPECT_NEAR(s2[0b0011].real(), 1.0, 1e-15);
  EXPECT_EQ(s2[0b1100], cplx(0.0, 0.0));
  EXPECT_NEAR(s2.norm(), 1.0, 1e-12);

  EXPECT_THROW(ci_initial_state(two, 4, 0.9999), std::invalid_argument);
  const std::vector<Determinant> mixed{{0b0011, 0.7}, {0b0111, 0.7}};
  EXPECT_THROW(ci_initial_state(mixed, 4, 0.03), std::invalid_argument);
}

TEST(CiInitialState, H2FixtureFidelityWithGroundState) {
  const PauliSum h = h2();
  const auto dl = determinants_from_json(testing::read_json(testing::fixture("h2_eq_ci.json")));
  const auto psi = ci_initial_state(dl.dets, 4, 0.03);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);
  const double e = expectation(psi, h).real();
  EXPECT_NEAR(e, reference_fci("h2_eq"), 1e-8);  // both determinants survive: exact ground state
}

TEST(Tapering, ThreeTermDiagonalExample) {
  const PauliSum h(2, {{P("Z0"), 1.0}, {P("Z1"), 1.0}, {P("Z0 Z1"), 1.0}});
  const auto rep = taper_z2(h, Determinant{0b00, 1.0});
  EXPECT_EQ(rep.generators.size(), 2U);
  EXPECT_EQ(rep.reduced.n_qubits(), 0);
  ASSERT_EQ(rep.reduced.size(), 1U);
  EXPECT_DOUBLE_EQ(rep.reduced.identity_coefficient().real(), 3.0);  // <00|H|00>
}

TEST(Tapering, GeneratorsCommuteWithEveryTerm) {
  for (const char* file : {"h2_eq.fcidump", "h2_stretched.fcidump", "spinpol4.fcidump"}) {
    const PauliSum h = h2(file);
    for (const auto& g : symmetry_generators(h)) {
      for (const auto& t : h) EXPECT_TRUE(commutes(g, t.pauli)) << g.to_string() << " vs " << t.pauli.to_string();
    }
  }
}

// Eigenvalues of h on the basis states whose Z-generator parities match the signs.
std::vector<double> sector_spectrum(const PauliSum& h, const TaperingReport& rep) {
  const Mat m = oracle_matrix(h);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index b = 0; b < m.rows(); ++b) {
    bool in = true;
    for (std::size_t i = 0; i < rep.generators.size(); ++i) {
      const int s = (std::popcount(static_cast<std::uint64_t>(b) & rep.generators[i].z_bits()) & 1) ? -1 : 1;
      in = in && s == rep.signs[i];
    }
    if (in) idx.push_back(b);
  }
  Mat sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(idx[a], idx[b]);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(sub);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

std::vector<double> spectrum(const PauliSum& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(oracle_matrix(h));
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

TEST(Tapering, H2ParticleSpinReducesFourToTwo) {
  const PauliSum h = h2();
  const auto rep = taper_z2(h, hartree_fock_determinant(2, 2, 0), TaperMode::kParticleSpin);
  EXPECT_EQ(rep.reduced.n_qubits(), 2);
  EXPECT_EQ(rep.signs, (std::vector<int>{-1, -1}));
  EXPECT_NEAR(testing::ground_energy(oracle_matrix(rep.reduced)), reference_fci("h2_eq"), 1e-10);
  const auto want = sector_spectrum(h, rep), got = spectrum(rep.reduced);
  ASSERT_EQ(want.size(), got.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10);
}

TEST(Tapering, FullKernelPreservesSectorSpectrum) {
  for (const char* file : {"h2_eq.fcidump", "h2_stretched.fcidump"}) {
    const PauliSum h = h2(file);
    const auto rep = taper_z2(h, hartree_fock_determinant(2, 2, 0), TaperMode::kFullKernel);
    // H2 in a minimal basis has three independent Z2 symmetries.
    EXPECT_EQ(rep.generators.size(), 3U);
    EXPECT_EQ(rep.reduced.n_qubits(), 1);
    const auto want = sector_spectrum(h, rep), got = spectrum(rep.reduced);
    ASSERT_EQ(want.size(), got.size());
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-10) << file;
  }
}

TEST(Tapering, ReferenceMustBeAnEigenvector) {
  // X0 X1 is the only symmetry; no computational basis state is its eigenvector.
  const PauliSum h(2, {{P("X0 X1"), 1.0}, {P("Y0 Y1"), 0.5}});
  EXPECT_THROW(taper_z2(h, Determinant{0b01, 1.0}), std::invalid_argument);
}

TEST(Tapering, StateMapsIntoReducedRegister) {
  const PauliSum h = h2();
  const auto dl = determinants_from_json(testing::read_json(testing::fixture("h2_eq_ci.json")));
  const auto psi = ci_initial_state(dl.dets, 4, 0.0);
  for (TaperMode mode : {TaperMode::kParticleSpin, TaperMode::kFullKernel}) {
    const auto rep = taper_z2(h, hartree_fock_determinant(2, 2, 0), mode);
    const auto reduced = taper_state(rep, psi);
    EXPECT_NEAR(expectation(reduced, rep.reduced).real(), expectation(psi, h).real(), 1e-10);
    // A basis state in another electron sector is rejected.
    EXPECT_THROW(taper_state(rep, StateVector::basis(4, 0b0001)), std::invalid_argument);
  }
}

TEST(ProjectQubits, SpinPolarizedSectorRemoval) {
  const auto fi = read_fcidump(testing::fixture("spinpol4.fcidump"));
  ASSERT_EQ(fi.ms2(), 2);
  const PauliSum h = jordan_wigner(fi);
  std::vector<std::pair<int, int>> pinned;
  for (int p = 0; p < fi.norb(); ++p) pinned.emplace_back(2 * p + 1, 0);
  const auto proj = project_qubits(h, pinned);
  EXPECT_EQ(proj.reduced.n_qubits(), 4);
  EXPECT_EQ(proj.kept_qubits, (std::vector<int>{0, 2, 4, 6}));

  // Oracle: full-register matrix restricted to empty beta qubits, two alpha electrons.
  const Mat m = oracle_matrix(h);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index b = 0; b < m.rows(); ++b) {
    if ((b & 0b10101010) == 0 && std::popcount(static_cast<std::uint64_t>(b)) == 2) idx.push_back(b);
  }
  Mat sub(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = 0; b < idx.size(); ++b) sub(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(idx[a], idx[b]);
  }
  EXPECT_NEAR(testing::sector_ground(oracle_matrix(proj.reduced), 2), testing::ground_energy(sub), 1e-10);

  const auto hf = hartree_fock_determinant(4, 2, 2);
  EXPECT_EQ(hf.mask, 0b0101U);
  EXPECT_EQ(compress_mask(hf.mask, proj.kept_qubits), 0b0011U);
}

}  // namespace
}  // namespace qgse
