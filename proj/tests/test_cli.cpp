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

#include <cmath>
#include <sstream>

#include "qgse/chem.hpp"
#include "qgse/cli.hpp"
#include "test_support.hpp"

namespace qgse::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::fixture;
using testing::read_json;
using testing::slurp;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("qgse_cli_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "qgse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

json h2_tapered_ci() {
  return {{"hamiltonian", fixture("h2_eq.fcidump").string()},
          {"reduction", "taper_particle_spin"},
          {"initial_state", {{"kind", "ci"}, {"path", fixture("h2_eq_ci.json").string()}}}};
}

double h2_dense_ground() {
  const PauliSum h = jordan_wigner(read_fcidump(fixture("h2_eq.fcidump")));
  return testing::sector_ground(testing::oracle_matrix(h), 2);
}

TEST(Config, DefaultsAndOverrides) {
  Overrides ov;
  ov.seed = 11;
  ov.mode = "shots";
  const json cfg = resolve_config({{"hamiltonian", "op.json"}, {"spc", 7}}, ov, "/base");
  EXPECT_EQ(cfg.at("seed"), 11);
  EXPECT_EQ(cfg.at("mode"), "shots");
  EXPECT_EQ(cfg.at("spc"), 7);
  EXPECT_EQ(cfg.at("hamiltonian"), "/base/op.json");
  EXPECT_EQ(cfg.at("initial_state").at("kind"), "basis");
  EXPECT_EQ(cfg.at("qcm4").at("resamples"), 500);
  EXPECT_EQ(cfg.at("qcels").at("n_steps"), 33);
  EXPECT_EQ(resolve_config({{"hamiltonian", "x.fcidump"}}, {}, "/b").at("initial_state").at("kind"), "hf");
}

TEST(Config, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_THROW(resolve_config({{"hamiltonian", "a"}, {"sedd", 1}}, {}, "/"), InputError);
  EXPECT_THROW(resolve_config({{"hamiltonian", "a"}, {"qcels", {{"nsteps", 3}}}}, {}, "/"), InputError);
  EXPECT_THROW(resolve_config({{"hamiltonian", "a"}, {"spc", "many"}}, {}, "/"), InputError);
  EXPECT_THROW(resolve_config({{"hamiltonian", "a"}, {"spc", -3}}, {}, "/"), InputError);
  EXPECT_THROW(resolve_config({{"hamiltonian", "a"}, {"schema_version", 2}}, {}, "/"), InputError);
  EXPECT_THROW(resolve_config(json::object(), {}, "/"), InputError);
  EXPECT_NO_THROW(resolve_config({{"hamiltonian", "a"}, {"qcm4", {{"threshold", 0}}}}, {}, "/"));
}

TEST(Config, RequireFinite) {
  json j = {{"a", {1.0, 2.0}}, {"b", {{"c", 3.0}}}};
  EXPECT_NO_THROW(require_finite(j));
  j["b"]["c"] = std::nan("");
  try {
    require_finite(j);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("results.b.c"), std::string::npos);
  }
  j["b"]["c"] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(require_finite(j), std::runtime_error);
}

TEST(ExitCodes, InputAndUsageErrors) {
  TempDir tmp;
  EXPECT_EQ(invoke({}).code, kExitInput);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(invoke({"qcels", "--config", (tmp / "absent.json").string()}).code, kExitInput);
  const auto bad = write_config(tmp.path(), "bad.json", {{"hamiltonian", "x.json"}, {"nope", 1}});
  const Outcome o = invoke({"qcels", "--config", bad.string(), "--out", (tmp / "o").string()});
  EXPECT_EQ(o.code, kExitInput);
  EXPECT_NE(o.err.find("nope"), std::string::npos);
  EXPECT_EQ(invoke({"qcels", "--config", bad.string(), "--mode", "psychic"}).code, kExitInput);
}

TEST(ExitCodes, TermCapIsARuntimeFailure) {
  TempDir tmp;
  json c = h2_tapered_ci();
  c["reduction"] = "none";
  c["initial_state"] = {{"kind", "hf"}};
  c["qcm4"] = {{"term_cap", 20}, {"threshold", 0.0}};
  const auto p = write_config(tmp.path(), "c.json", c);
  const Outcome o = invoke({"qcm4", "--config", p.string(), "--out", (tmp / "o").string()});
  EXPECT_EQ(o.code, kExitRuntime);
  EXPECT_NE(o.err.find("H^"), std::string::npos);
}

TEST(Ingest, TaperedGroundMatchesAndOutputIsIdempotent) {
  TempDir tmp;
  const Outcome a = invoke({"ingest", fixture("h2_eq.fcidump").string(), "--reduction", "taper_full", "--out",
                            (tmp / "a").string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_NE(a.out.find("qubits: 4 -> 1"), std::string::npos);
  const json rep = read_json(tmp / "a" / "ingest.json");
  EXPECT_TRUE(rep.at("ground_energy_match").get<bool>());
  EXPECT_NEAR(rep.at("ground_energy_reduced").get<double>(), h2_dense_ground(), 1e-10);
  ASSERT_EQ(invoke({"ingest", fixture("h2_eq.fcidump").string(), "--reduction", "taper_full", "--out",
                    (tmp / "b").string()})
                .code,
            kExitOk);
  EXPECT_EQ(slurp(tmp / "a" / "operator.json"), slurp(tmp / "b" / "operator.json"));

  ASSERT_EQ(invoke({"ingest", fixture("h2_eq.fcidump").string(), "--out", (tmp / "c").string()}).code, kExitOk);
  EXPECT_EQ(read_json(tmp / "c" / "operator.json").at("n_qubits"), 4);
}

TEST(Ingest, MissingAndMalformedFiles) {
  TempDir tmp;
  const Outcome missing = invoke({"ingest", (tmp / "nothing.fcidump").string(), "--out", tmp.path().string()});
  EXPECT_EQ(missing.code, kExitInput);
  EXPECT_FALSE(missing.err.empty());
  std::ofstream(tmp / "broken.fcidump") << "&FCI NORB=2,NELEC=2,MS2=0,\n&END\n 0.5 1 1 x 1\n";
  const Outcome broken = invoke({"ingest", (tmp / "broken.fcidump").string(), "--out", tmp.path().string()});
  EXPECT_EQ(broken.code, kExitInput);
  EXPECT_NE(broken.err.find("line 3"), std::string::npos) << broken.err;
}

TEST(Qcels, H2ExactWithinMicroHartreeOfDenseGround) {
  TempDir tmp;
  const auto p = write_config(tmp.path(), "c.json", h2_tapered_ci());
  const Outcome o = invoke({"qcels", "--config", p.string(), "--out", (tmp / "o").string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const json r = read_json(tmp / "o" / "results.json");
  EXPECT_EQ(r.at("n_qubits"), 2);
  EXPECT_EQ(r.at("original_qubits"), 4);
  EXPECT_EQ(r.at("spc"), 0);
  EXPECT_NEAR(r.at("energy").get<double>(), h2_dense_ground(), 1e-6);
  EXPECT_EQ(r.at("config").at("seed"), r.at("seed"));
  EXPECT_FALSE(r.at("config").contains("threads"));
  EXPECT_TRUE(fs::exists(tmp / "o" / "config.json"));
  EXPECT_TRUE(fs::exists(tmp / "o" / "objective.csv"));
}

TEST(Qcels, ShotRunsAreReproducibleAcrossThreadCounts) {
  TempDir tmp;
  json c = h2_tapered_ci();
  c["mode"] = "shots";
  c["spc"] = 100;
  c["seed"] = 5;
  const auto p = write_config(tmp.path(), "c.json", c);
  ASSERT_EQ(invoke({"qcels", "--config", p.string(), "--out", (tmp / "a").string()}).code, kExitOk);
  ASSERT_EQ(invoke({"qcels", "--config", p.string(), "--threads", "4", "--out", (tmp / "b").string()}).code, kExitOk);
  EXPECT_EQ(slurp(tmp / "a" / "results.json"), slurp(tmp / "b" / "results.json"));
  EXPECT_EQ(slurp(tmp / "a" / "overlap.csv"), slurp(tmp / "b" / "overlap.csv"));
  ASSERT_EQ(invoke({"qcels", "--config", p.string(), "--seed", "6", "--out", (tmp / "c").string()}).code, kExitOk);
  EXPECT_NE(slurp(tmp / "a" / "overlap.csv"), slurp(tmp / "c" / "overlap.csv"));
}

TEST(Qcels, ShotStandardErrorsFollowTheBinomialFormula) {
  TempDir tmp;
  json c = h2_tapered_ci();
  c["mode"] = "shots";
  c["spc"] = 100;
  const auto p = write_config(tmp.path(), "c.json", c);
  ASSERT_EQ(invoke({"qcels", "--config", p.string(), "--out", tmp.path().string()}).code, kExitOk);
  std::istringstream csv(slurp(tmp / "overlap.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,t,re,im,stderr_re,stderr_im");
  int rows = 0;
  while (std::getline(csv, line)) {
    std::vector<double> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(std::stod(cell));
    ASSERT_EQ(v.size(), 6U);
    EXPECT_NEAR(v[4], std::sqrt((1.0 - v[2] * v[2]) / 100.0), 1e-12);
    EXPECT_NEAR(v[5], std::sqrt((1.0 - v[3] * v[3]) / 100.0), 1e-12);
    ++rows;
  }
  EXPECT_EQ(rows, 33);
  EXPECT_TRUE(read_json(tmp / "results.json").at("energy").is_number());
}

// Longhand fourth-order cumulant energy from dense moments.
double dense_qcm4(const testing::Mat& h, const testing::Vec& psi) {
  double m[5] = {1.0, 0, 0, 0, 0};
  testing::Vec v = psi;
  for (int k = 1; k <= 4; ++k) {
    v = h * v;
    m[k] = psi.dot(v).real();
  }
  const double c1 = m[1], c2 = m[2] - m[1] * m[1];
  const double c3 = m[3] - 3 * m[2] * m[1] + 2 * std::pow(m[1], 3);
  const double c4 = m[4] - 4 * m[3] * m[1] - 3 * m[2] * m[2] + 12 * m[2] * m[1] * m[1] - 6 * std::pow(m[1], 4);
  return c1 - c2 * c2 * c2 / (c2 * c2 * c2 - c2 * c4) * (std::sqrt(3 * c3 * c3 - 2 * c2 * c4) - c3);
}

TEST(Qcm4, H2ExactMatchesDenseOracle) {
  TempDir tmp;
  const PauliSum h = jordan_wigner(read_fcidump(fixture("h2_eq.fcidump")));
  const auto hf = hartree_fock_determinant(2, 2, 0);
  testing::Vec psi = testing::Vec::Zero(16);
  psi(static_cast<Eigen::Index>(hf.mask)) = 1.0;
  const double want = dense_qcm4(testing::oracle_matrix(h), psi);
  for (bool filter : {false, true}) {
    json c = {{"hamiltonian", fixture("h2_eq.fcidump").string()}, {"qcm4", {{"threshold", 0.0}, {"filter", filter}}}};
    const auto p = write_config(tmp.path(), "c.json", c);
    const fs::path out = tmp / (filter ? "f" : "u");
    ASSERT_EQ(invoke({"qcm4", "--config", p.string(), "--out", out.string()}).code, kExitOk);
    const json r = read_json(out / "results.json");
    EXPECT_NEAR(r.at("energy").get<double>(), want, 1e-10) << "filter=" << filter;
    EXPECT_EQ(r.at("qcm4").at("bootstrap").at("resamples"), 500);
    EXPECT_TRUE(fs::exists(out / "moment_report.json"));
  }
}

TEST(Qcm4, SpinPolarizedFilteredPlanHasOneCircuit) {
  TempDir tmp;
  const auto p = write_config(tmp.path(), "c.json",
                              {{"hamiltonian", fixture("spinpol4.fcidump").string()},
                               {"reduction", "alpha_only"},
                               {"mode", "shots"},
                               {"spc", 3},
                               {"qcm4", {{"resamples", 50}}}});
  ASSERT_EQ(invoke({"qcm4", "--config", p.string(), "--out", tmp.path().string()}).code, kExitOk);
  const json r = read_json(tmp / "results.json");
  EXPECT_EQ(r.at("qcm4").at("report").at("circuits"), 1);
  EXPECT_NEAR(r.at("energy").get<double>(), r.at("qcm4").at("exact_mode_energy").get<double>(), 1e-10);
  EXPECT_EQ(r.at("qcm4").at("bootstrap").at("resamples"), 50);
  EXPECT_TRUE(fs::exists(tmp / "bootstrap.csv"));
}

TEST(Qcm4, RecompiledModeIsRejected) {
  TempDir tmp;
  const auto p = write_config(tmp.path(), "c.json",
                              {{"hamiltonian", fixture("toy3.json").string()}, {"mode", "recompiled"}});
  EXPECT_EQ(invoke({"qcm4", "--config", p.string(), "--out", tmp.path().string()}).code, kExitInput);
}

TEST(Qcm4, ConnectedMomentsFormulaReachesTheSectorGround) {
  TempDir tmp;
  json c = {{"hamiltonian", fixture("h2_eq.fcidump").string()},
            {"qcm4", {{"threshold", 0.0}, {"formula", "connected_moments"}}}};
  const auto p = write_config(tmp.path(), "c.json", c);
  ASSERT_EQ(invoke({"qcm4", "--config", p.string(), "--out", (tmp / "cm").string()}).code, kExitOk);
  EXPECT_NEAR(read_json(tmp / "cm" / "results.json").at("energy").get<double>(), h2_dense_ground(), 1e-9);

  c["qcm4"]["formula"] = "quadratic";
  const auto bad = write_config(tmp.path(), "bad.json", c);
  EXPECT_EQ(invoke({"qcm4", "--config", bad.string(), "--out", (tmp / "bad").string()}).code, kExitInput);
}

TEST(Recompile, CompilationFileFeedsRecompiledQcels) {
  TempDir tmp;
  json c = {{"hamiltonian", fixture("toy3.json").string()},
            {"qcels", {{"n_steps", 4}}},
            {"recompile", {{"layers", 2}, {"max_iterations", 30}, {"restarts", 1}}}};
  const auto p = write_config(tmp.path(), "c.json", c);
  ASSERT_EQ(invoke({"recompile", "--config", p.string(), "--out", (tmp / "rc").string()}).code, kExitOk);
  const json rc = read_json(tmp / "rc" / "results.json");
  EXPECT_EQ(rc.at("recompile").at("fidelities").size(), 4U);
  EXPECT_EQ(rc.at("two_qubit_depth"), 2 * (4 - 1));  // L (n - 1) on toy3 plus the ancilla
  EXPECT_TRUE(fs::exists(tmp / "rc" / "fidelity.csv"));

  c["mode"] = "recompiled";
  c["spc"] = 0;
  const auto inline_cfg = write_config(tmp.path(), "inline.json", c);
  c["recompile"]["compilation"] = (tmp / "rc" / "compilation.json").string();
  const auto loaded_cfg = write_config(tmp.path(), "loaded.json", c);
  ASSERT_EQ(invoke({"qcels", "--config", inline_cfg.string(), "--out", (tmp / "a").string()}).code, kExitOk);
  ASSERT_EQ(invoke({"qcels", "--config", loaded_cfg.string(), "--out", (tmp / "b").string()}).code, kExitOk);
  EXPECT_EQ(read_json(tmp / "a" / "results.json").at("energy"), read_json(tmp / "b" / "results.json").at("energy"));

  c["qcels"]["n_steps"] = 5;
  const auto mismatch = write_config(tmp.path(), "mismatch.json", c);
  EXPECT_EQ(invoke({"qcels", "--config", mismatch.string(), "--out", (tmp / "m").string()}).code, kExitInput);
}

TEST(Report, EmptyInputGivesHeaderOnly) {
  const std::string md = run_report({}, std::nullopt);
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 2);
  EXPECT_NE(md.find("| run |"), std::string::npos);
}

TEST(Report, DeltaAgainstExactRunAndCsvTwin) {
  TempDir tmp;
  json c = h2_tapered_ci();
  const auto exact = write_config(tmp.path(), "e.json", c);
  c["mode"] = "shots";
  const auto shots = write_config(tmp.path(), "s.json", c);
  ASSERT_EQ(invoke({"qcels", "--config", exact.string(), "--out", (tmp / "exact").string()}).code, kExitOk);
  ASSERT_EQ(invoke({"qcels", "--config", shots.string(), "--out", (tmp / "shots").string()}).code, kExitOk);
  const std::vector<fs::path> runs{tmp / "exact", tmp / "shots"};
  const std::string md = run_report(runs, tmp / "rep");
  EXPECT_EQ(md, run_report(runs, std::nullopt));
  EXPECT_EQ(md, slurp(tmp / "rep" / "report.md"));

  const double e0 = read_json(tmp / "exact" / "results.json").at("energy").get<double>();
  const double e1 = read_json(tmp / "shots" / "results.json").at("energy").get<double>();
  std::istringstream csv(slurp(tmp / "rep" / "report.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "run,command,mode,qubits,two_qubit_depth,spc,energy,delta_e");
  std::vector<double> delta;
  while (std::getline(csv, line)) delta.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  ASSERT_EQ(delta.size(), 2U);
  EXPECT_EQ(delta[0], 0.0);
  EXPECT_EQ(delta[1], e1 - e0);
}

TEST(Report, SchemaMismatchIsAnInputError) {
  TempDir tmp;
  fs::create_directories(tmp / "old");
  std::ofstream(tmp / "old" / "results.json") << R"({"schema_version": 0})";
  const Outcome o = invoke({"report", (tmp / "old").string()});
  EXPECT_EQ(o.code, kExitInput);
  EXPECT_NE(o.err.find("schema"), std::string::npos);
}

}  // namespace
}  // namespace qgse::cli
