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

// Run configuration, problem assembly and the subcommands of the qgse tool.
// Every run writes config.json (the resolved configuration) and
// results.json into its output directory, plus CSV series.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qgse/pauli.hpp"
#include "qgse/state.hpp"

namespace qgse::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kExitOk = 0, kExitRuntime = 1, kExitInput = 2 };

/// Bad configuration or input files. Maps to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> spc;
  std::optional<std::string> mode;
  std::optional<int> threads;
};

/// Every accepted key with its default; null marks an optional value.
const nlohmann::json& config_defaults();

/// Merges `user` over the defaults, rejecting unknown keys and mistyped
/// values, applies overrides and makes file paths absolute against
/// `base_dir`.
nlohmann::json resolve_config(const nlohmann::json& user, const Overrides& overrides,
                              const std::filesystem::path& base_dir);

nlohmann::json load_config(const std::filesystem::path& path, const Overrides& overrides);

/// Hamiltonian and input state after the configured qubit reduction.
struct Problem {
  PauliSum h;
  StateVector psi;
  int original_qubits = 0;
  nlohmann::json info;  // reduction, initial state and dense references
};

Problem build_problem(const nlohmann::json& config);

/// Throws std::runtime_error naming the first NaN or infinity.
void require_finite(const nlohmann::json& j, const std::string& where = "results");

nlohmann::json run_qcels(const nlohmann::json& config, const std::filesystem::path& out);
nlohmann::json run_qcm4(const nlohmann::json& config, const std::filesystem::path& out);
nlohmann::json run_recompile(const nlohmann::json& config, const std::filesystem::path& out);
nlohmann::json run_ingest(const std::filesystem::path& fcidump, const std::string& reduction,
                          const std::filesystem::path& out, std::ostream& log);

/// Markdown table over run directories; writes report.md and report.csv
/// when `out` is set.
std::string run_report(std::span<const std::filesystem::path> runs,
                       const std::optional<std::filesystem::path>& out);

/// Full command line, returning the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qgse::cli
