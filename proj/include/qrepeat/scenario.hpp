// Copyright 2026 The qrepeat Authors
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


// Scenario runner behind the qrepeat CLI: JSON config in, report.json and
// CSV tables out. Each scenario is a list of named checks, each compared
// against an explicit threshold.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qrepeat/errors.hpp"
#include "qrepeat/hilbert.hpp"
#include "qrepeat/optimizer.hpp"
#include "qrepeat/rng.hpp"
#include "qrepeat/serialize.hpp"

namespace qrepeat {

// Bad config (schema, values) or unusable paths. Exit status 2.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Comparison { less, greater_equal, greater };
const char* comparison_symbol(Comparison c);

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Comparison comparison = Comparison::less;
  bool pass = false;

  static Verdict check(std::string name, double value, Comparison c, double threshold);
};

struct Artifact {
  std::string filename;  // relative to the scenario directory
  std::string contents;
};

struct RunReport {
  Json scenario;  // the config, with resolved name and seed
  std::vector<Verdict> verdicts;
  std::vector<Artifact> artifacts;
  Json details = Json::object();
  double wall_time = 0.0;

  std::string name() const;
  bool pass() const;  // all verdicts pass (vacuously true if none)
};

Json to_json(const Verdict& v);
Json to_json(const RunReport& r);

// Comma-separated, header row, 17 significant digits, locale independent.
std::string format_number(double x);
std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows);

// Ready-made composites for the actionability kind:
//   "cnot-records"  S (x) A after a cnot copy of |0>, |1>; k = 1
//   "identical"     the |0> composite twice
//   "mixed-ready"   S qubit copied into a dim-4 apparatus whose ready state is
//                   rank 2 (shift-by-2 coupling); with `environment`, A's
//                   parity is then copied into an environment qubit E.
struct ActionabilityCase {
  DensityOperator composite_u;
  DensityOperator composite_v;
  std::size_t k = 1;
  std::size_t test_dim = 2;
};

ActionabilityCase actionability_preset(const std::string& name, bool environment = false);

// Parses a scenario file; throws ConfigError naming the path on unreadable
// files or malformed JSON.
Json load_config(const std::filesystem::path& path);

// Validates and executes a parsed config. `default_name` is used when the
// config has no "name". No files are touched.
RunReport run_scenario(const Json& config, const std::string& default_name,
                       std::optional<Seed> seed_override = std::nullopt);

// Writes <outdir>/<name>/report.json plus artifacts.
std::filesystem::path write_report(const RunReport& report, const std::filesystem::path& outdir);

struct RunOptions {
  std::filesystem::path outdir = "out";
  std::optional<Seed> seed_override;
  bool quiet = false;
};

struct RunOutcome {
  std::filesystem::path config;
  std::string name;
  int status = 0;  // 0 pass, 1 verdict failure, 2 config/IO error
  std::string error;
  std::optional<RunReport> report;
  std::filesystem::path report_path;
};

RunOutcome run(const std::filesystem::path& config_path, const RunOptions& options);

struct SuiteOutcome {
  std::vector<RunOutcome> scenarios;
  int status = 0;
  double wall_time = 0.0;
  std::filesystem::path report_path;
};

// Every *.json in `dir` (non-recursive, sorted by filename). Writes
// <outdir>/suite_report.json. Status is the worst per-scenario status.
SuiteOutcome run_suite(const std::filesystem::path& dir, const RunOptions& options);

}  // namespace qrepeat
