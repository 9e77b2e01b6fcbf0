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


#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "qrepeat/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"qrepeat: run copy/record verification scenarios"};
  std::string config;
  std::string suite;
  std::string outdir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;

  auto* config_opt = app.add_option("--config", config, "scenario JSON file");
  auto* suite_opt = app.add_option("--suite", suite, "directory of scenario JSON files");
  config_opt->excludes(suite_opt);
  app.add_option("--outdir", outdir, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "override the seed of every scenario");
  app.add_flag("--quiet", quiet, "only print errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (config.empty() && suite.empty()) {
    std::cerr << "error: one of --config or --suite is required\n";
    return 2;
  }

  qrepeat::RunOptions options;
  options.outdir = outdir;
  options.seed_override = seed;
  options.quiet = quiet;
  if (!config.empty()) return qrepeat::run(config, options).status;
  return qrepeat::run_suite(suite, options).status;
}
