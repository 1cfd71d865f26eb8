// SPDX-License-Identifier: Apache-2.0
//
// z3ro-toolkit: precoder synthesis and verification for arrays with nonlinear PAs
// Copyright (C) 2026 The z3ro-toolkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: one subcommand per experiment, each driven by a
// JSON config and writing a CSV.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "z3ro/errors.hpp"
#include "z3ro/experiment.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<unsigned> workers;
  std::string out;
  bool quick = false;
};

CLI::App* add_experiment(CLI::App& app, z3ro::ExperimentKind kind, const std::string& help,
                         CommonOptions& opts) {
  auto* sub = app.add_subcommand(std::string(z3ro::to_string(kind)), help);
  sub->add_option("--config", opts.config, "JSON experiment config")->required();
  sub->add_option("--seed", opts.seed, "override the RNG seed");
  sub->add_option("--samples", opts.samples, "override the Monte Carlo sample count");
  sub->add_option("--workers", opts.workers, "worker threads (0 = all cores)");
  sub->add_option("--out", opts.out, "output CSV path (default: config 'output' or stdout)");
  sub->add_flag("--quick", opts.quick, "reduced sample and start counts for smoke runs");
  return sub;
}

int run(z3ro::ExperimentKind kind, const CommonOptions& opts) {
  auto config = z3ro::load_experiment_config(opts.config, kind);
  z3ro::apply_overrides(config, {opts.seed, opts.samples, opts.workers, opts.quick});

  std::optional<std::filesystem::path> out;
  if (!opts.out.empty()) {
    out = opts.out;
  } else if (config.output) {
    out = *config.output;
  }

  z3ro::RunResult result;
  if (out && *out != "-") {
    z3ro::write_file_atomically(*out, [&](std::ostream& os) {
      result = z3ro::run_experiment(config, os);
    });
  } else {
    result = z3ro::run_experiment(config, std::cout);
  }
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  if (result.exit_code == 1) std::cerr << "error: oracle verification failed\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"z3ro_cli: precoder experiments for arrays with nonlinear amplifiers"};
  app.require_subcommand(1);
  CommonOptions opts;
  using z3ro::ExperimentKind;
  const std::pair<ExperimentKind, CLI::App*> subs[] = {
      {ExperimentKind::Pattern,
       add_experiment(app, ExperimentKind::Pattern, "radiation patterns and directivity", opts)},
      {ExperimentKind::ArrayGain,
       add_experiment(app, ExperimentKind::ArrayGain, "array gain versus antenna count", opts)},
      {ExperimentKind::BackoffSweep,
       add_experiment(app, ExperimentKind::BackoffSweep, "SNR/SDR/SNDR versus back-off", opts)},
      {ExperimentKind::OracleVerify,
       add_experiment(app, ExperimentKind::OracleVerify,
                      "numerical check of the closed-form optimum", opts)},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [kind, sub] : subs) {
      if (sub->parsed()) return run(kind, opts);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return z3ro::exit_code_for(e);
  }
  return 2;
}
