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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "z3ro/errors.hpp"
#include "z3ro/experiment.hpp"

using namespace z3ro;
namespace fs = std::filesystem;

namespace {

using Row = std::map<std::string, std::string>;

std::vector<Row> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    REQUIRE(cells.size() == header.size());
    Row row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double num(const Row& row, const std::string& key) { return std::stod(row.at(key)); }

std::string run_to_string(const ExperimentConfig& cfg, RunResult* result = nullptr) {
  std::ostringstream os;
  const auto r = run_experiment(cfg, os);
  if (result != nullptr) *result = r;
  return os.str();
}

std::string message_of(const std::string& json) {
  try {
    parse_experiment_config(json);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const fs::path kConfigs = fs::path(Z3RO_SOURCE_DIR) / "configs";

}  // namespace

TEST_SUITE("experiment") {
TEST_CASE("number formatting") {
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("PA descriptors") {
  CHECK(std::holds_alternative<IdealPa>(parse_pa_descriptor("ideal")));
  const auto p3 = parse_pa_descriptor("poly3:-0.1,0.02");
  CHECK(std::get<ThirdOrderPa>(p3).a3 == cdouble(-0.1, 0.02));
  const auto rapp = parse_pa_descriptor("rapp:10,2");
  CHECK(std::get<RappPa>(rapp).saturation_power == doctest::Approx(10.0));
  CHECK(std::get<RappPa>(rapp).smoothness == 2.0);
  CHECK_THROWS_AS(parse_pa_descriptor("poly3:1"), ConfigError);
  CHECK_THROWS_AS(parse_pa_descriptor("poly3:1,2x"), ConfigError);
  CHECK_THROWS_AS(parse_pa_descriptor("tanh:1,2"), ConfigError);
  CHECK_THROWS_AS(parse_pa_descriptor("ideal:1,2"), ConfigError);
  CHECK_THROWS_AS(parse_pa_descriptor("rapp:0,-1"), ConfigError);
}

TEST_CASE("config validation names the offending key") {
  CHECK(message_of(R"({"experiment":"array-gain","num_antennas":[4],"num_saturated":[1],"bogus":1})")
            .find("'bogus'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"array-gain","num_saturated":[1]})").find("'num_antennas'") !=
        std::string::npos);
  CHECK(message_of(R"({"experiment":"pattern","user_angle_deg":80,"runs":[{"num_antennas":8,"precoder":"z3ro","num_saturated":5}]})")
            .find("runs[0].num_saturated") != std::string::npos);
  CHECK(message_of(R"({"experiment":"pattern","user_angle_deg":80,"runs":[{"num_antennas":8,"precoder":"mrt","extra":1}]})")
            .find("'extra'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"pattern","user_angle_deg":190,"runs":[{"num_antennas":8,"precoder":"mrt"}]})")
            .find("user_angle_deg") != std::string::npos);
  CHECK(message_of(R"({"experiment":"pattern","user_angle_deg":80,"runs":[]})").find("'runs'") !=
        std::string::npos);
  CHECK(message_of(R"({"experiment":"pattern","user_angle_deg":80,"pa":"rapp:0,2","runs":[{"num_antennas":8,"precoder":"mrt"}]})")
            .find("'pa'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"pattern","user_angle_deg":80,"grid_points":16,"runs":[{"num_antennas":8,"precoder":"mrt"}]})")
            .find("'grid_points'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"backoff-sweep","user_angle_deg":80,"backoff_db":[0],"samples":100})")
            .find("'samples'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"backoff-sweep","user_angle_deg":80,"backoff_db":[0],"seed":-3})")
            .find("'seed'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"oracle-verify","num_antennas":[13]})").find("'num_antennas'") !=
        std::string::npos);
  CHECK(message_of(R"({"experiment":"oracle-verify","num_antennas":[4],"starts":4})")
            .find("'starts'") != std::string::npos);
  CHECK(message_of(R"({"experiment":"nothing"})").find("nothing") != std::string::npos);
  CHECK(message_of("{not json").find("JSON") != std::string::npos);
  CHECK(message_of(R"({"num_antennas":[4]})").find("'experiment'") != std::string::npos);
  CHECK_THROWS_AS(parse_experiment_config(R"({"experiment":"array-gain","num_antennas":[4],"num_saturated":[1]})",
                                          ExperimentKind::Pattern),
                  ConfigError);
  CHECK_THROWS_AS(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("presets load") {
  const std::pair<const char*, ExperimentKind> presets[] = {
      {"fig1.json", ExperimentKind::Pattern},
      {"fig2.json", ExperimentKind::ArrayGain},
      {"fig3.json", ExperimentKind::Pattern},
      {"fig4.json", ExperimentKind::BackoffSweep},
      {"oracle.json", ExperimentKind::OracleVerify},
  };
  for (const auto& [file, kind] : presets) {
    const auto cfg = load_experiment_config(kConfigs / file, kind);
    CHECK(cfg.kind == kind);
    CHECK(cfg.output.has_value());
  }
  const auto fig4 = load_experiment_config(kConfigs / "fig4.json");
  const auto& body = std::get<BackoffSweepExperiment>(fig4.body);
  CHECK(body.backoffs_db.size() == 20);
  CHECK(body.sweep.num_antennas == 64);
  CHECK(body.sweep.z3ro.num_saturated == 4);
  CHECK(body.sweep.samples == 1'000'000);
}

TEST_CASE("overrides") {
  auto cfg = load_experiment_config(kConfigs / "fig4.json");
  apply_overrides(cfg, {std::uint64_t{9}, std::nullopt, 2u, true});
  const auto& sweep = std::get<BackoffSweepExperiment>(cfg.body).sweep;
  CHECK(sweep.samples == kMinMonteCarloSamples);
  CHECK(sweep.seed == 9);
  CHECK(sweep.workers == 2);
  CHECK_THROWS_AS(apply_overrides(cfg, {std::nullopt, std::size_t{10}, std::nullopt, false}),
                  ConfigError);
  auto oracle = load_experiment_config(kConfigs / "oracle.json");
  apply_overrides(oracle, {std::nullopt, std::nullopt, std::nullopt, true});
  CHECK(std::get<OracleVerifyConfig>(oracle.body).starts == kMinOracleStarts);
}

TEST_CASE("fig1 pattern: MRT linear and distortion directivity coincide") {
  const auto rows = parse_csv(run_to_string(load_experiment_config(kConfigs / "fig1.json")));
  std::size_t checked = 0;
  double peak_lin = 0.0, peak_dist = 0.0;
  for (const auto& r : rows) {
    if (r.at("run") != "mrt_M32") continue;
    peak_lin = std::max(peak_lin, num(r, "P_linear"));
    peak_dist = std::max(peak_dist, num(r, "P_dist3"));
  }
  for (const auto& r : rows) {
    if (r.at("run") != "mrt_M32") continue;
    CHECK(std::abs(num(r, "P_linear") / peak_lin - num(r, "P_dist3") / peak_dist) <= 1e-9);
    ++checked;
  }
  CHECK(checked == 4097);
  // Z3RO runs: exact null toward the user; M = 2 also has zero array gain.
  for (const auto& r : rows) {
    if (r.at("precoder") != "z3ro" || num(r, "angle_deg") != 80.0) continue;
    CHECK(r.at("P_dist3") == "0");
    CHECK(r.at("D_dist3_dB") == "-inf");
    if (r.at("num_antennas") == "2") CHECK(r.at("P_linear") == "0");
  }
}

TEST_CASE("fig3 pattern: every Z3RO run nulls distortion at the user") {
  RunResult result;
  const auto rows = parse_csv(run_to_string(load_experiment_config(kConfigs / "fig3.json"), &result));
  CHECK(result.exit_code == 0);
  std::size_t nulls = 0;
  for (const auto& r : rows) {
    if (r.at("precoder") == "z3ro" && num(r, "angle_deg") == 80.0) {
      CHECK(r.at("D_dist3_dB") == "-inf");
      ++nulls;
    }
  }
  CHECK(nulls == 4);
}

TEST_CASE("array gain table") {
  RunResult result;
  const auto rows = parse_csv(run_to_string(load_experiment_config(kConfigs / "fig2.json"), &result));
  CHECK_FALSE(result.warnings.empty());
  std::map<std::size_t, std::vector<double>> penalty;
  for (const auto& r : rows) {
    const auto M = std::stoul(r.at("M"));
    const auto Ms = std::stoul(r.at("M_s"));
    CHECK(2 * Ms <= M);
    if (M == 64 && Ms == 1) CHECK(num(r, "penalty_db") == doctest::Approx(1.61).epsilon(0.01));
    if (M == 2 && Ms == 1) CHECK(r.at("z3ro_gain_db") == "-inf");
    if (M >= 4 && 2 * Ms < M) penalty[Ms].push_back(num(r, "penalty_db"));
  }
  for (const auto& [ms, values] : penalty) {
    for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] < values[i - 1]);
  }
}

TEST_CASE("back-off sweep output") {
  const char* json = R"({"experiment":"backoff-sweep","user_angle_deg":80,"backoff_db":[-10,2],"samples":1000000})";
  auto full = parse_experiment_config(json);
  auto quick = full;
  apply_overrides(quick, {std::nullopt, std::nullopt, std::nullopt, true});
  const auto a = parse_csv(run_to_string(full));
  const auto b = parse_csv(run_to_string(quick));
  REQUIRE(a.size() == 4);
  REQUIRE(b.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(num(b[i], "stderr_db") >= num(a[i], "stderr_db"));
    CHECK(a[i].at("n") == "1000000");
    CHECK(b[i].at("n") == "10000");
  }
  CHECK(run_to_string(full) == run_to_string(full));
}

TEST_CASE("oracle verification") {
  RunResult result;
  const auto cfg = parse_experiment_config(
      R"({"experiment":"oracle-verify","num_antennas":[2,3,4,5,6,7,8]})");
  const auto rows = parse_csv(run_to_string(cfg, &result));
  CHECK(result.exit_code == 0);
  for (const auto& r : rows) {
    CHECK(r.at("pass") == "1");
    if (r.at("M_s") == "1") {
      CHECK(num(r, "gap") <= kOracleGapTolerance);
      CHECK(!r.at("realness_max_imag").empty());
    }
  }
  const auto bad = parse_experiment_config(
      R"({"experiment":"oracle-verify","num_antennas":[4],"probe_realness":false,"test_hooks":{"closed_form_scale":0.9}})");
  RunResult failing;
  const auto bad_rows = parse_csv(run_to_string(bad, &failing));
  CHECK(failing.exit_code != 0);
  CHECK(bad_rows.front().at("pass") == "0");
}

TEST_CASE("atomic writes leave nothing behind on failure") {
  const auto dir = fs::temp_directory_path() / "z3ro_atomic_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto target = dir / "out.csv";
  CHECK_THROWS_AS(write_file_atomically(target,
                                        [](std::ostream& os) {
                                          os << "partial";
                                          throw NumericError("boom");
                                        }),
                  NumericError);
  CHECK(fs::is_empty(dir));
  write_file_atomically(target, [](std::ostream& os) { os << "ok\n"; });
  std::ifstream in(target);
  std::string text;
  std::getline(in, text);
  CHECK(text == "ok");
  CHECK(std::distance(fs::directory_iterator(dir), fs::directory_iterator()) == 1);
  fs::remove_all(dir);
}

TEST_CASE("exit code classification") {
  CHECK(exit_code_for(ConfigError("x")) == 2);
  CHECK(exit_code_for(PrecisionError("x")) == 2);
  CHECK(exit_code_for(InfeasibleError("x")) == 3);
  CHECK(exit_code_for(NumericError("x")) == 4);
  CHECK(exit_code_for(DegenerateError("x")) == 4);
}
}
