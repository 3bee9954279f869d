// Copyright 2026 The sgk Authors
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

// Batch runs: flat key = value configuration, the derive / solve / verify /
// certify pipelines and their JSON and CSV reports.

#ifndef SGK_REPORT_HPP
#define SGK_REPORT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgk/ribbon.hpp"

namespace sgk {

enum class RunMode { derive, solve, verify, certify };

struct RunConfig {
  RunMode mode = RunMode::verify;
  int order = 6;
  RibbonGrid grid;
  DurhamData durham;
  double gamma_arg_rad = 0.0;  // gamma = exp(i arg)
  std::string lambda_mode = "roots";  // "roots" (D-filtered roots of unity) or "random"
  int lambda_count = 8;
  std::string solver = "1d";  // "1d" or "2d"
  std::string oracle = "exact";  // "exact" or "fd"
  int fd_accuracy = 6;
  double tol_solve_1d = 1e-10;
  double tol_solve_2d = 1e-8;
  double tol_certify = 1e-6;
  double rank_threshold_rel = 1e-6;
  int newton_max_iterations = 50;
  std::string input_solution;  // verify / certify: solve first when empty
  std::string output_dir = ".";
  std::string report_format = "json";  // "json", "csv" or "both"
  std::string payload_format = "binary";  // "binary" or "csv"
  std::uint64_t seed = 0;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string to_string(RunMode m);
RunMode parse_mode(const std::string& s);

// Sets one key; throws ErrorCode::validation for unknown keys or bad values.
void set_config_value(RunConfig& c, const std::string& key, const std::string& value);
// Reads "key = value" lines ('#' starts a comment). Unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Flat text form accepted by parse_config.
std::string config_text(const RunConfig& c);
// Throws ErrorCode::validation listing every offending key.
void validate(const RunConfig& c);

struct ResidualRow {
  std::string table;
  int m = 0;
  int n = 0;
  int sample = -1;  // -1 when the row is not per lambda sample
  std::string side;  // "lower", "upper" or ""
  double value = 0.0;

  friend bool operator==(const ResidualRow&, const ResidualRow&) = default;
};

struct Report {
  int schema_version = 1;
  std::string tool_version;
  RunConfig config;
  int exit_code = 0;
  std::string status;  // "ok" or the failure message
  std::map<std::string, double> scalars;
  std::vector<ResidualRow> rows;
  std::vector<std::string> symbolic;  // derive: "u_1 = ..." lines
  std::vector<std::string> warnings;
  std::string solution_file;
  std::string certificate;  // certificate JSON text, certify mode
  std::map<std::string, double> timings_s;

  friend bool operator==(const Report&, const Report&) = default;
};

const char* tool_version();

// Runs the pipeline; failures are captured in the report (exit_code and
// status) rather than thrown. Written files go to config.output_dir.
Report run(const RunConfig& config);

// Writes report.json and/or report.csv into dir; returns the written paths.
std::vector<std::string> emit_report(const Report& r, const std::string& dir, const std::string& format);
std::string report_json(const Report& r);
std::string report_csv(const Report& r);
Report load_report(const std::string& path);

// 0 success, 2 validation, 3 numerical failure, 4 I/O.
int exit_code_for(ErrorCode code);

}  // namespace sgk

#endif  // SGK_REPORT_HPP
