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

// sgk derive|solve|verify|certify [--config FILE] [--set key=value ...]

#include <CLI11.hpp>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgk/sgk.h"

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<int> order;
  std::optional<std::string> out;
  std::optional<std::string> input;
  std::optional<unsigned long long> seed;
  std::optional<std::string> format;
  bool print_json = false;
};

int report_error(const char* what) {
  std::fprintf(stderr, "sgk: %s: %s\n", what, sgk_last_error());
  return 2;
}

int execute(const std::string& mode, const Options& o) {
  sgk_config* cfg = nullptr;
  sgk_status st = o.config_path.empty() ? sgk_config_new(&cfg) : sgk_config_load(o.config_path.c_str(), &cfg);
  if (st != SGK_OK) {
    std::fprintf(stderr, "sgk: %s\n", sgk_last_error());
    return st == SGK_E_IO ? 4 : 2;
  }
  std::vector<std::pair<std::string, std::string>> kv{{"mode", mode}};
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "sgk: --set expects key=value, got '%s'\n", s.c_str());
      sgk_config_free(cfg);
      return 2;
    }
    kv.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.order) kv.emplace_back("order.M", std::to_string(*o.order));
  if (o.out) kv.emplace_back("io.output_dir", *o.out);
  if (o.input) kv.emplace_back("io.input_solution", *o.input);
  if (o.seed) kv.emplace_back("seed", std::to_string(*o.seed));
  if (o.format) kv.emplace_back("io.report_format", *o.format);
  int bad = 0;
  for (const auto& [k, v] : kv)
    if (sgk_config_set(cfg, k.c_str(), v.c_str()) != SGK_OK) bad = report_error("configuration");
  if (bad != 0) {
    sgk_config_free(cfg);
    return bad;
  }

  sgk_report* rep = nullptr;
  if (sgk_run(cfg, &rep) != SGK_OK) {
    std::fprintf(stderr, "sgk: %s\n", sgk_last_error());
    sgk_config_free(cfg);
    return 3;
  }
  char dir[4096];
  sgk_config_get(cfg, "io.output_dir", dir, sizeof dir);
  int rc = sgk_report_exit_code(rep);
  if (sgk_report_write(rep, dir, nullptr) != SGK_OK) {
    std::fprintf(stderr, "sgk: writing report: %s\n", sgk_last_error());
    rc = 4;
  }
  if (o.print_json) std::printf("%s\n", sgk_report_json(rep));
  std::fprintf(rc == 0 ? stdout : stderr, "sgk %s: %s\n", mode.c_str(), sgk_report_status(rep));
  sgk_report_free(rep);
  sgk_config_free(cfg);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Killing fields and finite-type certificates for sinh-Gordon ribbons"};
  app.set_version_flag("--version", sgk_version());
  app.require_subcommand(1);

  Options o;
  std::string chosen;
  const std::pair<const char*, const char*> modes[] = {
      {"derive", "symbolic Killing-field coefficients and structure checks"},
      {"solve", "solve the boundary problem and save the solution"},
      {"verify", "residual suite on a solved or loaded ribbon"},
      {"certify", "rank detection and polynomial reduction"},
  };
  for (const auto& [mode, help] : modes) {
    auto* sub = app.add_subcommand(mode, help);
    sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", o.sets, "override one key, key=value (repeatable)");
    sub->add_option("--order", o.order, "truncation order M");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--input", o.input, "solution file to load instead of solving");
    sub->add_option("--seed", o.seed, "seed for random lambda samples");
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv", "both"}));
    sub->add_flag("--json", o.print_json, "print the report JSON to stdout");
    sub->callback([&chosen, mode] { chosen = mode; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return execute(chosen, o);
}
