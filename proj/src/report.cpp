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

#include "sgk/report.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "sgk/diff_algebra.hpp"
#include "sgk/finite_type.hpp"

namespace sgk {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw Error(ErrorCode::validation, key + ": not a number: '" + v + "'");
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw Error(ErrorCode::validation, key + ": not an integer: '" + v + "'");
  return out;
}

struct KeySpec {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class Member>
KeySpec real_key(Member m) {
  return {[m](RunConfig& c, const std::string& k, const std::string& v) { m(c) = parse_double(k, v); },
          [m](const RunConfig& c) { return fmt_double(m(const_cast<RunConfig&>(c))); }};
}

template <class Member>
KeySpec int_key(Member m) {
  return {[m](RunConfig& c, const std::string& k, const std::string& v) {
            m(c) = static_cast<std::remove_reference_t<decltype(m(c))>>(parse_int(k, v));
          },
          [m](const RunConfig& c) { return std::to_string(m(const_cast<RunConfig&>(c))); }};
}

template <class Member>
KeySpec text_key(Member m, std::initializer_list<const char*> allowed = {}) {
  std::vector<std::string> choices(allowed.begin(), allowed.end());
  return {[m, choices](RunConfig& c, const std::string& k, const std::string& v) {
            if (!choices.empty() && std::find(choices.begin(), choices.end(), v) == choices.end()) {
              std::string msg = k + ": '" + v + "' is not one of";
              for (const auto& a : choices) msg += " " + a;
              throw Error(ErrorCode::validation, msg);
            }
            m(c) = v;
          },
          [m](const RunConfig& c) { return m(const_cast<RunConfig&>(c)); }};
}

// Ordered so that config_text is stable.
const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  static const std::vector<std::pair<std::string, KeySpec>> table = {
      {"mode",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); },
        [](const RunConfig& c) { return to_string(c.mode); }}},
      {"order.M", int_key([](RunConfig& c) -> int& { return c.order; })},
      {"grid.period_L", real_key([](RunConfig& c) -> double& { return c.grid.period_L; })},
      {"grid.half_width_T", real_key([](RunConfig& c) -> double& { return c.grid.half_width_T; })},
      {"grid.nx_points", int_key([](RunConfig& c) -> int& { return c.grid.nx; })},
      {"grid.ny_points", int_key([](RunConfig& c) -> int& { return c.grid.ny; })},
      {"durham.A_plus", real_key([](RunConfig& c) -> double& { return c.durham.A_plus; })},
      {"durham.B_plus", real_key([](RunConfig& c) -> double& { return c.durham.B_plus; })},
      {"durham.A_minus", real_key([](RunConfig& c) -> double& { return c.durham.A_minus; })},
      {"durham.B_minus", real_key([](RunConfig& c) -> double& { return c.durham.B_minus; })},
      {"durham.modulation_eps", real_key([](RunConfig& c) -> double& { return c.durham.modulation_eps; })},
      {"durham.modulation_mode", int_key([](RunConfig& c) -> int& { return c.durham.modulation_mode; })},
      {"gamma.arg_rad", real_key([](RunConfig& c) -> double& { return c.gamma_arg_rad; })},
      {"lambda.mode", text_key([](RunConfig& c) -> std::string& { return c.lambda_mode; }, {"roots", "random"})},
      {"lambda.count", int_key([](RunConfig& c) -> int& { return c.lambda_count; })},
      {"solver.kind", text_key([](RunConfig& c) -> std::string& { return c.solver; }, {"1d", "2d"})},
      {"solver.newton_max_iterations", int_key([](RunConfig& c) -> int& { return c.newton_max_iterations; })},
      {"oracle.kind", text_key([](RunConfig& c) -> std::string& { return c.oracle; }, {"exact", "fd"})},
      {"oracle.fd_accuracy_order", int_key([](RunConfig& c) -> int& { return c.fd_accuracy; })},
      {"tol.solve_1d_abs", real_key([](RunConfig& c) -> double& { return c.tol_solve_1d; })},
      {"tol.solve_2d_abs", real_key([](RunConfig& c) -> double& { return c.tol_solve_2d; })},
      {"tol.certify_abs", real_key([](RunConfig& c) -> double& { return c.tol_certify; })},
      {"rank.threshold_rel", real_key([](RunConfig& c) -> double& { return c.rank_threshold_rel; })},
      {"io.input_solution", text_key([](RunConfig& c) -> std::string& { return c.input_solution; })},
      {"io.output_dir", text_key([](RunConfig& c) -> std::string& { return c.output_dir; })},
      {"io.report_format", text_key([](RunConfig& c) -> std::string& { return c.report_format; }, {"json", "csv", "both"})},
      {"io.payload_format", text_key([](RunConfig& c) -> std::string& { return c.payload_format; }, {"binary", "csv"})},
      {"seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          const long long s = parse_int(k, v);
          if (s < 0) throw Error(ErrorCode::validation, k + ": must be non-negative");
          c.seed = static_cast<std::uint64_t>(s);
        },
        [](const RunConfig& c) { return std::to_string(c.seed); }}},
  };
  return table;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

const char* side_name(Side s) { return s == Side::upper ? "upper" : "lower"; }

std::vector<Complex> lambda_samples(const RunConfig& c, const DurhamData& d, Complex gamma) {
  const std::vector<KMatrix> kms{d.k_matrix(Side::upper), d.k_matrix(Side::lower)};
  if (c.lambda_mode == "roots") return default_lambda_samples(kms, gamma, c.lambda_count);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<Complex> out;
  for (int k = 0; k < c.lambda_count; ++k) {
    const Complex lambda = std::polar(1.0, phase(rng));
    bool ok = true;
    for (const auto& km : kms)
      if (std::abs(k_det(km, lambda, gamma)) <= 1e-10 * (1.0 + 16.0 * (km.A * km.A + km.B * km.B))) ok = false;
    if (ok) out.push_back(lambda);
  }
  if (out.empty()) throw Error(ErrorCode::sample_set, "every random lambda sample hits a zero of det K");
  return out;
}

RibbonSolution obtain_solution(const RunConfig& c, Report& r) {
  if (!c.input_solution.empty()) {
    RibbonSolution sol = load_solution(c.input_solution);
    r.solution_file = c.input_solution;
    return sol;
  }
  if (c.solver == "1d") return solve_1d(c.grid, c.durham, c.tol_solve_1d);
  Newton2dOptions opts;
  opts.tol = c.tol_solve_2d;
  opts.max_iterations = c.newton_max_iterations;
  return solve_2d(c.grid, c.durham, std::nullopt, opts);
}

void record_solution(const RibbonSolution& sol, Report& r) {
  r.scalars["pde_residual"] = sol.meta.pde_residual;
  r.scalars["durham_residual_lower"] = sol.meta.durham_residual_lower;
  r.scalars["durham_residual_upper"] = sol.meta.durham_residual_upper;
  r.scalars["iterations"] = sol.meta.iterations;
  r.scalars["quadratic_order"] = sol.meta.quadratic_order;
  r.scalars["x_variation"] = sol.x_variation();
  if (sol.profile) {
    r.scalars["energy_drift"] = sol.meta.energy_drift;
    r.scalars["shooting_parameter"] = sol.meta.shooting_parameter;
  }
  for (std::size_t k = 0; k < sol.meta.residual_history.size(); ++k)
    r.rows.push_back({"residual_history", static_cast<int>(k), 0, -1, "", sol.meta.residual_history[k]});
}

void run_derive(const RunConfig& c, Report& r) {
  const SymbolicKillingField f = ps_recursion(c.order);
  std::ostringstream text;
  for (int m = 0; m <= c.order; ++m) {
    const auto idx = static_cast<std::size_t>(m);
    for (const auto& [name, p] : {std::pair<const char*, const DiffPolynomial*>{"u", &f.u[idx]},
                                  {"psi", &f.psi[idx]},
                                  {"t", &f.t[idx]},
                                  {"s", &f.s[idx]}}) {
      const std::string line = std::string(name) + "_" + std::to_string(m) + " = " + p->to_string();
      r.symbolic.push_back(line);
      text << line << '\n';
    }
  }
  int nonzero = 0;
  for (const auto& res : verify_structure_eqs(f)) {
    const double terms = static_cast<double>(res.residual.size());
    if (terms != 0.0) ++nonzero;
    r.rows.push_back({"structure_terms", res.m, res.equation, -1, "", terms});
  }
  r.scalars["structure_nonzero"] = nonzero;

  const auto det = det_series(f);
  const DiffPolynomial expected = Rational(-1, 4) * DiffPolynomial::gamma_power(-1);
  bool exact = true;
  for (int k = 0; k <= c.order; ++k) {
    const DiffPolynomial want = k == 1 ? expected : DiffPolynomial{};
    if (!(det.coeff(k) == want)) exact = false;
  }
  r.scalars["det_exact"] = exact ? 1.0 : 0.0;
  text << "structure residuals nonzero: " << nonzero << '\n' << "det = -lambda/(4 gamma): " << (exact ? "yes" : "no")
       << '\n';

  fs::create_directories(c.output_dir);
  const auto path = (fs::path(c.output_dir) / "derive.txt").string();
  std::ofstream out(path);
  if (!(out << text.str())) throw Error(ErrorCode::io, "cannot write " + path);
  r.solution_file.clear();
  if (nonzero != 0 || !exact) throw Error(ErrorCode::diverged, "symbolic identities failed");
}

void run_solve(const RunConfig& c, Report& r) {
  const RibbonSolution sol = obtain_solution(c, r);
  record_solution(sol, r);
  fs::create_directories(c.output_dir);
  const auto stem = (fs::path(c.output_dir) / "solution").string();
  save_solution(sol, stem, c.payload_format == "csv" ? PayloadFormat::csv : PayloadFormat::binary);
  r.solution_file = stem + ".json";
}

KillingSample sample_for(const RunConfig& c, const RibbonSolution& sol) {
  if (c.oracle == "exact" && !sol.profile)
    throw Error(ErrorCode::validation, "oracle.kind: exact derivatives need a 1D profile; use fd for 2D solutions");
  EvalOptions eo;
  eo.oracle = c.oracle == "exact" ? OracleKind::exact_1d : OracleKind::finite_difference;
  eo.fd_accuracy = c.fd_accuracy;
  return eval_killing(std::make_shared<const RibbonSolution>(sol), c.order, std::polar(1.0, c.gamma_arg_rad), eo);
}

void run_verify(const RunConfig& c, Report& r) {
  const RibbonSolution sol = obtain_solution(c, r);
  record_solution(sol, r);
  const KillingSample ks = sample_for(c, sol);
  r.warnings = ks.warnings;
  const DerivativeMethod method = c.oracle == "exact" ? DerivativeMethod::exact : DerivativeMethod::finite_difference;

  const auto kr = killing_residual(ks, method);
  r.scalars["killing_residual"] = kr.max;
  for (const auto& [m, eqs] : kr.per_order)
    for (std::size_t e = 0; e < eqs.size(); ++e) r.rows.push_back({"killing", m, static_cast<int>(e + 1), -1, "", eqs[e]});

  const auto dc = det_constancy(ks);
  r.scalars["det_variation"] = dc.variation;
  r.scalars["det_normalization"] = dc.normalization;
  r.scalars["det_deviation"] = dc.deviation;
  for (std::size_t m = 0; m < dc.per_order_variation.size(); ++m)
    r.rows.push_back({"det_variation", static_cast<int>(m), 0, -1, "", dc.per_order_variation[m]});

  const auto samples = lambda_samples(c, sol.durham, ks.gamma);
  const auto sk = sklyanin_field_residual(ks, samples);
  for (Side side : {Side::lower, Side::upper}) {
    const auto& rep = sk[side == Side::upper ? 1 : 0];
    r.scalars[std::string("sklyanin_") + side_name(side)] = rep.max;
    for (std::size_t s = 0; s < rep.per_sample.size(); ++s)
      r.rows.push_back({"sklyanin", 0, 0, static_cast<int>(s), side_name(side), rep.per_sample[s]});
    for (const auto& [k, v] : rep.per_order) r.rows.push_back({"sklyanin_order", k, 0, -1, side_name(side), v});

    const auto cb = coefficient_boundary_residuals(ks, side);
    for (const auto& [name, table] : cb.tables) {
      r.scalars[name + "_" + side_name(side)] = cb.max.at(name);
      for (const auto& [mn, v] : table) r.rows.push_back({name, mn.first, mn.second, -1, side_name(side), v});
    }
    r.scalars[std::string("telescoping_gap_") + side_name(side)] = cb.telescoping_gap;

    const auto rb = robin_im_residual(ks, side, method);
    r.scalars[std::string("robin_") + side_name(side)] = rb.max;
    r.scalars[std::string("robin_trivial_") + side_name(side)] = rb.trivial ? 1.0 : 0.0;
    for (const auto& [m, v] : rb.per_order) r.rows.push_back({"robin", m, -m, -1, side_name(side), v});
  }

  const auto ls = linsg_residual(ks, method);
  r.scalars["linsg_residual"] = ls.max;
  for (const auto& [m, v] : ls.per_order) r.rows.push_back({"linsg", m, -m, -1, "", v.front()});

  const auto rk = rank_detect(ks, c.rank_threshold_rel);
  r.scalars["rank"] = rk.rank;
  r.scalars["rank_full"] = rk.full ? 1.0 : 0.0;
}

void run_certify(const RunConfig& c, Report& r) {
  const RibbonSolution sol = obtain_solution(c, r);
  record_solution(sol, r);
  const KillingSample ks = sample_for(c, sol);
  r.warnings = ks.warnings;
  const auto rk = rank_detect(ks, c.rank_threshold_rel);
  for (std::size_t k = 0; k < rk.relative_singular_values.size(); ++k)
    r.rows.push_back({"singular_value_rel", static_cast<int>(k + 1), 0, -1, "", rk.relative_singular_values[k]});
  ReduceOptions ro;
  ro.tol = c.tol_certify;
  ro.lambda_samples = lambda_samples(c, sol.durham, 1.0);
  const Certificate cert = polynomial_reduce(ks, rk.rank, ro);
  r.scalars["rank"] = rk.rank;
  r.scalars["certified"] = cert.verdict == "certified" ? 1.0 : 0.0;
  r.scalars["killing_residual"] = cert.killing_residual;
  r.scalars["sklyanin_lower"] = cert.sklyanin_residual[0];
  r.scalars["sklyanin_upper"] = cert.sklyanin_residual[1];
  r.scalars["det_residual"] = cert.det_residual;
  for (const auto& [k, v] : cert.tail_norms) r.rows.push_back({"tail_norm", k, 0, -1, "", v});
  r.certificate = to_json(cert, inputs_hash(sol, c.order, ks.gamma), sol.grid);

  fs::create_directories(c.output_dir);
  const auto path = (fs::path(c.output_dir) / "certificate.json").string();
  std::ofstream out(path);
  if (!(out << r.certificate << '\n')) throw Error(ErrorCode::io, "cannot write " + path);
  if (cert.verdict != "certified") {
    r.exit_code = 3;
    r.status = "inconclusive: " + cert.reason;
  }
}

json row_json(const ResidualRow& row) {
  return {{"table", row.table}, {"m", row.m}, {"n", row.n}, {"sample", row.sample}, {"side", row.side}, {"value", row.value}};
}

}  // namespace

std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::derive: return "derive";
    case RunMode::solve: return "solve";
    case RunMode::verify: return "verify";
    case RunMode::certify: return "certify";
  }
  return "verify";
}

RunMode parse_mode(const std::string& s) {
  if (s == "derive") return RunMode::derive;
  if (s == "solve") return RunMode::solve;
  if (s == "verify") return RunMode::verify;
  if (s == "certify") return RunMode::certify;
  throw Error(ErrorCode::validation, "mode: '" + s + "' is not one of derive solve verify certify");
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& [name, entry] : key_table())
    if (name == key) {
      entry.set(c, key, trim(value));
      return;
    }
  throw Error(ErrorCode::validation, "unknown key: " + key);
}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> problems;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    try {
      set_config_value(c, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      problems.push_back("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& p : problems) msg += "\n  " + p;
    throw Error(ErrorCode::validation, msg);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open configuration " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_text(const RunConfig& c) {
  std::string out;
  for (const auto& [name, entry] : key_table()) out += name + " = " + entry.get(c) + "\n";
  return out;
}

void validate(const RunConfig& c) {
  std::vector<std::string> bad;
  if (c.order < 1) bad.push_back("order.M must be >= 1");
  if (!(c.grid.period_L > 0.0)) bad.push_back("grid.period_L must be positive");
  if (!(c.grid.half_width_T > 0.0)) bad.push_back("grid.half_width_T must be positive");
  if (c.grid.nx < 4) bad.push_back("grid.nx_points must be >= 4");
  if (c.grid.ny < 5) bad.push_back("grid.ny_points must be >= 5");
  for (const auto& [name, v] : {std::pair<const char*, double>{"tol.solve_1d_abs", c.tol_solve_1d},
                                {"tol.solve_2d_abs", c.tol_solve_2d},
                                {"tol.certify_abs", c.tol_certify},
                                {"rank.threshold_rel", c.rank_threshold_rel}})
    if (!(v > 0.0)) bad.push_back(std::string(name) + " must be positive");
  if (!(c.rank_threshold_rel < 1.0)) bad.push_back("rank.threshold_rel must be below 1");
  if (c.lambda_count < 1) bad.push_back("lambda.count must be >= 1");
  if (c.fd_accuracy < 2) bad.push_back("oracle.fd_accuracy_order must be >= 2");
  if (c.newton_max_iterations < 1) bad.push_back("solver.newton_max_iterations must be >= 1");
  if (c.durham.modulation_mode < 0) bad.push_back("durham.modulation_mode must be >= 0");
  if (c.solver == "1d" && c.durham.is_modulated() && c.input_solution.empty())
    bad.push_back("solver.kind: modulated boundary data needs the 2d solver");
  if (c.output_dir.empty()) bad.push_back("io.output_dir must not be empty");
  const auto one_of = [&bad](const char* key, const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
      if (v == a) return;
    bad.push_back(std::string(key) + ": unknown value '" + v + "'");
  };
  one_of("lambda.mode", c.lambda_mode, {"roots", "random"});
  one_of("solver.kind", c.solver, {"1d", "2d"});
  one_of("oracle.kind", c.oracle, {"exact", "fd"});
  one_of("io.report_format", c.report_format, {"json", "csv", "both"});
  one_of("io.payload_format", c.payload_format, {"binary", "csv"});
  for (double v : {c.grid.period_L, c.grid.half_width_T, c.durham.A_plus, c.durham.B_plus, c.durham.A_minus,
                   c.durham.B_minus, c.durham.modulation_eps, c.gamma_arg_rad})
    if (!std::isfinite(v)) {
      bad.push_back("non-finite numeric value");
      break;
    }
  if (!bad.empty()) {
    std::string msg = "invalid configuration";
    for (const auto& b : bad) msg += "\n  " + b;
    throw Error(ErrorCode::validation, msg);
  }
}

const char* tool_version() { return "sgk 0.1.0"; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation:
    case ErrorCode::parameter_domain:
      return 2;
    case ErrorCode::io:
      return 4;
    default:
      return 3;
  }
}

Report run(const RunConfig& config) {
  Report r;
  r.tool_version = tool_version();
  r.config = config;
  r.status = "ok";
  const auto t0 = Clock::now();
  try {
    validate(config);
    switch (config.mode) {
      case RunMode::derive: run_derive(config, r); break;
      case RunMode::solve: run_solve(config, r); break;
      case RunMode::verify: run_verify(config, r); break;
      case RunMode::certify: run_certify(config, r); break;
    }
  } catch (const Error& e) {
    r.exit_code = exit_code_for(e.code());
    r.status = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    r.exit_code = 3;
    r.status = std::string("internal: ") + e.what();
  }
  r.timings_s["total"] = seconds_since(t0);
  return r;
}

std::string report_json(const Report& r) {
  json j;
  j["schema"] = "sgk.report";
  j["schema_version"] = r.schema_version;
  j["tool_version"] = r.tool_version;
  json cfg = json::object();
  for (const auto& [name, entry] : key_table()) cfg[name] = entry.get(r.config);
  j["config"] = cfg;
  j["exit_code"] = r.exit_code;
  j["status"] = r.status;
  j["scalars"] = r.scalars;
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(row_json(row));
  j["rows"] = rows;
  j["symbolic"] = r.symbolic;
  j["warnings"] = r.warnings;
  j["solution_file"] = r.solution_file;
  j["certificate"] = r.certificate.empty() ? json(nullptr) : json::parse(r.certificate);
  j["timings_s"] = r.timings_s;
  return j.dump(2);
}

std::string report_csv(const Report& r) {
  std::string out = "table,m,n,sample,side,value\n";
  for (const auto& row : r.rows)
    out += row.table + "," + std::to_string(row.m) + "," + std::to_string(row.n) + "," + std::to_string(row.sample) +
           "," + row.side + "," + fmt_double(row.value) + "\n";
  return out;
}

std::vector<std::string> emit_report(const Report& r, const std::string& dir, const std::string& format) {
  if (format != "json" && format != "csv" && format != "both")
    throw Error(ErrorCode::validation, "report format must be json, csv or both");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + dir + ": " + ec.message());
  std::vector<std::string> written;
  const auto write = [&](const std::string& name, const std::string& body) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!(out << body)) throw Error(ErrorCode::io, "cannot write " + path);
    written.push_back(path);
  };
  if (format != "csv") write("report.json", report_json(r) + "\n");
  if (format != "json") write("report.csv", report_csv(r));
  return written;
}

Report load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open report " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::io, "malformed report " + path + ": " + e.what());
  }
  try {
    if (j.at("schema") != "sgk.report") throw Error(ErrorCode::io, path + " is not a report");
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    r.tool_version = j.at("tool_version").get<std::string>();
    for (const auto& [k, v] : j.at("config").items()) set_config_value(r.config, k, v.get<std::string>());
    r.exit_code = j.at("exit_code").get<int>();
    r.status = j.at("status").get<std::string>();
    r.scalars = j.at("scalars").get<std::map<std::string, double>>();
    for (const auto& row : j.at("rows"))
      r.rows.push_back({row.at("table").get<std::string>(), row.at("m").get<int>(), row.at("n").get<int>(),
                        row.at("sample").get<int>(), row.at("side").get<std::string>(), row.at("value").get<double>()});
    r.symbolic = j.at("symbolic").get<std::vector<std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.solution_file = j.at("solution_file").get<std::string>();
    if (!j.at("certificate").is_null()) r.certificate = j.at("certificate").dump(2);
    r.timings_s = j.at("timings_s").get<std::map<std::string, double>>();
    return r;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::io, "malformed report " + path + ": " + e.what());
  }
}

}  // namespace sgk
