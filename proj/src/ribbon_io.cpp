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

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sgk/ribbon.hpp"

namespace sgk {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSchema = "sgk.ribbon_solution";
constexpr int kVersion = 1;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_binary(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path + " for writing");
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    unsigned char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) throw Error(ErrorCode::io, "write failed for " + path);
}

std::vector<double> read_binary(const std::string& path, std::size_t count) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::io, "payload too short: " + path);
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    values[k] = std::bit_cast<double>(bits);
  }
  return values;
}

void write_csv_rows(std::ostream& out, const std::vector<double>& values, std::size_t begin, std::size_t count) {
  for (std::size_t k = 0; k < count; ++k) out << (k ? "," : "") << format_double(values[begin + k]);
  out << "\n";
}

std::vector<double> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      if (cell.empty()) continue;
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorCode::io, "malformed number '" + cell + "' in " + path);
      }
    }
  }
  return values;
}

json meta_to_json(const SolverMeta& m) {
  return {{"solver", m.solver},
          {"tol", m.tol},
          {"iterations", m.iterations},
          {"residual_history", m.residual_history},
          {"quadratic_order", m.quadratic_order},
          {"shooting_parameter", m.shooting_parameter},
          {"energy_drift", m.energy_drift},
          {"pde_residual", m.pde_residual},
          {"durham_residual_lower", m.durham_residual_lower},
          {"durham_residual_upper", m.durham_residual_upper}};
}

SolverMeta meta_from_json(const json& j) {
  SolverMeta m;
  m.solver = j.at("solver").get<std::string>();
  m.tol = j.at("tol").get<double>();
  m.iterations = j.at("iterations").get<int>();
  m.residual_history = j.at("residual_history").get<std::vector<double>>();
  m.quadratic_order = j.at("quadratic_order").get<double>();
  m.shooting_parameter = j.at("shooting_parameter").get<double>();
  m.energy_drift = j.at("energy_drift").get<double>();
  m.pde_residual = j.at("pde_residual").get<double>();
  m.durham_residual_lower = j.at("durham_residual_lower").get<double>();
  m.durham_residual_upper = j.at("durham_residual_upper").get<double>();
  return m;
}

}  // namespace

void save_solution(const RibbonSolution& sol, const std::string& stem, PayloadFormat format) {
  const fs::path base(stem);
  const std::string payload_name = base.filename().string() + (format == PayloadFormat::binary ? ".bin" : ".csv");
  const fs::path payload_path = base.parent_path() / payload_name;

  std::vector<double> values = sol.omega;
  if (sol.profile) {
    values.insert(values.end(), sol.profile->omega.begin(), sol.profile->omega.end());
    values.insert(values.end(), sol.profile->omega_y.begin(), sol.profile->omega_y.end());
  }
  if (format == PayloadFormat::binary) {
    write_binary(payload_path.string(), values);
  } else {
    std::ofstream out(payload_path);
    if (!out) throw Error(ErrorCode::io, "cannot open " + payload_path.string() + " for writing");
    const auto nx = static_cast<std::size_t>(sol.grid.nx), ny = static_cast<std::size_t>(sol.grid.ny);
    for (std::size_t j = 0; j < ny; ++j) write_csv_rows(out, values, j * nx, nx);
    if (sol.profile) {
      write_csv_rows(out, values, nx * ny, ny);
      write_csv_rows(out, values, nx * ny + ny, ny);
    }
    if (!out) throw Error(ErrorCode::io, "write failed for " + payload_path.string());
  }

  const auto& g = sol.grid;
  const auto& d = sol.durham;
  json header = {
      {"schema", kSchema},
      {"schema_version", kVersion},
      {"grid", {{"period_L", g.period_L}, {"half_width_T", g.half_width_T}, {"nx", g.nx}, {"ny", g.ny}}},
      {"durham",
       {{"A_plus", d.A_plus},
        {"B_plus", d.B_plus},
        {"A_minus", d.A_minus},
        {"B_minus", d.B_minus},
        {"modulation_eps", d.modulation_eps},
        {"modulation_mode", d.modulation_mode}}},
      {"meta", meta_to_json(sol.meta)},
      {"payload",
       {{"file", payload_name},
        {"format", format == PayloadFormat::binary ? "float64le" : "csv"},
        {"layout", "row-major omega[j*nx+i]; then profile omega[ny], omega_y[ny] when has_profile"},
        {"has_profile", sol.profile.has_value()}}}};
  const fs::path header_path = base.parent_path() / (base.filename().string() + ".json");
  std::ofstream out(header_path);
  if (!out) throw Error(ErrorCode::io, "cannot open " + header_path.string() + " for writing");
  out << header.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::io, "write failed for " + header_path.string());
}

RibbonSolution load_solution(const std::string& path) {
  fs::path header_path(path);
  if (header_path.extension() != ".json") header_path += ".json";
  std::ifstream in(header_path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + header_path.string());
  json header;
  try {
    in >> header;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::io, "malformed solution header " + header_path.string() + ": " + e.what());
  }
  try {
    if (header.at("schema").get<std::string>() != kSchema)
      throw Error(ErrorCode::io, "not a ribbon solution header: " + header_path.string());
    if (header.at("schema_version").get<int>() > kVersion)
      throw Error(ErrorCode::io, "solution schema version is newer than this build");
    RibbonSolution sol;
    const auto& g = header.at("grid");
    sol.grid = {g.at("period_L").get<double>(), g.at("half_width_T").get<double>(), g.at("nx").get<int>(),
                g.at("ny").get<int>()};
    sol.grid.validate();
    const auto& d = header.at("durham");
    sol.durham = {d.at("A_plus").get<double>(),       d.at("B_plus").get<double>(),
                  d.at("A_minus").get<double>(),      d.at("B_minus").get<double>(),
                  d.at("modulation_eps").get<double>(), d.at("modulation_mode").get<int>()};
    sol.meta = meta_from_json(header.at("meta"));
    const auto& p = header.at("payload");
    const bool has_profile = p.at("has_profile").get<bool>();
    const fs::path payload_path = header_path.parent_path() / p.at("file").get<std::string>();
    const std::size_t n = sol.grid.size() + (has_profile ? 2 * static_cast<std::size_t>(sol.grid.ny) : 0);
    std::vector<double> values = p.at("format").get<std::string>() == "csv" ? read_csv(payload_path.string())
                                                                             : read_binary(payload_path.string(), n);
    if (values.size() != n) throw Error(ErrorCode::io, "payload size mismatch in " + payload_path.string());
    sol.omega.assign(values.begin(), values.begin() + static_cast<long>(sol.grid.size()));
    if (has_profile) {
      Profile1d prof;
      const auto off = static_cast<long>(sol.grid.size()), ny = static_cast<long>(sol.grid.ny);
      prof.omega.assign(values.begin() + off, values.begin() + off + ny);
      prof.omega_y.assign(values.begin() + off + ny, values.begin() + off + 2 * ny);
      sol.profile = std::move(prof);
    }
    return sol;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::io, "malformed solution header " + header_path.string() + ": " + e.what());
  }
}

}  // namespace sgk
