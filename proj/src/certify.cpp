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

#include <json.hpp>
#include "sgk/finite_type.hpp"

namespace sgk {
namespace {

using nlohmann::json;

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t k = 0; k < n; ++k) {
      h_ ^= p[k];
      h_ *= 0x100000001b3ULL;
    }
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k) {
      const unsigned char b = static_cast<unsigned char>(bits >> (8 * k));
      bytes(&b, 1);
    }
  }
  void i64(long long v) { f64(static_cast<double>(v)); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

json order_json(Order o) { return o.is_finite() ? json(o.value()) : json(nullptr); }

}  // namespace

std::string inputs_hash(const RibbonSolution& sol, int order, Complex gamma) {
  Fnv1a h;
  const auto& g = sol.grid;
  h.f64(g.period_L);
  h.f64(g.half_width_T);
  h.i64(g.nx);
  h.i64(g.ny);
  const auto& d = sol.durham;
  for (double v : {d.A_plus, d.B_plus, d.A_minus, d.B_minus, d.modulation_eps}) h.f64(v);
  h.i64(d.modulation_mode);
  for (double v : sol.omega) h.f64(v);
  h.i64(order);
  h.f64(gamma.real());
  h.f64(gamma.imag());
  return h.hex();
}

std::string to_json(const Certificate& c, const std::string& hash, const RibbonGrid& grid) {
  json j;
  j["schema"] = "sgk.certificate";
  j["schema_version"] = 1;
  j["inputs_hash"] = hash;
  j["grid"] = {{"period_L", grid.period_L}, {"half_width_T", grid.half_width_T}, {"nx", grid.nx}, {"ny", grid.ny}};
  j["verdict"] = c.verdict;
  j["reason"] = c.reason;
  j["detected_rank"] = c.detected_rank;
  j["degree"] = c.degree;
  j["exceptional"] = c.exceptional;
  j["sign_convention"] = c.sign_convention;
  j["reduction_poly"] = {{"lo", c.reduction_poly.is_zero() ? 0 : c.reduction_poly.lo()},
                         {"coefficients", c.reduction_poly.coefficients()}};
  json ht = json::array();
  for (const auto& h : c.h_tail) ht.push_back({h.real(), h.imag()});
  j["h_tail"] = ht;
  json tails = json::array();
  for (const auto& [order, v] : c.tail_norms) tails.push_back({{"order", order}, {"norm", v}});
  j["tail_norms"] = tails;
  j["condition_number"] = c.condition_number;
  j["dependence_residual"] = c.dependence_residual;
  j["killing_residual"] = c.killing_residual;
  j["sklyanin_residual"] = {{"lower", c.sklyanin_residual[0]}, {"upper", c.sklyanin_residual[1]}};
  j["det_residual"] = c.det_residual;
  j["field_bidegree"] = {order_json(c.field_bidegree.first), order_json(c.field_bidegree.second)};
  if (c.exceptional) j["q_bidegree"] = {order_json(c.q_bidegree.first), order_json(c.q_bidegree.second)};
  return j.dump(2);
}

}  // namespace sgk
