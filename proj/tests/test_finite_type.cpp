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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "sgk/finite_type.hpp"
#include "test_util.hpp"

using namespace sgk;
using sgk::testing::error_of;

namespace {

constexpr Complex kI{0.0, 1.0};

std::shared_ptr<const RibbonSolution> solved(const DurhamData& d, int ny = 65) {
  RibbonGrid g;
  g.nx = 8;
  g.ny = ny;
  return std::make_shared<const RibbonSolution>(solve_1d(g, d, 1e-12));
}

const DurhamData kGeneric{0.3, 0.1, -0.2, 0.05};
// A = -B on both sides: the vacuum solves the boundary problem
const DurhamData kVacuumData{0.3, -0.3, 0.2, -0.2};

double max_abs(const GridField& f) {
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("vacuum field has the closed form") {
  const auto ks = eval_killing(solved(DurhamData{}), 4, std::polar(1.0, 0.4));
  const Complex gamma = std::polar(1.0, 0.4);
  for (int m = 0; m <= 4; ++m) {
    const auto c = ks.phi.coeff(m);
    CHECK(max_abs(c.u) == 0.0);
    for (const auto& t : c.t) CHECK(std::abs(t - (m == 0 ? 0.5 / gamma : 0.0)) < 1e-15);
    for (const auto& s : c.s) CHECK(std::abs(s - (m == 1 ? 0.5 : 0.0)) < 1e-15);
  }
  CHECK(killing_residual(ks).max == 0.0);
  const auto dc = det_constancy(ks);
  CHECK(dc.variation == 0.0);
  CHECK(dc.normalization < 1e-14);
}

TEST_CASE("first coefficients on a profile") {
  const auto sol = solved(kGeneric);
  const Complex gamma = std::polar(1.0, -0.6);
  const auto ks = eval_killing(sol, 2, gamma);
  const auto& p = *sol->profile;
  const auto c1 = ks.phi.coeff(1), c2 = ks.phi.coeff(2);
  for (int j = 0; j < sol->grid.ny; ++j) {
    const std::size_t k = sol->grid.index(5, j);
    const double w = p.omega[j], wy = p.omega_y[j];
    // u_1 = -2i w_z / gamma with w_z = -i w_y / 2
    CHECK(std::abs(c1.u[k] + wy / gamma) < 1e-14);
    // u_2 = (8i w_zzz - 16i w_z^3) / gamma^2 with w_zzz = -(i/8) w_y cosh(2w)
    const Complex wz = -0.5 * kI * wy, wzzz = -0.125 * kI * wy * std::cosh(2 * w);
    CHECK(std::abs(c2.u[k] - (8.0 * kI * wzzz - 16.0 * kI * wz * wz * wz) / (gamma * gamma)) < 1e-13);
  }
}

TEST_CASE("residual suites vanish on solved data") {
  const auto ks = eval_killing(solved(kGeneric), 5, 1.0);
  CHECK(killing_residual(ks).max < 1e-10);
  const auto dc = det_constancy(ks);
  CHECK(dc.deviation < 1e-10);
  CHECK(dc.variation < 1e-10);
  const auto sk = sklyanin_field_residual(ks);
  CHECK(sk[0].max < 1e-10);
  CHECK(sk[1].max < 1e-10);
  for (Side side : {Side::lower, Side::upper}) {
    const auto cb = coefficient_boundary_residuals(ks, side);
    for (const char* name : {"bc1", "bc2", "bc3", "bc4", "bcp1", "bcp2"}) {
      REQUIRE(cb.max.count(name) == 1);
      CHECK(cb.max.at(name) < 1e-10);
    }
    CHECK(cb.telescoping_gap < 1e-12);
  }
  CHECK(linsg_residual(ks, DerivativeMethod::exact).max < 1e-10);
}

TEST_CASE("Sklyanin control with the wrong boundary coefficient") {
  const auto ks = eval_killing(solved(kVacuumData), 4, 1.0);
  const auto right = sklyanin_field_residual(ks);
  CHECK(std::max(right[0].max, right[1].max) < 1e-14);
  const auto wrong = sklyanin_field_residual(ks, KMatrix{0.4, -0.3}, kVacuumData.k_matrix(Side::lower));
  CHECK(wrong[1].max > 1e-2);
  CHECK(wrong[0].max < 1e-14);
}

TEST_CASE("Robin condition on x-independent data is trivial") {
  const auto ks = eval_killing(solved(kGeneric), 4, 1.0);
  for (Side side : {Side::lower, Side::upper}) {
    const auto r = robin_im_residual(ks, side, DerivativeMethod::exact);
    CHECK(r.trivial);
    CHECK(r.max < 1e-12);
  }
}

TEST_CASE("u_1 solves the linearized equation") {
  const auto sol = solved(kGeneric, 129);
  const auto ks = eval_killing(sol, 2, 1.0);
  const auto& u1 = ks.phi.coeff(1).u;
  const auto Lu = linearized_apply(*sol, u1);
  // u_1 = -w_y: differencing commutes with the discrete equation
  CHECK(max_abs(Lu) < 1e-3);
  CHECK(linsg_residual(ks, DerivativeMethod::exact).max < 1e-10);
}

TEST_CASE("rank detection") {
  const auto vac = eval_killing(solved(kVacuumData), 5, 1.0);
  const auto rv = rank_detect(vac);
  CHECK(rv.rank == 0);
  CHECK_FALSE(rv.full);
  CHECK(rank_detect(eval_killing(solved(kGeneric), 5, 1.0)).rank == 1);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<GridField> rows(4, GridField(64));
  for (auto& r : rows)
    for (auto& v : r) v = Complex(n(rng), n(rng));
  const auto rn = rank_of_rows(rows);
  CHECK(rn.full);
  CHECK(rn.rank == 4);
  rows.push_back(rows[0]);
  for (std::size_t k = 0; k < rows[4].size(); ++k) rows[4][k] = 2.0 * rows[0][k] - rows[2][k];
  CHECK(rank_of_rows(rows).rank == 4);
  CHECK_FALSE(rank_of_rows(rows).full);
}

TEST_CASE("polynomial reduction") {
  const auto ks = eval_killing(solved(kGeneric), 5, 1.0);
  const auto cert = polynomial_reduce(ks, 1);
  CHECK(cert.verdict == "certified");
  CHECK(cert.degree == 2);
  REQUIRE(cert.f.size() == 2);
  CHECK(cert.f[0] == 1.0);
  CHECK(cert.killing_residual < 1e-8);
  CHECK(cert.det_residual < 1e-8);
  CHECK(cert.field_bidegree == std::make_pair(Order(0), Order(2)));
  CHECK_FALSE(cert.exceptional);

  const auto forced = polynomial_reduce(ks, 0);
  CHECK(forced.verdict == "inconclusive");
  CHECK_FALSE(forced.reason.empty());
}

TEST_CASE("factor recovery") {
  const auto ks = eval_killing(solved(kGeneric), 5, 1.0);
  const auto own = recover_factor(ks.phi, ks);
  CHECK(own.f.coeff(0) == Complex(1.0));
  for (int j = 1; own.f.is_known(j); ++j) CHECK(std::abs(own.f.coeff(j)) < 1e-10);
  CHECK(own.u_defect < 1e-10);
  CHECK(own.s_defect < 1e-10);
  CHECK(own.t_variation < 1e-10);

  const LaurentSeries<Complex> f(0, {1.0, -0.5, 2.0});
  const auto rec = recover_factor(multiply(f, ks.phi), ks);
  for (int j = 0; j <= 2; ++j) CHECK(std::abs(rec.f.coeff(j) - f.coeff(j)) < 1e-10);
}

TEST_CASE("trace-free and constant determinant under the module action") {
  const auto ks = eval_killing(solved(kGeneric), 4, 1.0);
  const auto psi = multiply(LaurentSeries<Complex>(0, {1.0, 0.25}), ks.phi);
  // coefficient m of psi is phi_m + phi_{m-1}/4
  for (int m = 1; m <= 4; ++m) {
    const auto a = psi.coeff(m), b = ks.phi.coeff(m), c = ks.phi.coeff(m - 1);
    for (std::size_t p = 0; p < a.size(); ++p) CHECK(std::abs(a.u[p] - b.u[p] - 0.25 * c.u[p]) < 1e-15);
  }
}

TEST_CASE("exceptional reduction") {
  const auto ks = eval_killing(solved(kVacuumData, 33), 6, 1.0);
  CHECK(error_of([&] { (void)exceptional_reduce(ks.phi, ks, 1); }) == ErrorCode::not_applicable);
  CHECK(error_of([&] { (void)exceptional_reduce(ks.phi, ks, 9); }) == ErrorCode::not_applicable);

  // psi = i lambda^k phi: u_k = 0 and t_k = i/2
  for (int k : {1, 2}) {
    const auto psi = multiply(LaurentSeries<Complex>::monomial(kI, k), ks.phi);
    const auto cert = exceptional_reduce(psi, ks, k);
    CHECK(cert.exceptional);
    CHECK(cert.verdict == "certified");
    CHECK(cert.degree == k);
    REQUIRE_FALSE(cert.h_tail.empty());
    CHECK(std::abs(cert.h_tail[0] - kI) < 1e-15);
    // lambda^2 D(lambda, 1) with A = 0.3, B = -0.3
    const std::vector<double> expect{-1.0, 1.44, 4.88, 1.44, -1.0};
    REQUIRE(cert.f.size() == expect.size());
    for (std::size_t j = 0; j < expect.size(); ++j) CHECK(cert.f[j] == doctest::Approx(expect[j]).epsilon(1e-12));
    CHECK(cert.field_bidegree == std::make_pair(Order(0), Order(5)));
    CHECK(cert.killing_residual < 1e-12);
  }
  const auto psi3 = multiply(LaurentSeries<Complex>::monomial(kI, 3), ks.phi);
  const auto short_cert = exceptional_reduce(psi3, ks, 3);
  CHECK(short_cert.verdict == "inconclusive");
  CHECK(short_cert.reason.find("too small") != std::string::npos);
}

TEST_CASE("inputs hash and certificate JSON") {
  const auto a = solved(kGeneric);
  const auto b = solved(kGeneric);
  CHECK(inputs_hash(*a, 5, 1.0) == inputs_hash(*b, 5, 1.0));
  CHECK(inputs_hash(*a, 5, 1.0) != inputs_hash(*a, 6, 1.0));
  CHECK(inputs_hash(*a, 5, 1.0) != inputs_hash(*solved(kVacuumData), 5, 1.0));
  CHECK(inputs_hash(*a, 5, 1.0).size() == 16);

  const auto ks = eval_killing(a, 5, 1.0);
  const auto cert = polynomial_reduce(ks, 1);
  const std::string j = to_json(cert, inputs_hash(*a, 5, 1.0), a->grid);
  CHECK(j.find("\"verdict\": \"certified\"") != std::string::npos);
  CHECK(j.find(inputs_hash(*a, 5, 1.0)) != std::string::npos);
  CHECK(j == to_json(cert, inputs_hash(*a, 5, 1.0), a->grid));
}
