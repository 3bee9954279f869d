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
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "sgk/ribbon.hpp"
#include "test_util.hpp"

using namespace sgk;
using sgk::testing::error_of;

namespace {

RibbonGrid grid(int nx, int ny, double T = 1.0) { return {2.0 * std::numbers::pi, T, nx, ny}; }

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("sgk_test_ribbon_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK(error_of([] { grid(8, 2).validate(); }) == ErrorCode::validation);
  CHECK(error_of([] { grid(0, 33).validate(); }) == ErrorCode::validation);
  CHECK(error_of([] { grid(8, 33, -1.0).validate(); }) == ErrorCode::validation);
  CHECK_FALSE(error_of([] { grid(8, 33).validate(); }));
}

TEST_CASE("1D solve with zero data is the vacuum") {
  const auto s = solve_1d(grid(8, 33), DurhamData{});
  REQUIRE(s.profile);
  CHECK(max_abs(s.omega) < 1e-10);
  CHECK(max_abs(s.profile->omega_y) < 1e-10);
  CHECK(s.meta.solver == "shooting");
}

TEST_CASE("1D solve of symmetric data is even") {
  const auto s = solve_1d(grid(8, 129), DurhamData::free_boundary(10.0), 1e-12);
  const auto& w = s.profile->omega;
  for (std::size_t j = 0; j < w.size(); ++j) CHECK(std::abs(w[j] - w[w.size() - 1 - j]) < 1e-9);
  CHECK(max_abs(s.omega) > 1e-3);
  const auto exact = profile_durham_residual(s);
  CHECK(exact[0] < 1e-9);
  CHECK(exact[1] < 1e-9);
  // the stored residuals difference w across the boundary rows
  CHECK(s.meta.durham_residual_upper < 1e-4);
  CHECK(s.meta.energy_drift < 1e-12);
  CHECK(s.x_variation() == 0.0);
}

TEST_CASE("1D solve agrees with a dense relaxation") {
  const DurhamData d{0.3, 0.1, -0.2, 0.05};
  const auto s = solve_1d(grid(4, 65), d, 1e-12);
  const int n = 64 * 64;
  const auto ref = sgk::testing::dense_relaxation_1d(1.0, d, n);
  double worst = 0.0;
  for (int j = 0; j < 65; ++j) worst = std::max(worst, std::abs(s.profile->omega[j] - ref[static_cast<std::size_t>(j * 64)]));
  CHECK(worst < 1e-6);
}

TEST_CASE("2D solve from zero with A = -B stays at zero") {
  const DurhamData d{0.4, -0.4, 0.2, -0.2};
  const auto s = solve_2d(grid(8, 17), d, std::vector<double>(8 * 17, 0.0));
  CHECK(max_abs(s.omega) == 0.0);
  CHECK(s.meta.solver == "newton");
}

TEST_CASE("2D solve from the 1D profile stays x-independent") {
  const auto s = solve_2d(grid(16, 33), DurhamData{0.3, 0.1, -0.2, 0.05}, std::nullopt, {1e-11, 50, 30});
  CHECK(s.x_variation() < 1e-12);
  CHECK(s.meta.pde_residual < 1e-11);
  CHECK_FALSE(s.profile);
}

TEST_CASE("2D solve handles modulated data") {
  DurhamData d{0.3, 0.1, -0.2, 0.05};
  d.modulation_eps = 0.05;
  d.modulation_mode = 2;
  const auto s = solve_2d(grid(32, 33), d, std::nullopt, {1e-10, 50, 30});
  CHECK(s.meta.pde_residual < 1e-10);
  CHECK(s.x_variation() > 1e-4);
  CHECK(max_abs(discrete_residual(s.grid, d, s.omega)) < 1e-10);

  // a converged solution is a fixed point
  const auto again = solve_2d(s.grid, d, s.omega, {1e-10, 50, 30});
  CHECK(again.meta.iterations <= 1);
  double diff = 0.0;
  for (std::size_t k = 0; k < s.omega.size(); ++k) diff = std::max(diff, std::abs(again.omega[k] - s.omega[k]));
  CHECK(diff < 1e-12);
}

TEST_CASE("2D solve rejects a mismatched guess") {
  CHECK(error_of([] { (void)solve_2d(grid(8, 17), DurhamData{}, std::vector<double>(5, 0.0)); }) ==
        ErrorCode::validation);
}

TEST_CASE("exact derivative oracle") {
  const auto s = solve_1d(grid(4, 33), DurhamData{0.3, 0.1, -0.2, 0.05}, 1e-12);
  const auto wz = derivative_oracle_1d(s, 1, 0);
  const auto wzb = derivative_oracle_1d(s, 0, 1);
  const auto mixed = derivative_oracle_1d(s, 1, 1);
  for (int j = 0; j < 33; ++j) {
    const std::size_t p = s.grid.index(2, j);
    const double w = s.profile->omega[j], wy = s.profile->omega_y[j];
    CHECK(std::abs(wz[p] - Complex(0.0, -0.5 * wy)) < 1e-15);
    CHECK(std::abs(wzb[p] - Complex(0.0, 0.5 * wy)) < 1e-15);
    CHECK(std::abs(mixed[p] - (std::exp(-2 * w) - std::exp(2 * w)) / 16.0) < 1e-14);
  }
  // w_zz = -(1/4) w_yy = (1/8) sinh(2w)
  const auto wzz = derivative_oracle_1d(s, 2, 0);
  CHECK(std::abs(wzz[s.grid.index(0, 10)] - std::sinh(2 * s.profile->omega[10]) / 8.0) < 1e-14);
  CHECK(error_of([&] { (void)derivative_oracle_1d(s, 0, 0); }) == ErrorCode::validation);

  DurhamData d{0.3, 0.1, -0.2, 0.05};
  d.modulation_eps = 0.05;
  const auto s2 = solve_2d(grid(16, 17), d);
  CHECK(error_of([&] { (void)derivative_oracle_1d(s2, 1, 0); }) == ErrorCode::unsupported);
  CHECK(error_of([&] { (void)derivative_fields(s2, 2, OracleKind::exact_1d); }) == ErrorCode::unsupported);
}

TEST_CASE("finite-difference derivative fields match the oracle") {
  const auto s = solve_1d(grid(8, 129), DurhamData{0.3, 0.1, -0.2, 0.05}, 1e-13);
  const auto fd = derivative_fields(s, 3, OracleKind::finite_difference, 6);
  const auto ex = derivative_fields(s, 3, OracleKind::exact_1d);
  for (int a = 1; a <= 3; ++a) {
    double e = 0.0;
    for (std::size_t p = 0; p < s.grid.size(); ++p) e = std::max(e, std::abs(fd.dz[a][p] - ex.dz[a][p]));
    CHECK(e < 1e-6);
  }
}

TEST_CASE("linearized operator") {
  const auto vac = make_solution(grid(8, 33), DurhamData{0.3, -0.3, 0.0, 0.0}, std::vector<double>(8 * 33, 0.0));
  const auto& g = vac.grid;
  const GridField c(g.size(), Complex(2.0, -1.0));
  const auto Lc = linearized_apply(vac, c);
  for (int j = 0; j < g.ny; ++j) {
    const Complex expect = (j == 0 || j == g.ny - 1) ? Complex(0.0) : Complex(2.0, -1.0);
    CHECK(std::abs(Lc[g.index(3, j)] - expect) < 1e-13);
  }
  GridField e(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) e[g.index(i, j)] = std::exp(Complex(0.0, g.y(j)));
  const auto Le = linearized_apply(vac, e);
  const double h = g.hy();
  const double symbol = 1.0 + (2.0 * std::cos(h) - 2.0) / (h * h);
  for (int j = 1; j + 1 < g.ny; ++j) CHECK(std::abs(Le[g.index(1, j)] - symbol * e[g.index(1, j)]) < 1e-9);
  CHECK(std::abs(symbol) < h * h);

  // Robin coefficient A e^w - B e^{-w} on constants
  const auto up = robin_defect(vac, c, Side::upper);
  for (const auto& v : up) CHECK(std::abs(v + 0.6 * Complex(2.0, -1.0)) < 1e-13);
  for (const auto& v : robin_defect(vac, c, Side::lower)) CHECK(std::abs(v) < 1e-13);
  CHECK(error_of([&] { (void)linearized_apply(vac, GridField(3)); }) == ErrorCode::validation);
}

TEST_CASE("finite-difference weights") {
  const auto d1 = fd_weights(0.0, {-1.0, 0.0, 1.0}, 1);
  CHECK(d1[0] == doctest::Approx(-0.5));
  CHECK(d1[1] == doctest::Approx(0.0));
  CHECK(d1[2] == doctest::Approx(0.5));
  const auto d2 = fd_weights(0.0, {-1.0, 0.0, 1.0}, 2);
  CHECK(d2[0] == doctest::Approx(1.0));
  CHECK(d2[1] == doctest::Approx(-2.0));
  CHECK(d2[2] == doctest::Approx(1.0));
  const auto one_sided = fd_weights(0.0, {0.0, 0.5, 1.0}, 1);
  CHECK(one_sided[0] == doctest::Approx(-3.0));
  CHECK(one_sided[1] == doctest::Approx(4.0));
  CHECK(one_sided[2] == doctest::Approx(-1.0));
  CHECK(error_of([] { (void)fd_weights(0.0, {0.0, 1.0}, 2); }) == ErrorCode::validation);
}

TEST_CASE("solutions round-trip bit for bit") {
  const auto dir = scratch_dir("io");
  const auto s1 = solve_1d(grid(8, 33), DurhamData{0.3, 0.1, -0.2, 0.05}, 1e-12);
  DurhamData d{0.3, 0.1, -0.2, 0.05};
  d.modulation_eps = 0.05;
  const auto s2 = solve_2d(grid(16, 17), d);
  for (const auto& s : {s1, s2})
    for (PayloadFormat f : {PayloadFormat::binary, PayloadFormat::csv}) {
      const std::string stem = (dir / (f == PayloadFormat::binary ? "b" : "c")).string();
      save_solution(s, stem, f);
      CHECK(load_solution(stem) == s);
      CHECK(load_solution(stem + ".json") == s);
    }
  CHECK(error_of([&] { (void)load_solution((dir / "missing").string()); }) == ErrorCode::io);
  {
    std::ofstream bad(dir / "bad.json");
    bad << "{not json";
  }
  CHECK(error_of([&] { (void)load_solution((dir / "bad").string()); }).has_value());
}

TEST_CASE("unsolvable data is reported") {
  // on a thin ribbon the upper defect -T sinh(2p) - 2 cosh(p) stays negative
  const DurhamData d{1.0, 1.0, 0.0, 0.0};
  CHECK(error_of([&] { (void)solve_1d(grid(4, 33, 0.01), d); }) == ErrorCode::no_solution);
}

TEST_CASE("travelling-wave reference satisfies the discrete equation") {
  const sgk::testing::RotatedProfile prof(0.8, std::numbers::pi / 6);
  std::vector<double> r;
  for (int n : {16, 32, 64}) {
    const RibbonGrid g{prof.ribbon_period(), 1.0, n, n + 1};
    const auto w = prof.sample(g);
    auto res = discrete_residual(g, DurhamData{}, w);
    double interior = 0.0;
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) interior = std::max(interior, std::abs(res[g.index(i, j)]));
    r.push_back(interior);
  }
  CHECK(r[0] / r[1] > 3.5);
  CHECK(r[1] / r[2] > 3.5);
}
