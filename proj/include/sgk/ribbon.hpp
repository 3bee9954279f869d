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

// Elliptic sinh-Gordon  Δw + (1/2) sinh(2w) = 0  on the ribbon R x [-T, T],
// periodic in x, with  w_y = A e^w + B e^{-w}  on each boundary line.

#ifndef SGK_RIBBON_HPP
#define SGK_RIBBON_HPP

#include <array>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sgk/lax.hpp"

namespace sgk {

using GridField = std::vector<Complex>;

struct RibbonGrid {
  double period_L = 2.0 * std::numbers::pi;
  double half_width_T = 1.0;
  int nx = 64;
  int ny = 129;

  double hx() const { return period_L / nx; }
  double hy() const { return 2.0 * half_width_T / (ny - 1); }
  double x(int i) const { return i * hx(); }
  double y(int j) const { return -half_width_T + j * hy(); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
  }
  void validate() const;

  friend bool operator==(const RibbonGrid&, const RibbonGrid&) = default;
};

enum class Side { lower, upper };

struct DurhamData {
  double A_plus = 0.0, B_plus = 0.0;    // y = +T
  double A_minus = 0.0, B_minus = 0.0;  // y = -T
  // Robustness runs only: A_plus(x) = A_plus * (1 + eps cos(2 pi mode x / L)).
  double modulation_eps = 0.0;
  int modulation_mode = 1;

  static DurhamData free_boundary(double r) { return {1.0 / r, 0.0, -1.0 / r, 0.0}; }

  double A(Side s) const { return s == Side::upper ? A_plus : A_minus; }
  double B(Side s) const { return s == Side::upper ? B_plus : B_minus; }
  double A_at(Side s, double x, double L) const;
  KMatrix k_matrix(Side s) const { return {A(s), B(s)}; }
  bool is_modulated() const { return modulation_eps != 0.0; }

  friend bool operator==(const DurhamData&, const DurhamData&) = default;
};

// x-independent profile sampled on the grid rows, with the exact slope.
struct Profile1d {
  std::vector<double> omega;
  std::vector<double> omega_y;

  friend bool operator==(const Profile1d&, const Profile1d&) = default;
};

struct SolverMeta {
  std::string solver;  // "shooting", "newton", "given"
  double tol = 0.0;
  int iterations = 0;
  std::vector<double> residual_history;
  double quadratic_order = 0.0;  // log-ratio estimate from the last three residuals
  double shooting_parameter = 0.0;  // w(-T) for the 1D solver
  double energy_drift = 0.0;
  double pde_residual = 0.0;
  double durham_residual_lower = 0.0;
  double durham_residual_upper = 0.0;

  friend bool operator==(const SolverMeta&, const SolverMeta&) = default;
};

struct RibbonSolution {
  RibbonGrid grid;
  DurhamData durham;
  std::vector<double> omega;  // row-major, index j * nx + i
  std::optional<Profile1d> profile;
  SolverMeta meta;

  double at(int i, int j) const { return omega[grid.index(i, j)]; }
  // max over rows of the spread in x
  double x_variation() const;

  friend bool operator==(const RibbonSolution&, const RibbonSolution&) = default;
};

// Wraps a sampled field; residual fields of meta are filled in.
RibbonSolution make_solution(const RibbonGrid& grid, const DurhamData& durham, std::vector<double> omega,
                             std::optional<Profile1d> profile = std::nullopt);

// Integrates w'' = -(1/2) sinh(2w) from (s0, w0, w0') and returns (w, w') at
// each requested abscissa (sorted ascending, all >= s0).
std::vector<std::array<double, 2>> integrate_profile(double w0, double w0_prime, double s0,
                                                     const std::vector<double>& s_out, double tol = 1e-13);

// Shooting in w(-T) with Newton steps and a bisection fallback.
RibbonSolution solve_1d(const RibbonGrid& grid, const DurhamData& durham, double tol = 1e-10);

struct Newton2dOptions {
  double tol = 1e-8;
  int max_iterations = 50;
  int max_halvings = 30;
};

// Damped Newton on the discrete system. The guess defaults to the embedded
// 1D profile.
RibbonSolution solve_2d(const RibbonGrid& grid, const DurhamData& durham,
                        const std::optional<std::vector<double>>& initial_guess = std::nullopt,
                        const Newton2dOptions& opts = {});

// Discrete residual fields: interior 5-point equation and one-sided boundary rows.
std::vector<double> discrete_residual(const RibbonGrid& grid, const DurhamData& durham,
                                      const std::vector<double>& omega);
double pde_residual(const RibbonSolution& sol);
std::array<double, 2> durham_residual(const RibbonSolution& sol);  // {lower, upper}
// Same, using the stored exact slope of a 1D profile instead of differencing.
std::array<double, 2> profile_durham_residual(const RibbonSolution& sol);

// Energy E = w_y^2/2 + cosh(2w)/4 along a 1D profile: max |E - E(-T)|.
double energy_drift(const Profile1d& p);

GridField linearized_apply(const RibbonSolution& sol, const GridField& u);
std::vector<Complex> robin_defect(const RibbonSolution& sol, const GridField& u, Side side);

enum class OracleKind { exact_1d, finite_difference };

// d_z^a w and d_zbar^b w for a, b = 1..max_order (index 0 unused).
struct DerivativeFields {
  OracleKind kind = OracleKind::exact_1d;
  int max_order = 0;
  int fd_accuracy = 0;
  std::vector<GridField> dz, dzb;
};

DerivativeFields derivative_fields(const RibbonSolution& sol, int max_order, OracleKind kind,
                                   int fd_accuracy = 6);

// d_z^a d_zbar^b w from the exact 1D chain; mixed requests are reduced
// through the equation first.
GridField derivative_oracle_1d(const RibbonSolution& sol, int a, int b);

// Solution files: <stem>.json header plus <stem>.bin (float64, little endian)
// or <stem>.csv payload holding w row by row, then the profile rows if any.
enum class PayloadFormat { binary, csv };
void save_solution(const RibbonSolution& sol, const std::string& stem, PayloadFormat format = PayloadFormat::binary);
// Accepts the stem or the path of the .json header.
RibbonSolution load_solution(const std::string& path);

// Finite-difference weights (Fornberg) for the q-th derivative at x0 from nodes.
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int q);

}  // namespace sgk

#endif  // SGK_RIBBON_HPP
