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

// Killing fields evaluated on solved ribbons: residual suites, boundary
// checks and the reduction to a polynomial Killing field.
//
// A Killing series is a lambda-series whose coefficient m is the grid matrix
//   [[u_m, e^w t_m], [e^w s_m, -u_m]]
// stored as the three scalar fields (u, t, s) together with their first
// z / zbar derivatives when those are known exactly.

#ifndef SGK_FINITE_TYPE_HPP
#define SGK_FINITE_TYPE_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sgk/diff_algebra.hpp"
#include "sgk/lax.hpp"
#include "sgk/ribbon.hpp"
#include "sgk/series.hpp"

namespace sgk {

struct CoefficientField {
  GridField u, t, s;
  // exact first derivatives and 4 u_{z zbar}; empty when unknown
  GridField u_z, u_zb, t_z, t_zb, s_z, s_zb, u_lap;

  bool has_derivatives() const { return !u_z.empty(); }
  std::size_t size() const { return u.size(); }

  friend CoefficientField operator+(const CoefficientField& a, const CoefficientField& b);
  friend CoefficientField operator-(const CoefficientField& a, const CoefficientField& b);
  friend CoefficientField operator-(const CoefficientField& a);
  friend CoefficientField operator*(Complex c, const CoefficientField& a);
};

template <>
struct RingTraits<CoefficientField> {
  static CoefficientField zero_like(const CoefficientField& a);
  static bool is_zero(const CoefficientField& a);
  static bool compatible(const CoefficientField& a, const CoefficientField& b);
};

using KillingSeries = LaurentSeries<CoefficientField>;

// Point data shared by every residual: w, e^w, w_z, w_zbar on the grid.
struct FieldContext {
  std::shared_ptr<const RibbonSolution> solution;
  Complex gamma = 1.0;
  GridField w_z, w_zb;
  OracleKind oracle = OracleKind::exact_1d;
};

struct KillingSample {
  int order = 0;
  Complex gamma = 1.0;
  FieldContext context;
  KillingSeries phi;  // coefficients 0..order at the sample's gamma
  std::vector<std::string> warnings;
};

struct EvalOptions {
  OracleKind oracle = OracleKind::exact_1d;
  int fd_accuracy = 6;
  bool with_derivatives = true;  // symbolic first derivatives of every coefficient
};

KillingSample eval_killing(std::shared_ptr<const RibbonSolution> sol, int order, Complex gamma,
                           const EvalOptions& opts = {});

// Same series at gamma = 1 (coefficients rescaled by the gamma-homogeneity of
// the recursion: u_m ~ gamma^{-m}, t_m ~ gamma^{-m-1}, s_m ~ gamma^{1-m}).
KillingSeries unit_gamma_series(const KillingSample& ks);

enum class DerivativeMethod { exact, finite_difference };

struct ResidualTable {
  double max = 0.0;
  std::map<int, std::vector<double>> per_order;  // m -> per-equation maxima
};

// Defects of the six first-order structure equations at every checkable order.
ResidualTable killing_residual(const KillingSeries& f, const FieldContext& ctx, DerivativeMethod method);
ResidualTable killing_residual(const KillingSample& ks, DerivativeMethod method = DerivativeMethod::exact);

struct DetReport {
  double variation = 0.0;      // max over orders of the grid spread of det coefficients
  double normalization = 0.0;  // |mean order-1 coefficient + 1/(4 gamma)|
  double deviation = 0.0;      // max over orders and points of |det_m - expected_m|
  std::vector<double> per_order_variation;
};
DetReport det_constancy(const KillingSample& ks);

struct SklyaninReport {
  double max = 0.0;
  std::vector<double> per_sample;
  std::map<int, double> per_order;  // max entry of the coefficient of lambda^k
};

// K P - conj(P(conj lambda))^t K on one boundary line, P given at gamma = 1
// and transported to the sample gamma.
SklyaninReport sklyanin_residual(const KillingSeries& unit_gamma, const FieldContext& ctx, Side side,
                                 const KMatrix& km, const std::vector<Complex>& lambda_samples);
// {lower, upper}; the default K-matrices come from the sample's Durham data
// and the default samples are the D-filtered 8th roots of unity.
std::array<SklyaninReport, 2> sklyanin_field_residual(const KillingSample& ks, const KMatrix& km_upper,
                                                      const KMatrix& km_lower,
                                                      const std::vector<Complex>& lambda_samples = {});
std::array<SklyaninReport, 2> sklyanin_field_residual(const KillingSample& ks,
                                                      const std::vector<Complex>& lambda_samples = {});

// Boundary equations on the bivariate coefficients (u_{m,n}, t_{m,n}, s_{m,n}):
// bc1..bc4 are the entries of K Phi - conj(Phi)^t K, bcp1 and bcp2 the
// two-equation system they telescope into.
struct CoefficientBoundaryReport {
  // equation name -> ((m, n) -> max defect along the line)
  std::map<std::string, std::map<std::pair<int, int>, double>> tables;
  std::map<std::string, double> max;
  double telescoping_gap = 0.0;  // |bcp defect - telescoped bc1/bc2 combination|
};
CoefficientBoundaryReport coefficient_boundary_residuals(const KillingSample& ks, Side side, const KMatrix& km);
CoefficientBoundaryReport coefficient_boundary_residuals(const KillingSample& ks, Side side);

struct RobinReport {
  double max = 0.0;
  bool trivial = true;  // every Im u_{m,n} vanished on the grid
  std::map<int, double> per_order;
  std::map<int, bool> trivial_order;
};
RobinReport robin_im_residual(const KillingSample& ks, Side side, DerivativeMethod method);

ResidualTable linsg_residual(const KillingSample& ks, DerivativeMethod method);

// Boundary samples of the Robin defect field for Im u_m (m >= 1).
std::vector<Complex> robin_im_defect(const KillingSample& ks, int m, Side side, DerivativeMethod method);

struct RankResult {
  int rank = 0;  // number of leading independent rows
  int rows = 0;
  bool full = false;
  std::vector<double> relative_singular_values;
};

// Rows u_1..u_order (real and imaginary parts stacked, each row normalized).
RankResult rank_detect(const KillingSample& ks, double threshold = 1e-6);
RankResult rank_of_rows(const std::vector<GridField>& rows, double threshold = 1e-6);

struct ReduceOptions {
  double tol = 1e-6;
  double max_condition = 1e10;
  int tail_window = 4;
  std::vector<Complex> lambda_samples;  // default: 8th roots of unity, D-filtered
};

struct Certificate {
  std::string verdict = "inconclusive";
  std::string reason;
  int detected_rank = 0;
  int degree = 0;  // k = rank + 1
  std::vector<double> f;  // f_0 = 1, ..., f_rank
  LaurentPolynomial<double> reduction_poly;
  std::vector<Complex> h_tail;  // corrections h_j, j >= k, removing constant t-parts
  std::map<int, double> tail_norms;  // order -> max |entry| of the reduced field
  double condition_number = 0.0;
  double dependence_residual = 0.0;
  double killing_residual = 0.0;
  std::array<double, 2> sklyanin_residual{0.0, 0.0};
  double det_residual = 0.0;
  std::pair<Order, Order> field_bidegree{Order::infinity(), Order::infinity()};
  bool exceptional = false;
  std::pair<Order, Order> q_bidegree{Order::infinity(), Order::infinity()};  // exceptional path only
  std::string sign_convention = "t_0 = 1/(2 gamma)";
  KillingSeries polynomial_field;
};

Certificate polynomial_reduce(const KillingSample& ks, int rank, const ReduceOptions& opts = {});

// Requires u_k ~ 0 and a non-real constant t_k in psi; throws
// ErrorCode::not_applicable otherwise.
Certificate exceptional_reduce(const KillingSeries& psi, const KillingSample& ks, int k,
                               const ReduceOptions& opts = {});

// The Laurent series f with psi = f phi, built order by order from the
// constant t-parts; defects record how far the vanishing conditions hold.
struct FactorRecovery {
  LaurentSeries<Complex> f;
  double u_defect = 0.0;
  double s_defect = 0.0;
  double t_variation = 0.0;
};
FactorRecovery recover_factor(const KillingSeries& psi, const KillingSample& ks);

// h * phi for a scalar Laurent series h (module action of series_core).
KillingSeries multiply(const LaurentSeries<Complex>& h, const KillingSeries& phi);

// d_zbar a_z - d_z a_zbar + [a_zbar, a_z] with second-order differences of
// the connection fields; max entry over the grid.
double zero_curvature_residual(const RibbonSolution& sol, Complex lambda, Complex gamma, int fd_accuracy = 6);

// FNV-1a digest (hex) of the grid, boundary data, samples of w and the run
// parameters.
std::string inputs_hash(const RibbonSolution& sol, int order, Complex gamma);

std::string to_json(const Certificate& c, const std::string& inputs_hash, const RibbonGrid& grid);

}  // namespace sgk

#endif  // SGK_FINITE_TYPE_HPP
