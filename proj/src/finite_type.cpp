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

#include "sgk/finite_type.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace sgk {
namespace {

constexpr Complex kI{0.0, 1.0};

GridField add_fields(const GridField& a, const GridField& b, double sign) {
  if (a.empty() || b.empty()) return {};
  GridField out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + sign * b[k];
  return out;
}

GridField scale_field(Complex c, const GridField& a) {
  GridField out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = c * a[k];
  return out;
}

double max_abs(const GridField& f) {
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v));
  return m;
}

Complex mean(const GridField& f) {
  Complex acc = 0.0;
  for (const auto& v : f) acc += v;
  return f.empty() ? Complex(0.0) : acc / static_cast<double>(f.size());
}

// max distance from the first sample: exactly zero on constant fields
double spread(const GridField& f) {
  if (f.empty()) return 0.0;
  const Complex c = f.front();
  double m = 0.0;
  for (const auto& v : f) m = std::max(m, std::abs(v - c));
  return m;
}

// Second-order differences: periodic centred in x, centred in y inside and
// three-point one-sided on the boundary rows.
GridField diff_x2(const RibbonGrid& g, const GridField& f) {
  GridField out(f.size());
  const double s = 1.0 / (2.0 * g.hx());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out[g.index(i, j)] = (f[g.index((i + 1) % g.nx, j)] - f[g.index((i + g.nx - 1) % g.nx, j)]) * s;
  return out;
}

GridField diff_y2(const RibbonGrid& g, const GridField& f) {
  GridField out(f.size());
  const double s = 1.0 / (2.0 * g.hy());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Complex d;
      if (j == 0)
        d = -3.0 * f[g.index(i, 0)] + 4.0 * f[g.index(i, 1)] - f[g.index(i, 2)];
      else if (j == g.ny - 1)
        d = 3.0 * f[g.index(i, j)] - 4.0 * f[g.index(i, j - 1)] + f[g.index(i, j - 2)];
      else
        d = f[g.index(i, j + 1)] - f[g.index(i, j - 1)];
      out[g.index(i, j)] = d * s;
    }
  return out;
}

// d_z = (d_x - i d_y)/2, d_zbar = (d_x + i d_y)/2
std::pair<GridField, GridField> diff_z_zbar(const RibbonGrid& g, const GridField& f) {
  const GridField fx = diff_x2(g, f), fy = diff_y2(g, f);
  GridField dz(f.size()), dzb(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    dz[k] = 0.5 * (fx[k] - kI * fy[k]);
    dzb[k] = 0.5 * (fx[k] + kI * fy[k]);
  }
  return {dz, dzb};
}

struct CompiledField {
  int order = 0;
  std::vector<CompiledPolynomial> u, t, s;
  std::vector<CompiledPolynomial> u_z, u_zb, t_z, t_zb, s_z, s_zb, u_lap;
  int max_order = 1;
};

const CompiledField& compiled_field(int order, bool with_derivatives) {
  static std::mutex mu;
  static std::map<std::pair<int, bool>, CompiledField> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(order, with_derivatives);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const SymbolicKillingField f = ps_recursion(order);
  CompiledField c;
  c.order = order;
  const auto push = [&c](std::vector<CompiledPolynomial>& dst, const DiffPolynomial& p) {
    dst.emplace_back(p);
    const auto [a, b] = dst.back().max_derivative_orders();
    c.max_order = std::max({c.max_order, a, b});
  };
  for (int m = 0; m <= order; ++m) {
    push(c.u, f.u[m]);
    push(c.t, f.t[m]);
    push(c.s, f.s[m]);
    if (!with_derivatives) continue;
    const DiffPolynomial uz = dp_differentiate(f.u[m], Direction::z);
    push(c.u_z, uz);
    push(c.u_zb, dp_differentiate(f.u[m], Direction::zbar));
    push(c.t_z, dp_differentiate(f.t[m], Direction::z));
    push(c.t_zb, dp_differentiate(f.t[m], Direction::zbar));
    push(c.s_z, dp_differentiate(f.s[m], Direction::z));
    push(c.s_zb, dp_differentiate(f.s[m], Direction::zbar));
    push(c.u_lap, Rational(4) * dp_differentiate(uz, Direction::zbar));
  }
  return cache.emplace(key, std::move(c)).first->second;
}

FieldContext unit_context(const FieldContext& ctx) {
  FieldContext c = ctx;
  c.gamma = 1.0;
  return c;
}

const std::vector<double>& omega_of(const FieldContext& ctx) {
  if (!ctx.solution) throw Error(ErrorCode::validation, "field context has no solution");
  return ctx.solution->omega;
}

struct Matrices {
  CMat2 phi, tilde;
};

// Coefficient m of a gamma = 1 series at one point, transported to gamma,
// together with its conjugate-transpose partner.
Matrices point_matrices(const CoefficientField& c, std::size_t p, double ew, int m, Complex gamma) {
  const Complex u = c.u[p], t = c.t[p], s = c.s[p];
  const Complex gm = std::pow(gamma, -m), gm1 = std::pow(gamma, -m - 1), gp1 = std::pow(gamma, -m + 1);
  Matrices out;
  out.phi = {gm * u, gm1 * ew * t, gp1 * ew * s, -gm * u};
  out.tilde = {gm * std::conj(u), gp1 * ew * std::conj(s), gm1 * ew * std::conj(t), -gm * std::conj(u)};
  return out;
}

LaurentSeries<CMat2> k_series(const KMatrix& km, Complex gamma) {
  const double A = km.A, B = km.B;
  std::vector<CMat2> c{{0.0, -gamma, -gamma, -4.0 * B},
                       {4.0 * A * gamma, 0.0, 0.0, 4.0 * A / gamma},
                       {-4.0 * B, 1.0 / gamma, 1.0 / gamma, 0.0}};
  return LaurentSeries<CMat2>(-1, std::move(c), Order::infinity(), CMat2{});
}

// Highest order m whose neighbours m - 1, m + 1 are both known.
std::pair<int, int> checkable_orders(const KillingSeries& f) {
  const int lo = f.first() - 1;
  int hi = f.last() + 1;
  if (!f.is_exact()) hi = std::min(hi, f.truncation_order().value() - 2);
  return {lo, hi};
}

int row_of(const RibbonGrid& g, Side side) { return side == Side::upper ? g.ny - 1 : 0; }

Eigen::VectorXd stacked(const GridField& f) {
  Eigen::VectorXd v(2 * static_cast<Eigen::Index>(f.size()));
  for (std::size_t k = 0; k < f.size(); ++k) {
    v[static_cast<Eigen::Index>(2 * k)] = f[k].real();
    v[static_cast<Eigen::Index>(2 * k + 1)] = f[k].imag();
  }
  return v;
}

// det coefficients of a series over orders [lo, hi] at every point
std::map<int, GridField> det_fields(const KillingSeries& f, const std::vector<double>& omega, int lo, int hi) {
  std::map<int, GridField> out;
  const std::size_t n = omega.size();
  std::vector<double> e2w(n);
  for (std::size_t p = 0; p < n; ++p) e2w[p] = std::exp(2.0 * omega[p]);
  const int a0 = f.is_zero() ? 0 : f.first();
  for (int order = lo; order <= hi; ++order) {
    GridField d(n, Complex(0.0));
    for (int a = a0; order - a >= a0; ++a) {
      const int b = order - a;
      if (!f.is_known(a) || !f.is_known(b)) throw Error(ErrorCode::unsupported, "determinant order beyond truncation");
      const CoefficientField ca = f.coeff(a), cb = f.coeff(b);
      for (std::size_t p = 0; p < n; ++p) d[p] += -ca.u[p] * cb.u[p] - e2w[p] * ca.s[p] * cb.t[p];
    }
    out[order] = std::move(d);
  }
  return out;
}

}  // namespace

CoefficientField operator+(const CoefficientField& a, const CoefficientField& b) {
  CoefficientField c;
  c.u = add_fields(a.u, b.u, 1.0);
  c.t = add_fields(a.t, b.t, 1.0);
  c.s = add_fields(a.s, b.s, 1.0);
  if (a.has_derivatives() && b.has_derivatives()) {
    c.u_z = add_fields(a.u_z, b.u_z, 1.0);
    c.u_zb = add_fields(a.u_zb, b.u_zb, 1.0);
    c.t_z = add_fields(a.t_z, b.t_z, 1.0);
    c.t_zb = add_fields(a.t_zb, b.t_zb, 1.0);
    c.s_z = add_fields(a.s_z, b.s_z, 1.0);
    c.s_zb = add_fields(a.s_zb, b.s_zb, 1.0);
    c.u_lap = add_fields(a.u_lap, b.u_lap, 1.0);
  }
  return c;
}

CoefficientField operator-(const CoefficientField& a) { return Complex(-1.0) * a; }

CoefficientField operator-(const CoefficientField& a, const CoefficientField& b) { return a + (-b); }

CoefficientField operator*(Complex k, const CoefficientField& a) {
  CoefficientField c;
  c.u = scale_field(k, a.u);
  c.t = scale_field(k, a.t);
  c.s = scale_field(k, a.s);
  if (a.has_derivatives()) {
    c.u_z = scale_field(k, a.u_z);
    c.u_zb = scale_field(k, a.u_zb);
    c.t_z = scale_field(k, a.t_z);
    c.t_zb = scale_field(k, a.t_zb);
    c.s_z = scale_field(k, a.s_z);
    c.s_zb = scale_field(k, a.s_zb);
    c.u_lap = scale_field(k, a.u_lap);
  }
  return c;
}

CoefficientField RingTraits<CoefficientField>::zero_like(const CoefficientField& a) { return Complex(0.0) * a; }

bool RingTraits<CoefficientField>::is_zero(const CoefficientField& a) {
  const auto zero = [](const GridField& f) {
    return std::all_of(f.begin(), f.end(), [](const Complex& v) { return v == Complex(0.0); });
  };
  return zero(a.u) && zero(a.t) && zero(a.s) && zero(a.u_z) && zero(a.u_zb) && zero(a.t_z) && zero(a.t_zb) &&
         zero(a.s_z) && zero(a.s_zb) && zero(a.u_lap);
}

bool RingTraits<CoefficientField>::compatible(const CoefficientField& a, const CoefficientField& b) {
  return a.u.size() == b.u.size();
}

KillingSeries multiply(const LaurentSeries<Complex>& h, const KillingSeries& phi) { return ls_mul(h, phi); }

KillingSample eval_killing(std::shared_ptr<const RibbonSolution> sol, int order, Complex gamma,
                           const EvalOptions& opts) {
  if (!sol) throw Error(ErrorCode::validation, "no solution given");
  if (order < 0) throw Error(ErrorCode::validation, "recursion order must be >= 0");
  if (gamma == 0.0) throw Error(ErrorCode::parameter_domain, "gamma must be nonzero");
  const auto& g = sol->grid;
  const CompiledField& cf = compiled_field(order, opts.with_derivatives);
  const int n = cf.max_order;

  KillingSample ks;
  ks.order = order;
  ks.gamma = gamma;
  if (opts.oracle == OracleKind::finite_difference) {
    if (n + opts.fd_accuracy > std::min(g.nx, g.ny))
      ks.warnings.push_back("derivative order " + std::to_string(n) + " exceeds the stencil reliability of a " +
                            std::to_string(g.nx) + "x" + std::to_string(g.ny) + " grid");
    else if (n > 4)
      ks.warnings.push_back("finite-difference derivatives up to order " + std::to_string(n) +
                            " carry amplified rounding error");
  }
  const DerivativeFields df = derivative_fields(*sol, n, opts.oracle, opts.fd_accuracy);
  ks.context.solution = sol;
  ks.context.gamma = gamma;
  ks.context.oracle = opts.oracle;
  ks.context.w_z = df.dz[1];
  ks.context.w_zb = df.dzb[1];

  // Exact-chain fields are x-independent: evaluate one column and copy.
  const bool one_column = opts.oracle == OracleKind::exact_1d;
  const int ncol = one_column ? 1 : g.nx;
  const std::size_t N = g.size();
  std::vector<CoefficientField> coeffs(static_cast<std::size_t>(order + 1));
  for (auto& c : coeffs) {
    c.u.assign(N, 0.0);
    c.t.assign(N, 0.0);
    c.s.assign(N, 0.0);
    if (opts.with_derivatives)
      for (GridField* f : {&c.u_z, &c.u_zb, &c.t_z, &c.t_zb, &c.s_z, &c.s_zb, &c.u_lap}) f->assign(N, 0.0);
  }
  std::vector<Complex> dz(static_cast<std::size_t>(n + 1)), dzb(static_cast<std::size_t>(n + 1));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < ncol; ++i) {
      const std::size_t p = g.index(i, j);
      for (int a = 1; a <= n; ++a) {
        dz[a] = df.dz[a][p];
        dzb[a] = df.dzb[a][p];
      }
      const double ew = std::exp(sol->omega[p]);
      for (int m = 0; m <= order; ++m) {
        auto& c = coeffs[static_cast<std::size_t>(m)];
        const auto ev = [&](const CompiledPolynomial& q) { return q.evaluate(gamma, ew, dz.data(), dzb.data()); };
        const std::size_t mm = static_cast<std::size_t>(m);
        c.u[p] = ev(cf.u[mm]);
        c.t[p] = ev(cf.t[mm]);
        c.s[p] = ev(cf.s[mm]);
        if (opts.with_derivatives) {
          c.u_z[p] = ev(cf.u_z[mm]);
          c.u_zb[p] = ev(cf.u_zb[mm]);
          c.t_z[p] = ev(cf.t_z[mm]);
          c.t_zb[p] = ev(cf.t_zb[mm]);
          c.s_z[p] = ev(cf.s_z[mm]);
          c.s_zb[p] = ev(cf.s_zb[mm]);
          c.u_lap[p] = ev(cf.u_lap[mm]);
        }
      }
    }
  if (one_column)
    for (auto& c : coeffs)
      for (GridField* f : {&c.u, &c.t, &c.s, &c.u_z, &c.u_zb, &c.t_z, &c.t_zb, &c.s_z, &c.s_zb, &c.u_lap}) {
        if (f->empty()) continue;
        for (int j = 0; j < g.ny; ++j)
          for (int i = 1; i < g.nx; ++i) (*f)[g.index(i, j)] = (*f)[g.index(0, j)];
      }

  for (const auto& c : coeffs)
    for (const GridField* f : {&c.u, &c.t, &c.s})
      for (const auto& v : *f)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw Error(ErrorCode::conditioning, "Killing coefficients overflowed on the grid");

  const CoefficientField zero = RingTraits<CoefficientField>::zero_like(coeffs.front());
  ks.phi = KillingSeries(0, std::move(coeffs), Order(order + 1), zero);
  return ks;
}

KillingSeries unit_gamma_series(const KillingSample& ks) {
  if (ks.gamma == Complex(1.0)) return ks.phi;
  std::vector<CoefficientField> out;
  const int first = ks.phi.is_zero() ? 0 : ks.phi.first();
  for (std::size_t idx = 0; idx < ks.phi.coefficients().size(); ++idx) {
    const int m = first + static_cast<int>(idx);
    const auto& c = ks.phi.coefficients()[idx];
    const Complex gu = std::pow(ks.gamma, m), gt = std::pow(ks.gamma, m + 1), gs = std::pow(ks.gamma, m - 1);
    CoefficientField d;
    d.u = scale_field(gu, c.u);
    d.t = scale_field(gt, c.t);
    d.s = scale_field(gs, c.s);
    if (c.has_derivatives()) {
      d.u_z = scale_field(gu, c.u_z);
      d.u_zb = scale_field(gu, c.u_zb);
      d.u_lap = scale_field(gu, c.u_lap);
      d.t_z = scale_field(gt, c.t_z);
      d.t_zb = scale_field(gt, c.t_zb);
      d.s_z = scale_field(gs, c.s_z);
      d.s_zb = scale_field(gs, c.s_zb);
    }
    out.push_back(std::move(d));
  }
  return KillingSeries(first, std::move(out), ks.phi.truncation_order(), ks.phi.zero());
}

ResidualTable killing_residual(const KillingSeries& f, const FieldContext& ctx, DerivativeMethod method) {
  ResidualTable table;
  if (f.is_zero()) return table;
  const auto& omega = omega_of(ctx);
  const auto& g = ctx.solution->grid;
  const Complex gamma = ctx.gamma;
  const auto [lo, hi] = checkable_orders(f);

  struct Derivs {
    GridField u_z, u_zb, t_z, t_zb, s_z, s_zb;
  };
  std::map<int, Derivs> cache;
  const auto derivs = [&](int m) -> const Derivs& {
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    const CoefficientField c = f.coeff(m);
    Derivs d;
    if (method == DerivativeMethod::exact) {
      if (!c.has_derivatives())
        throw Error(ErrorCode::unsupported, "exact residuals need coefficient derivatives; use finite differences");
      d = {c.u_z, c.u_zb, c.t_z, c.t_zb, c.s_z, c.s_zb};
    } else {
      std::tie(d.u_z, d.u_zb) = diff_z_zbar(g, c.u);
      std::tie(d.t_z, d.t_zb) = diff_z_zbar(g, c.t);
      std::tie(d.s_z, d.s_zb) = diff_z_zbar(g, c.s);
    }
    return cache.emplace(m, std::move(d)).first->second;
  };

  for (int m = lo; m <= hi; ++m) {
    const CoefficientField cm = f.coeff(m), cp = f.coeff(m + 1), cl = f.coeff(m - 1);
    const Derivs& d = derivs(m);
    std::vector<double> eq(6, 0.0);
    for (std::size_t p = 0; p < omega.size(); ++p) {
      const double ew = std::exp(omega[p]), emw = 1.0 / ew, e2w = ew * ew;
      const Complex r[6] = {
          4.0 * d.u_z[p] + kI * e2w * cp.s[p] - kI * gamma * cm.t[p],
          4.0 * d.u_zb[p] + kI / gamma * cm.s[p] - kI * e2w * cl.t[p],
          4.0 * ctx.w_z[p] * cm.t[p] + 2.0 * d.t_z[p] - kI * cp.u[p],
          2.0 * ew * d.t_zb[p] - kI / gamma * emw * cm.u[p],
          2.0 * ew * d.s_z[p] + kI * gamma * emw * cm.u[p],
          4.0 * ctx.w_zb[p] * cm.s[p] + 2.0 * d.s_zb[p] + kI * cl.u[p],
      };
      for (int e = 0; e < 6; ++e) eq[static_cast<std::size_t>(e)] = std::max(eq[static_cast<std::size_t>(e)], std::abs(r[e]));
    }
    table.max = std::max(table.max, *std::max_element(eq.begin(), eq.end()));
    table.per_order[m] = std::move(eq);
  }
  return table;
}

ResidualTable killing_residual(const KillingSample& ks, DerivativeMethod method) {
  return killing_residual(ks.phi, ks.context, method);
}

DetReport det_constancy(const KillingSample& ks) {
  DetReport r;
  const auto& omega = omega_of(ks.context);
  const auto dets = det_fields(ks.phi, omega, 0, ks.order);
  for (const auto& [order, d] : dets) {
    const Complex expected = order == 1 ? -1.0 / (4.0 * ks.gamma) : Complex(0.0);
    const double var = spread(d);
    r.per_order_variation.push_back(var);
    r.variation = std::max(r.variation, var);
    for (const auto& v : d) r.deviation = std::max(r.deviation, std::abs(v - expected));
    if (order == 1) r.normalization = std::abs(mean(d) - expected);
  }
  return r;
}

SklyaninReport sklyanin_residual(const KillingSeries& unit_gamma, const FieldContext& ctx, Side side,
                                 const KMatrix& km, const std::vector<Complex>& lambda_samples) {
  SklyaninReport rep;
  rep.per_sample.assign(lambda_samples.size(), 0.0);
  if (unit_gamma.is_zero()) return rep;
  const auto& omega = omega_of(ctx);
  const auto& g = ctx.solution->grid;
  const int j = row_of(g, side);
  const Complex gamma = ctx.gamma;
  const auto K = k_series(km, gamma);
  const int first = unit_gamma.first();
  const int last = unit_gamma.is_exact() ? unit_gamma.last() : unit_gamma.truncation_order().value() - 1;
  std::vector<CoefficientField> cs;
  for (int m = first; m <= last; ++m) cs.push_back(unit_gamma.coeff(m));
  for (int i = 0; i < g.nx; ++i) {
    const std::size_t p = g.index(i, j);
    const double ew = std::exp(omega[p]);
    std::vector<CMat2> phi, tilde;
    for (int m = first; m <= last; ++m) {
      const auto mats = point_matrices(cs[static_cast<std::size_t>(m - first)], p, ew, m, gamma);
      phi.push_back(mats.phi);
      tilde.push_back(mats.tilde);
    }
    const LaurentSeries<CMat2> P(first, phi, unit_gamma.truncation_order(), CMat2{});
    const LaurentSeries<CMat2> Pt(first, tilde, unit_gamma.truncation_order(), CMat2{});
    const auto R = ls_mul(K, P) - ls_mul(Pt, K);
    if (!R.is_zero())
      for (int k = R.first(); k <= R.last(); ++k) rep.per_order[k] = std::max(rep.per_order[k], max_norm(R.coeff(k)));
    for (std::size_t s = 0; s < lambda_samples.size(); ++s) {
      const double v = max_norm(ls_evaluate(R, lambda_samples[s]));
      rep.per_sample[s] = std::max(rep.per_sample[s], v);
      rep.max = std::max(rep.max, v);
    }
  }
  return rep;
}

std::array<SklyaninReport, 2> sklyanin_field_residual(const KillingSample& ks, const KMatrix& km_upper,
                                                      const KMatrix& km_lower,
                                                      const std::vector<Complex>& lambda_samples) {
  const auto samples =
      lambda_samples.empty() ? default_lambda_samples({km_upper, km_lower}, ks.gamma) : lambda_samples;
  const KillingSeries unit = unit_gamma_series(ks);
  return {sklyanin_residual(unit, ks.context, Side::lower, km_lower, samples),
          sklyanin_residual(unit, ks.context, Side::upper, km_upper, samples)};
}

std::array<SklyaninReport, 2> sklyanin_field_residual(const KillingSample& ks,
                                                      const std::vector<Complex>& lambda_samples) {
  const auto& d = ks.context.solution->durham;
  return sklyanin_field_residual(ks, d.k_matrix(Side::upper), d.k_matrix(Side::lower), lambda_samples);
}

CoefficientBoundaryReport coefficient_boundary_residuals(const KillingSample& ks, Side side, const KMatrix& km) {
  CoefficientBoundaryReport rep;
  const auto& omega = omega_of(ks.context);
  const auto& g = ks.context.solution->grid;
  const KillingSeries unit = unit_gamma_series(ks);
  const int M = ks.order;
  const int j = row_of(g, side);
  const double A = km.A, B = km.B;
  const int n_lo = -M - 3, n_hi = 3;

  std::vector<CoefficientField> cs;
  for (int m = 0; m <= M; ++m) cs.push_back(unit.coeff(m));
  const auto at = [&cs](int m) -> const CoefficientField& {
    if (m >= static_cast<int>(cs.size())) throw Error(ErrorCode::unsupported, "bivariate order beyond the sample");
    return cs[static_cast<std::size_t>(m)];
  };
  for (const char* name : {"bc1", "bc2", "bc3", "bc4", "bcp1", "bcp2"}) rep.max[name] = 0.0;
  for (int i = 0; i < g.nx; ++i) {
    const std::size_t p = g.index(i, j);
    const double ew = std::exp(omega[p]);
    // bivariate coefficients: u at (m,-m), t at (m,-m-1), s at (m,-m+1)
    const auto U = [&](int m, int n) -> Complex {
      if (m < 0 || n != -m) return 0.0;
      return at(m).u[p];
    };
    const auto T = [&](int m, int n) -> Complex {
      if (m < 0 || n != -m - 1) return 0.0;
      return at(m).t[p];
    };
    const auto S = [&](int m, int n) -> Complex {
      if (m < 0 || n != -m + 1) return 0.0;
      return at(m).s[p];
    };
    const auto BC1 = [&](int m, int n) {
      return std::imag(ew * S(m - 1, n + 1) - ew * S(m + 1, n - 1) + 4.0 * A * U(m, n - 1) - 4.0 * B * U(m - 1, n));
    };
    const auto BC2 = [&](int m, int n) {
      return std::imag(ew * T(m - 1, n + 1) - ew * T(m + 1, n - 1) - 4.0 * A * U(m, n + 1) + 4.0 * B * U(m + 1, n));
    };
    const auto BC3 = [&](int m, int n) {
      return std::real(2.0 * A * ew * T(m, n - 1) - 2.0 * B * ew * T(m - 1, n) - 2.0 * A * ew * S(m, n + 1) +
                       2.0 * B * ew * S(m + 1, n) - U(m - 1, n + 1) + U(m + 1, n - 1));
    };
    const auto BC4 = [&](int m, int n) {
      return std::imag(ew * (A * T(m, n - 1) - B * T(m - 1, n) + A * S(m, n + 1) - B * S(m + 1, n)));
    };
    const auto BCP1 = [&](int m, int n) {
      return std::imag(ew * T(m - 1, n) - 4.0 * A * U(m, n) + ew * S(m + 1, n));
    };
    const auto BCP2 = [&](int m, int n) {
      return std::imag(ew * T(m, n - 1) - 4.0 * B * U(m, n) + ew * S(m, n + 1));
    };
    // alpha(m,n) = Im e^w s_{m,n} - Im(4A u_{m-1,n} - 4B u_{m-2,n+1} + ...), rebuilt from bc1 alone
    const auto alpha_tel = [&](int m, int n) {
      double acc = 0.0;
      for (int mm = m - 1, nn = n + 1; mm >= -1; mm -= 2, nn += 2) acc -= BC1(mm, nn);
      return acc;
    };
    const auto beta_tel = [&](int m, int n) {
      double acc = 0.0;
      for (int mm = m - 1, nn = n + 1; mm >= -1; mm -= 2, nn += 2) acc -= BC2(mm, nn);
      return acc;
    };
    const auto record = [&](const char* name, int m, int n, double v) {
      double& slot = rep.tables[name][{m, n}];
      slot = std::max(slot, std::abs(v));
      rep.max[name] = std::max(rep.max[name], std::abs(v));
    };
    for (int m = -1; m <= M - 1; ++m)
      for (int n = n_lo; n <= n_hi; ++n) {
        record("bc1", m, n, BC1(m, n));
        record("bc2", m, n, BC2(m, n));
        record("bc3", m, n, BC3(m, n));
        record("bc4", m, n, BC4(m, n));
        const double bcp1 = BCP1(m, n), bcp2 = BCP2(m, n);
        record("bcp1", m, n, bcp1);
        record("bcp2", m, n, bcp2);
        rep.telescoping_gap = std::max(rep.telescoping_gap, std::abs(bcp1 - (alpha_tel(m + 1, n) + beta_tel(m - 1, n))));
        rep.telescoping_gap = std::max(rep.telescoping_gap, std::abs(bcp2 - (alpha_tel(m, n + 1) + beta_tel(m, n - 1))));
      }
  }
  return rep;
}

CoefficientBoundaryReport coefficient_boundary_residuals(const KillingSample& ks, Side side) {
  return coefficient_boundary_residuals(ks, side, ks.context.solution->durham.k_matrix(side));
}

std::vector<Complex> robin_im_defect(const KillingSample& ks, int m, Side side, DerivativeMethod method) {
  if (m < 1 || m > ks.order) throw Error(ErrorCode::validation, "Robin check needs 1 <= m <= order");
  const auto& sol = *ks.context.solution;
  const auto& g = sol.grid;
  const Complex gm = std::pow(ks.gamma, m);
  const CoefficientField c = ks.phi.coeff(m);
  GridField v(g.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = std::imag(gm * c.u[p]);
  if (method == DerivativeMethod::finite_difference) return robin_defect(sol, v, side);
  if (!c.has_derivatives()) throw Error(ErrorCode::unsupported, "exact Robin check needs coefficient derivatives");
  const int j = row_of(g, side);
  std::vector<Complex> out(static_cast<std::size_t>(g.nx));
  for (int i = 0; i < g.nx; ++i) {
    const std::size_t p = g.index(i, j);
    // d_y = i (d_z - d_zbar)
    const double vy = std::imag(gm * kI * (c.u_z[p] - c.u_zb[p]));
    const double w = sol.omega[p];
    const double coef = sol.durham.A_at(side, g.x(i), g.period_L) * std::exp(w) - sol.durham.B(side) * std::exp(-w);
    out[static_cast<std::size_t>(i)] = vy - coef * v[p].real();
  }
  return out;
}

RobinReport robin_im_residual(const KillingSample& ks, Side side, DerivativeMethod method) {
  RobinReport rep;
  for (int m = 1; m <= ks.order; ++m) {
    const CoefficientField c = ks.phi.coeff(m);
    const Complex gm = std::pow(ks.gamma, m);
    double im = 0.0, full = 0.0;
    for (const auto& v : c.u) {
      im = std::max(im, std::abs(std::imag(gm * v)));
      full = std::max(full, std::abs(v));
    }
    const bool trivial = im <= 1e-13 * std::max(1.0, full);
    double d = 0.0;
    for (const auto& v : robin_im_defect(ks, m, side, method)) d = std::max(d, std::abs(v));
    rep.per_order[m] = d;
    rep.trivial_order[m] = trivial;
    rep.trivial = rep.trivial && trivial;
    rep.max = std::max(rep.max, d);
  }
  return rep;
}

ResidualTable linsg_residual(const KillingSample& ks, DerivativeMethod method) {
  ResidualTable table;
  const auto& sol = *ks.context.solution;
  for (int m = 1; m <= ks.order; ++m) {
    const CoefficientField c = ks.phi.coeff(m);
    double r = 0.0;
    if (method == DerivativeMethod::finite_difference) {
      r = max_abs(linearized_apply(sol, c.u));
    } else {
      if (!c.has_derivatives()) throw Error(ErrorCode::unsupported, "exact check needs coefficient derivatives");
      for (std::size_t p = 0; p < c.u.size(); ++p)
        r = std::max(r, std::abs(c.u_lap[p] + std::cosh(2.0 * sol.omega[p]) * c.u[p]));
    }
    table.per_order[m] = {r};
    table.max = std::max(table.max, r);
  }
  return table;
}

RankResult rank_of_rows(const std::vector<GridField>& rows, double threshold) {
  RankResult res;
  res.rows = static_cast<int>(rows.size());
  double scale = 0.0;
  for (const auto& r : rows) scale = std::max(scale, max_abs(r));
  const double zero_tol = 1e-12 * std::max(1.0, scale);

  std::vector<Eigen::VectorXd> normalized;
  for (const auto& r : rows) {
    if (max_abs(r) <= zero_tol) break;
    Eigen::VectorXd v = stacked(r);
    v /= v.norm();
    normalized.push_back(std::move(v));
    Eigen::MatrixXd Mx(normalized.front().size(), static_cast<Eigen::Index>(normalized.size()));
    for (std::size_t k = 0; k < normalized.size(); ++k) Mx.col(static_cast<Eigen::Index>(k)) = normalized[k];
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Mx);
    const auto& sv = svd.singularValues();
    res.relative_singular_values.assign(sv.data(), sv.data() + sv.size());
    for (auto& s : res.relative_singular_values) s /= sv[0];
    if (sv[sv.size() - 1] / sv[0] < threshold) {
      normalized.pop_back();
      break;
    }
  }
  res.rank = static_cast<int>(normalized.size());
  res.full = res.rank == res.rows;
  return res;
}

RankResult rank_detect(const KillingSample& ks, double threshold) {
  std::vector<GridField> rows;
  for (int m = 1; m <= ks.order; ++m) rows.push_back(ks.phi.coeff(m).u);
  return rank_of_rows(rows, threshold);
}

namespace {

// det coefficients of an exact polynomial field against -lambda h^2 / 4 at gamma = 1
double det_deviation(const KillingSeries& P, const std::vector<double>& omega, const std::vector<double>& h) {
  if (P.is_zero()) return 0.0;
  // orders whose expectation only uses known h
  const int lo = 2 * P.first(), hi = std::min(2 * P.last(), static_cast<int>(h.size()));
  double dev = 0.0;
  for (const auto& [order, d] : det_fields(P, omega, lo, hi)) {
    double expected = 0.0;
    for (int a = 0; a < static_cast<int>(h.size()); ++a) {
      const int b = order - 1 - a;
      if (b >= 0 && b < static_cast<int>(h.size())) expected += -0.25 * h[static_cast<std::size_t>(a)] * h[static_cast<std::size_t>(b)];
    }
    for (const auto& v : d) dev = std::max(dev, std::abs(v - expected));
  }
  return dev;
}

double entry_norm(const CoefficientField& c) { return std::max({max_abs(c.u), max_abs(c.t), max_abs(c.s)}); }

void run_suite(Certificate& cert, const KillingSeries& P, const KillingSample& ks, const FieldContext& ctx1,
               const std::vector<double>& h_for_det, const ReduceOptions& opts) {
  const auto method = ks.context.oracle == OracleKind::exact_1d && !P.is_zero() && P.coefficients().front().has_derivatives()
                          ? DerivativeMethod::exact
                          : DerivativeMethod::finite_difference;
  cert.killing_residual = killing_residual(P, ctx1, method).max;
  const auto& d = ks.context.solution->durham;
  const auto samples = opts.lambda_samples.empty()
                           ? default_lambda_samples({d.k_matrix(Side::upper), d.k_matrix(Side::lower)}, 1.0)
                           : opts.lambda_samples;
  cert.sklyanin_residual = {sklyanin_residual(P, ctx1, Side::lower, d.k_matrix(Side::lower), samples).max,
                            sklyanin_residual(P, ctx1, Side::upper, d.k_matrix(Side::upper), samples).max};
  cert.det_residual = det_deviation(P, ks.context.solution->omega, h_for_det);
}

std::pair<Order, Order> series_bidegree(const KillingSeries& P) {
  if (P.is_zero()) return {Order::infinity(), Order::infinity()};
  return {Order(P.first()), Order(P.last())};
}

}  // namespace

Certificate polynomial_reduce(const KillingSample& ks, int rank, const ReduceOptions& opts) {
  Certificate cert;
  const int M = ks.order;
  const int k = rank + 1;
  cert.detected_rank = rank;
  cert.degree = k;
  if (rank < 0) throw Error(ErrorCode::validation, "rank must be >= 0");
  if (k > M - 1) {
    cert.reason = "rank " + std::to_string(rank) + " leaves no order above " + std::to_string(k) +
                  " to verify the tail; raise the recursion order";
    return cert;
  }
  const KillingSeries phi = unit_gamma_series(ks);
  const FieldContext ctx1 = unit_context(ks.context);

  // real least squares: u_k + sum_j f_j u_{k-j} = 0
  std::vector<double> f{1.0};
  if (rank > 0) {
    const Eigen::VectorXd b = -stacked(phi.coeff(k).u);
    Eigen::MatrixXd Amat(b.size(), rank);
    for (int jj = 1; jj <= rank; ++jj) Amat.col(jj - 1) = stacked(phi.coeff(k - jj).u);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Amat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    cert.condition_number = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
    if (!(cert.condition_number <= opts.max_condition)) {
      std::ostringstream os;
      os << "dependence solve is ill-conditioned (condition number " << cert.condition_number << ")";
      cert.reason = os.str();
      return cert;
    }
    const Eigen::VectorXd x = svd.solve(b);
    for (int jj = 0; jj < rank; ++jj) f.push_back(x[jj]);
    cert.dependence_residual = (Amat * x - b).lpNorm<Eigen::Infinity>() / std::max(1.0, b.lpNorm<Eigen::Infinity>());
  } else {
    cert.condition_number = 1.0;
  }
  cert.f = f;
  cert.reduction_poly = LaurentPolynomial<double>(0, f);

  std::vector<Complex> hc(f.begin(), f.end());
  KillingSeries psi = multiply(LaurentSeries<Complex>(0, hc), phi);
  const Complex t0 = mean(phi.coeff(0).t);
  // order-by-order correction of the constant t-parts from order k on
  for (int j = k; j <= M; ++j) {
    const Complex c = mean(psi.coeff(j).t);
    const Complex hj = -c / t0;
    cert.h_tail.push_back(hj);
    if (hj != Complex(0.0)) psi = psi + multiply(LaurentSeries<Complex>::monomial(hj, j), phi);
  }

  CoefficientField top = psi.coeff(k);
  cert.tail_norms[k] = std::max(max_abs(top.u), max_abs(top.t));
  for (int j = k + 1; j <= std::min(M, k + opts.tail_window); ++j) cert.tail_norms[j] = entry_norm(psi.coeff(j));

  std::vector<CoefficientField> pc;
  for (int m = 0; m < k; ++m) pc.push_back(psi.coeff(m));
  for (GridField* fld : {&top.u, &top.t, &top.u_z, &top.u_zb, &top.t_z, &top.t_zb, &top.u_lap})
    std::fill(fld->begin(), fld->end(), Complex(0.0));
  pc.push_back(top);
  const CoefficientField zero = phi.zero();
  cert.polynomial_field = KillingSeries(0, std::move(pc), Order::infinity(), zero);
  cert.field_bidegree = series_bidegree(cert.polynomial_field);

  // det P = -lambda h^2 / 4 with h = f + corrections; h^2 is needed through order 2k - 1
  std::vector<double> h_full = f;
  for (const auto& h : cert.h_tail) h_full.push_back(h.real());
  h_full.resize(static_cast<std::size_t>(std::min(static_cast<int>(h_full.size()), 2 * k)));
  run_suite(cert, cert.polynomial_field, ks, ctx1, h_full, opts);

  double worst_tail = 0.0;
  for (const auto& [j, v] : cert.tail_norms) worst_tail = std::max(worst_tail, v);
  double worst_imag = 0.0;
  for (const auto& h : cert.h_tail) worst_imag = std::max(worst_imag, std::abs(h.imag() * t0));
  std::ostringstream why;
  if (worst_tail > opts.tol) why << "tail norm " << worst_tail << " above " << opts.tol << "; ";
  if (worst_imag > opts.tol) why << "non-real correction " << worst_imag << " (exceptional case); ";
  if (cert.killing_residual > opts.tol) why << "Killing residual " << cert.killing_residual << "; ";
  if (std::max(cert.sklyanin_residual[0], cert.sklyanin_residual[1]) > opts.tol)
    why << "Sklyanin residual " << std::max(cert.sklyanin_residual[0], cert.sklyanin_residual[1]) << "; ";
  if (cert.det_residual > opts.tol) why << "determinant residual " << cert.det_residual << "; ";
  cert.reason = why.str();
  if (cert.reason.empty()) {
    cert.verdict = "certified";
  } else {
    cert.reason.resize(cert.reason.size() - 2);
  }
  return cert;
}

FactorRecovery recover_factor(const KillingSeries& psi, const KillingSample& ks) {
  FactorRecovery out;
  const KillingSeries& phi = ks.phi;
  const Complex t0 = mean(phi.coeff(0).t);
  const int first = psi.is_zero() ? 0 : psi.first();
  const int last = std::min(psi.is_exact() ? psi.last() + ks.order : psi.truncation_order().value() - 1,
                            first + ks.order);
  std::vector<Complex> f;
  KillingSeries rest = psi;
  for (int j = first; j <= last; ++j) {
    const Complex fj = mean(rest.coeff(j).t) / t0;
    f.push_back(fj);
    if (fj != Complex(0.0)) rest = rest - multiply(LaurentSeries<Complex>::monomial(fj, j), phi);
  }
  out.f = LaurentSeries<Complex>(first, std::move(f), Order(last + 1));
  for (int j = first; j <= last; ++j) {
    const CoefficientField c = rest.coeff(j);
    out.u_defect = std::max(out.u_defect, max_abs(c.u));
    out.s_defect = std::max(out.s_defect, max_abs(c.s));
    out.t_variation = std::max(out.t_variation, spread(c.t));
  }
  return out;
}

Certificate exceptional_reduce(const KillingSeries& psi, const KillingSample& ks, int k, const ReduceOptions& opts) {
  if (!psi.is_known(k) || k < 1) throw Error(ErrorCode::not_applicable, "order k is not available in the field");
  const CoefficientField ck = psi.coeff(k);
  const double scale = std::max(1.0, entry_norm(psi.coeff(0)));
  const Complex tk = mean(ck.t);
  if (max_abs(ck.u) > opts.tol * scale || spread(ck.t) > opts.tol * scale || std::abs(tk.imag()) <= opts.tol * scale)
    throw Error(ErrorCode::not_applicable, "exceptional construction needs u_k = 0 and a non-real constant t_k");

  Certificate cert;
  cert.exceptional = true;
  cert.degree = k;
  const KillingSeries phi = unit_gamma_series(ks);
  const FieldContext ctx1 = unit_context(ks.context);
  const int M = ks.order;
  const Complex t0 = mean(phi.coeff(0).t);

  // psi - h phi is a polynomial of degree k once h removes every constant t-part from order k on
  std::vector<Complex> h;
  KillingSeries P = psi;
  const int top = std::min(M, psi.is_exact() ? M : psi.truncation_order().value() - 1);
  for (int j = k; j <= top; ++j) {
    const Complex hj = mean(P.coeff(j).t) / t0;
    h.push_back(hj);
    if (hj != Complex(0.0)) P = P - multiply(LaurentSeries<Complex>::monomial(hj, j), phi);
  }
  std::vector<Complex> gcoef;
  for (const auto& v : h) gcoef.push_back(v.imag());
  const LaurentSeries<Complex> gser(k, gcoef, Order(top + 1));
  for (int j = k; j <= top; ++j) cert.h_tail.push_back(h[static_cast<std::size_t>(j - k)]);

  // Q = K P - conj(P)^t K along each boundary
  const auto& d = ks.context.solution->durham;
  const auto samples = opts.lambda_samples.empty()
                           ? default_lambda_samples({d.k_matrix(Side::upper), d.k_matrix(Side::lower)}, 1.0)
                           : opts.lambda_samples;
  const auto Qup = sklyanin_residual(P, ctx1, Side::upper, d.k_matrix(Side::upper), samples);
  double qmax = 0.0;
  for (const auto& [ord, v] : Qup.per_order) qmax = std::max(qmax, v);
  int qlo = 0, qhi = -1;
  for (const auto& [ord, v] : Qup.per_order)
    if (v > opts.tol * std::max(1.0, qmax)) {
      if (qhi < qlo) qlo = ord;
      qhi = ord;
    }
  if (qhi >= qlo) cert.q_bidegree = {Order(qlo), Order(qhi)};

  // lambda^{2-k} D(lambda, 1) g with D from the upper boundary
  const double A = d.A_plus, B = d.B_plus;
  const LaurentSeries<Complex> D(-2, {-1.0, -16.0 * A * B, 16.0 * (A * A + B * B) + 2.0, -16.0 * A * B, -1.0});
  const auto rp = ls_shift(ls_mul(D, gser), 2 - k);
  std::vector<double> rc;
  double rmax = 0.0;
  for (const auto& c : rp.coefficients()) rmax = std::max(rmax, std::abs(c));
  const int rfirst = rp.is_zero() ? 0 : rp.first();
  for (int j = rfirst; j <= (rp.is_zero() ? -1 : rp.last()); ++j) {
    const double v = rp.coeff(j).real();
    if (j > 4) {
      cert.tail_norms[j] = std::abs(v);
      continue;
    }
    rc.push_back(std::abs(v) > opts.tol * std::max(1.0, rmax) ? v : 0.0);
  }
  cert.reduction_poly = LaurentPolynomial<double>(rfirst, rc);
  cert.f = rc;

  std::vector<Complex> rcc(rc.begin(), rc.end());
  const KillingSeries cand = multiply(LaurentSeries<Complex>(rfirst, rcc), phi);
  cert.polynomial_field = cand;
  cert.field_bidegree = series_bidegree(cand);
  cert.killing_residual = killing_residual(cand, ctx1,
                                           ks.context.oracle == OracleKind::exact_1d && !cand.is_zero() &&
                                                   cand.coefficients().front().has_derivatives()
                                               ? DerivativeMethod::exact
                                               : DerivativeMethod::finite_difference)
                              .max;
  cert.sklyanin_residual = {sklyanin_residual(cand, ctx1, Side::lower, d.k_matrix(Side::lower), samples).max,
                            sklyanin_residual(cand, ctx1, Side::upper, d.k_matrix(Side::upper), samples).max};

  double worst_tail = 0.0;
  for (const auto& [j, v] : cert.tail_norms) worst_tail = std::max(worst_tail, v);
  std::ostringstream why;
  // the lambda^4 coefficient is known only when top >= k + 4
  if (!rp.is_known(4)) why << "order " << M << " too small for k = " << k << ", need " << k + 4 << "; ";
  if (worst_tail > opts.tol) why << "reduction tail " << worst_tail << "; ";
  if (cert.killing_residual > opts.tol) why << "Killing residual " << cert.killing_residual << "; ";
  if (std::max(cert.sklyanin_residual[0], cert.sklyanin_residual[1]) > opts.tol)
    why << "Sklyanin residual " << std::max(cert.sklyanin_residual[0], cert.sklyanin_residual[1]) << "; ";
  cert.reason = why.str();
  if (cert.reason.empty())
    cert.verdict = "certified";
  else
    cert.reason.resize(cert.reason.size() - 2);
  return cert;
}

double zero_curvature_residual(const RibbonSolution& sol, Complex lambda, Complex gamma, int fd_accuracy) {
  const auto& g = sol.grid;
  const DerivativeFields df = derivative_fields(sol, 1, OracleKind::finite_difference, fd_accuracy);
  std::array<GridField, 4> az, azb;
  for (auto& f : az) f.resize(g.size());
  for (auto& f : azb) f.resize(g.size());
  std::vector<LaxPair> pairs(g.size());
  for (std::size_t p = 0; p < g.size(); ++p) {
    const LaxPair lp = lax_connection({sol.omega[p], df.dz[1][p], df.dzb[1][p], lambda, gamma});
    pairs[p] = lp;
    az[0][p] = lp.alpha_z.a11;
    az[1][p] = lp.alpha_z.a12;
    az[2][p] = lp.alpha_z.a21;
    az[3][p] = lp.alpha_z.a22;
    azb[0][p] = lp.alpha_zbar.a11;
    azb[1][p] = lp.alpha_zbar.a12;
    azb[2][p] = lp.alpha_zbar.a21;
    azb[3][p] = lp.alpha_zbar.a22;
  }
  std::array<GridField, 4> dzb_az, dz_azb;
  for (int e = 0; e < 4; ++e) {
    dzb_az[static_cast<std::size_t>(e)] = diff_z_zbar(g, az[static_cast<std::size_t>(e)]).second;
    dz_azb[static_cast<std::size_t>(e)] = diff_z_zbar(g, azb[static_cast<std::size_t>(e)]).first;
  }
  double r = 0.0;
  for (std::size_t p = 0; p < g.size(); ++p) {
    const CMat2 a = {dzb_az[0][p], dzb_az[1][p], dzb_az[2][p], dzb_az[3][p]};
    const CMat2 b = {dz_azb[0][p], dz_azb[1][p], dz_azb[2][p], dz_azb[3][p]};
    const CMat2& z = pairs[p].alpha_z;
    const CMat2& zb = pairs[p].alpha_zbar;
    r = std::max(r, max_norm(a - b + (zb * z - z * zb)));
  }
  return r;
}

}  // namespace sgk
