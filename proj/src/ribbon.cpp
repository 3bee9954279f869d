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

#include "sgk/ribbon.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "sgk/diff_algebra.hpp"

namespace sgk {
namespace {

namespace odeint = boost::numeric::odeint;

using State2 = std::array<double, 2>;
using State4 = std::array<double, 4>;

bool all_finite(const State4& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

// w, w', and the variation v = dw/dp, v'.
struct ShootingSystem {
  void operator()(const State4& s, State4& ds, double /*y*/) const {
    ds[0] = s[1];
    ds[1] = -0.5 * std::sinh(2.0 * s[0]);
    ds[2] = s[3];
    ds[3] = -std::cosh(2.0 * s[0]) * s[2];
  }
};

struct ProfileSystem {
  void operator()(const State2& s, State2& ds, double /*y*/) const {
    ds[0] = s[1];
    ds[1] = -0.5 * std::sinh(2.0 * s[0]);
  }
};

struct ShotResult {
  double F = 0.0;
  double dF = 0.0;
  State4 end{};
};

ShotResult shoot(double p, const DurhamData& d, double T, double tol) {
  State4 s{p, d.A_minus * std::exp(p) + d.B_minus * std::exp(-p), 1.0,
           d.A_minus * std::exp(p) - d.B_minus * std::exp(-p)};
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State4>());
  try {
    odeint::integrate_adaptive(stepper, ShootingSystem{}, s, -T, T, 1e-3);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::stiffness, std::string("integrator step failure: ") + e.what());
  }
  if (!all_finite(s)) throw Error(ErrorCode::stiffness, "integrator produced non-finite values");
  ShotResult r;
  r.end = s;
  const double ep = std::exp(s[0]), em = std::exp(-s[0]);
  r.F = s[1] - d.A_plus * ep - d.B_plus * em;
  r.dF = s[3] - (d.A_plus * ep - d.B_plus * em) * s[2];
  return r;
}

double energy(double w, double wy) { return 0.5 * wy * wy + 0.25 * std::cosh(2.0 * w); }

// Residuals below this sit at the rounding floor of the 1/h^2-scaled interior
// rows and say nothing about the convergence order.
constexpr double kResidualFloor = 1e-12;

double quadratic_order_estimate(std::vector<double> h) {
  while (!h.empty() && h.back() < kResidualFloor) h.pop_back();
  if (h.size() < 3) return 0.0;
  const double r0 = h[h.size() - 3], r1 = h[h.size() - 2], r2 = h[h.size() - 1];
  if (!(r0 > 0 && r1 > 0 && r2 > 0) || r1 >= r0) return 0.0;
  return std::log(r2 / r1) / std::log(r1 / r0);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// nodes: n points around index j on [0, count), clamped to the range
std::pair<int, int> stencil_window(int j, int n, int count) {
  n = std::min(n, count);
  int start = j - (n - 1) / 2;
  start = std::clamp(start, 0, count - n);
  return {start, n};
}

}  // namespace

void RibbonGrid::validate() const {
  std::vector<std::string> bad;
  if (!(period_L > 0.0) || !std::isfinite(period_L)) bad.emplace_back("period_L");
  if (!(half_width_T > 0.0) || !std::isfinite(half_width_T)) bad.emplace_back("half_width_T");
  if (nx < 4) bad.emplace_back("grid_nx (>= 4)");
  if (ny < 5) bad.emplace_back("grid_ny (>= 5)");
  if (!bad.empty()) {
    std::string msg = "invalid grid:";
    for (const auto& b : bad) msg += " " + b;
    throw Error(ErrorCode::validation, msg);
  }
}

double DurhamData::A_at(Side s, double x, double L) const {
  if (s == Side::upper && modulation_eps != 0.0)
    return A_plus * (1.0 + modulation_eps * std::cos(2.0 * std::numbers::pi * modulation_mode * x / L));
  return A(s);
}

double RibbonSolution::x_variation() const {
  double v = 0.0;
  for (int j = 0; j < grid.ny; ++j) {
    double lo = at(0, j), hi = lo;
    for (int i = 1; i < grid.nx; ++i) {
      lo = std::min(lo, at(i, j));
      hi = std::max(hi, at(i, j));
    }
    v = std::max(v, hi - lo);
  }
  return v;
}

std::vector<double> discrete_residual(const RibbonGrid& g, const DurhamData& d, const std::vector<double>& w) {
  g.validate();
  if (w.size() != g.size()) throw Error(ErrorCode::validation, "field size does not match the grid");
  std::vector<double> r(g.size(), 0.0);
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy()), i2hy = 1.0 / (2.0 * g.hy());
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int ip = (i + 1) % g.nx, im = (i + g.nx - 1) % g.nx;
      const double c = w[g.index(i, j)];
      r[g.index(i, j)] = (w[g.index(ip, j)] - 2.0 * c + w[g.index(im, j)]) * ihx2 +
                         (w[g.index(i, j + 1)] - 2.0 * c + w[g.index(i, j - 1)]) * ihy2 + 0.5 * std::sinh(2.0 * c);
    }
  const int top = g.ny - 1;
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    const double wt = w[g.index(i, top)];
    r[g.index(i, top)] = (3.0 * wt - 4.0 * w[g.index(i, top - 1)] + w[g.index(i, top - 2)]) * i2hy -
                         d.A_at(Side::upper, x, g.period_L) * std::exp(wt) - d.B_plus * std::exp(-wt);
    const double wb = w[g.index(i, 0)];
    r[g.index(i, 0)] = (-3.0 * wb + 4.0 * w[g.index(i, 1)] - w[g.index(i, 2)]) * i2hy -
                       d.A_at(Side::lower, x, g.period_L) * std::exp(wb) - d.B_minus * std::exp(-wb);
  }
  return r;
}

double pde_residual(const RibbonSolution& sol) {
  const auto r = discrete_residual(sol.grid, sol.durham, sol.omega);
  double m = 0.0;
  for (int j = 1; j < sol.grid.ny - 1; ++j)
    for (int i = 0; i < sol.grid.nx; ++i) m = std::max(m, std::abs(r[sol.grid.index(i, j)]));
  return m;
}

std::array<double, 2> durham_residual(const RibbonSolution& sol) {
  const auto r = discrete_residual(sol.grid, sol.durham, sol.omega);
  std::array<double, 2> out{0.0, 0.0};
  for (int i = 0; i < sol.grid.nx; ++i) {
    out[0] = std::max(out[0], std::abs(r[sol.grid.index(i, 0)]));
    out[1] = std::max(out[1], std::abs(r[sol.grid.index(i, sol.grid.ny - 1)]));
  }
  return out;
}

std::array<double, 2> profile_durham_residual(const RibbonSolution& sol) {
  if (!sol.profile) throw Error(ErrorCode::unsupported, "solution carries no 1D profile");
  const auto& p = *sol.profile;
  const auto defect = [&](Side s, std::size_t j) {
    return std::abs(p.omega_y[j] - sol.durham.A(s) * std::exp(p.omega[j]) - sol.durham.B(s) * std::exp(-p.omega[j]));
  };
  return {defect(Side::lower, 0), defect(Side::upper, p.omega.size() - 1)};
}

double energy_drift(const Profile1d& p) {
  if (p.omega.empty()) return 0.0;
  const double e0 = energy(p.omega[0], p.omega_y[0]);
  double drift = 0.0;
  for (std::size_t j = 0; j < p.omega.size(); ++j) drift = std::max(drift, std::abs(energy(p.omega[j], p.omega_y[j]) - e0));
  return drift;
}

RibbonSolution make_solution(const RibbonGrid& grid, const DurhamData& durham, std::vector<double> omega,
                             std::optional<Profile1d> profile) {
  grid.validate();
  if (omega.size() != grid.size()) throw Error(ErrorCode::validation, "field size does not match the grid");
  if (profile && (profile->omega.size() != static_cast<std::size_t>(grid.ny) ||
                  profile->omega_y.size() != static_cast<std::size_t>(grid.ny)))
    throw Error(ErrorCode::validation, "profile size does not match the grid rows");
  RibbonSolution sol{grid, durham, std::move(omega), std::move(profile), {}};
  sol.meta.solver = "given";
  sol.meta.pde_residual = pde_residual(sol);
  const auto dr = durham_residual(sol);
  sol.meta.durham_residual_lower = dr[0];
  sol.meta.durham_residual_upper = dr[1];
  if (sol.profile) sol.meta.energy_drift = energy_drift(*sol.profile);
  return sol;
}

std::vector<State2> integrate_profile(double w0, double w0_prime, double s0, const std::vector<double>& s_out,
                                      double tol) {
  std::vector<State2> out;
  out.reserve(s_out.size());
  if (s_out.empty()) return out;
  if (!std::is_sorted(s_out.begin(), s_out.end()) || s_out.front() < s0)
    throw Error(ErrorCode::validation, "profile abscissae must be sorted and start at or after s0");
  std::vector<double> times;
  times.reserve(s_out.size() + 1);
  const bool prepend = s_out.front() > s0;
  if (prepend) times.push_back(s0);
  times.insert(times.end(), s_out.begin(), s_out.end());
  State2 s{w0, w0_prime};
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State2>());
  bool skip = prepend;
  try {
    odeint::integrate_times(stepper, ProfileSystem{}, s, times.begin(), times.end(), 1e-3,
                            [&](const State2& st, double) {
                              if (skip) {
                                skip = false;
                                return;
                              }
                              out.push_back(st);
                            });
  } catch (const std::exception& e) {
    throw Error(ErrorCode::stiffness, std::string("integrator step failure: ") + e.what());
  }
  for (const auto& st : out)
    if (!std::isfinite(st[0]) || !std::isfinite(st[1]))
      throw Error(ErrorCode::stiffness, "integrator produced non-finite values");
  return out;
}

RibbonSolution solve_1d(const RibbonGrid& grid, const DurhamData& durham, double tol) {
  grid.validate();
  if (!(tol > 0.0)) throw Error(ErrorCode::validation, "tolerance must be positive");
  const double T = grid.half_width_T;
  const double itol = 1e-13;

  std::vector<double> history;
  double p = 0.0;
  bool converged = false;
  // Newton from w(-T) = 0
  for (int it = 0; it < 60; ++it) {
    const ShotResult r = shoot(p, durham, T, itol);
    history.push_back(std::abs(r.F));
    if (std::abs(r.F) < tol) {
      converged = true;
      break;
    }
    if (r.dF == 0.0 || !std::isfinite(r.dF)) break;
    double step = -r.F / r.dF;
    if (std::abs(step) > 1.0) step = std::copysign(1.0, step);
    p += step;
    if (!std::isfinite(p) || std::abs(p) > 20.0) break;
  }

  if (!converged) {
    // bracket scan on [-4, 4] followed by bisection
    const double lo = -4.0, hi = 4.0;
    const int n = 160;
    double a = lo, fa = shoot(a, durham, T, itol).F;
    bool found = false;
    double b = a, fb = fa;
    for (int k = 1; k <= n && !found; ++k) {
      b = lo + (hi - lo) * k / n;
      fb = shoot(b, durham, T, itol).F;
      if (fa == 0.0 || fa * fb <= 0.0) {
        found = true;
      } else {
        a = b;
        fa = fb;
      }
    }
    if (!found) {
      std::ostringstream os;
      os << "no sign change of the upper Durham defect for w(-T) in [" << lo << ", " << hi << "]";
      throw Error(ErrorCode::no_solution, os.str());
    }
    for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
      const double m = 0.5 * (a + b);
      const double fm = shoot(m, durham, T, itol).F;
      history.push_back(std::abs(fm));
      if (std::abs(fm) < tol) {
        a = b = m;
        break;
      }
      if (fa * fm <= 0.0) {
        b = m;
      } else {
        a = m;
        fa = fm;
      }
    }
    p = 0.5 * (a + b);
  }

  // polish: a few Newton steps while the defect keeps shrinking
  ShotResult best = shoot(p, durham, T, itol);
  for (int it = 0; it < 4 && best.dF != 0.0; ++it) {
    const double q = p - best.F / best.dF;
    const ShotResult r = shoot(q, durham, T, itol);
    if (!(std::abs(r.F) < std::abs(best.F))) break;
    p = q;
    best = r;
    history.push_back(std::abs(r.F));
  }
  if (!(std::abs(best.F) < tol)) {
    std::ostringstream os;
    os << "shooting stalled at defect " << std::abs(best.F) << " (tol " << tol << ")";
    throw Error(ErrorCode::diverged, os.str());
  }

  std::vector<double> ys(static_cast<std::size_t>(grid.ny));
  for (int j = 0; j < grid.ny; ++j) ys[static_cast<std::size_t>(j)] = grid.y(j);
  ys.back() = T;
  const double wy0 = durham.A_minus * std::exp(p) + durham.B_minus * std::exp(-p);
  const auto states = integrate_profile(p, wy0, -T, ys, itol);

  Profile1d prof;
  for (const auto& st : states) {
    prof.omega.push_back(st[0]);
    prof.omega_y.push_back(st[1]);
  }
  std::vector<double> omega(grid.size());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) omega[grid.index(i, j)] = prof.omega[static_cast<std::size_t>(j)];

  RibbonSolution sol = make_solution(grid, durham, std::move(omega), std::move(prof));
  sol.meta.solver = "shooting";
  sol.meta.tol = tol;
  sol.meta.iterations = static_cast<int>(history.size());
  sol.meta.residual_history = history;
  sol.meta.shooting_parameter = p;
  return sol;
}

RibbonSolution solve_2d(const RibbonGrid& grid, const DurhamData& durham,
                        const std::optional<std::vector<double>>& initial_guess, const Newton2dOptions& opts) {
  grid.validate();
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::validation, "tolerance must be positive");
  std::vector<double> w;
  if (initial_guess) {
    if (initial_guess->size() != grid.size()) throw Error(ErrorCode::validation, "initial guess size mismatch");
    w = *initial_guess;
  } else {
    DurhamData mean = durham;
    mean.modulation_eps = 0.0;
    w = solve_1d(grid, mean, std::min(1e-10, opts.tol)).omega;
  }

  const int N = static_cast<int>(grid.size());
  const double ihx2 = 1.0 / (grid.hx() * grid.hx()), ihy2 = 1.0 / (grid.hy() * grid.hy());
  const double i2hy = 1.0 / (2.0 * grid.hy());
  const int top = grid.ny - 1;

  const auto jacobian = [&](const std::vector<double>& v) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * 5);
    for (int j = 1; j < top; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        const int row = static_cast<int>(grid.index(i, j));
        trip.emplace_back(row, row, -2.0 * ihx2 - 2.0 * ihy2 + std::cosh(2.0 * v[grid.index(i, j)]));
        trip.emplace_back(row, static_cast<int>(grid.index((i + 1) % grid.nx, j)), ihx2);
        trip.emplace_back(row, static_cast<int>(grid.index((i + grid.nx - 1) % grid.nx, j)), ihx2);
        trip.emplace_back(row, static_cast<int>(grid.index(i, j + 1)), ihy2);
        trip.emplace_back(row, static_cast<int>(grid.index(i, j - 1)), ihy2);
      }
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i);
      const int rt = static_cast<int>(grid.index(i, top));
      const double wt = v[grid.index(i, top)];
      trip.emplace_back(rt, rt, 3.0 * i2hy - durham.A_at(Side::upper, x, grid.period_L) * std::exp(wt) +
                                    durham.B_plus * std::exp(-wt));
      trip.emplace_back(rt, static_cast<int>(grid.index(i, top - 1)), -4.0 * i2hy);
      trip.emplace_back(rt, static_cast<int>(grid.index(i, top - 2)), i2hy);
      const int rb = static_cast<int>(grid.index(i, 0));
      const double wb = v[grid.index(i, 0)];
      trip.emplace_back(rb, rb, -3.0 * i2hy - durham.A_minus * std::exp(wb) + durham.B_minus * std::exp(-wb));
      trip.emplace_back(rb, static_cast<int>(grid.index(i, 1)), 4.0 * i2hy);
      trip.emplace_back(rb, static_cast<int>(grid.index(i, 2)), -i2hy);
    }
    Eigen::SparseMatrix<double> J(N, N);
    J.setFromTriplets(trip.begin(), trip.end());
    J.makeCompressed();
    return J;
  };

  std::vector<double> history;
  std::vector<double> r = discrete_residual(grid, durham, w);
  double rn = max_abs(r);
  history.push_back(rn);
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  while (rn >= opts.tol) {
    if (static_cast<int>(history.size()) > opts.max_iterations) {
      std::ostringstream os;
      os << "Newton did not reach tol " << opts.tol << "; residual history:";
      for (double h : history) os << " " << h;
      throw Error(ErrorCode::diverged, os.str());
    }
    const auto J = jacobian(w);
    if (!analyzed) {
      lu.analyzePattern(J);
      analyzed = true;
    }
    lu.factorize(J);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::conditioning, "singular Newton Jacobian: " + lu.lastErrorMessage());
    Eigen::VectorXd rhs(N);
    for (int k = 0; k < N; ++k) rhs[k] = -r[static_cast<std::size_t>(k)];
    const Eigen::VectorXd delta = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !delta.allFinite())
      throw Error(ErrorCode::conditioning, "Newton linear solve failed");

    double t = 1.0;
    bool accepted = false;
    std::vector<double> trial(w.size());
    for (int h = 0; h <= opts.max_halvings; ++h) {
      for (int k = 0; k < N; ++k) trial[static_cast<std::size_t>(k)] = w[static_cast<std::size_t>(k)] + t * delta[k];
      auto rt = discrete_residual(grid, durham, trial);
      const double rtn = max_abs(rt);
      if (std::isfinite(rtn) && rtn < rn) {
        w.swap(trial);
        r.swap(rt);
        rn = rtn;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      std::ostringstream os;
      os << "Newton step rejected after " << opts.max_halvings << " halvings; residual history:";
      for (double h : history) os << " " << h;
      throw Error(ErrorCode::diverged, os.str());
    }
    history.push_back(rn);
  }

  RibbonSolution sol = make_solution(grid, durham, std::move(w));
  sol.meta.solver = "newton";
  sol.meta.tol = opts.tol;
  sol.meta.iterations = static_cast<int>(history.size());
  sol.meta.residual_history = history;
  sol.meta.quadratic_order = quadratic_order_estimate(history);
  return sol;
}

GridField linearized_apply(const RibbonSolution& sol, const GridField& u) {
  const auto& g = sol.grid;
  if (u.size() != g.size()) throw Error(ErrorCode::validation, "field size does not match the grid");
  GridField out(g.size(), Complex(0.0));
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Complex c = u[g.index(i, j)];
      const Complex lap = (u[g.index((i + 1) % g.nx, j)] - 2.0 * c + u[g.index((i + g.nx - 1) % g.nx, j)]) * ihx2 +
                          (u[g.index(i, j + 1)] - 2.0 * c + u[g.index(i, j - 1)]) * ihy2;
      out[g.index(i, j)] = lap + std::cosh(2.0 * sol.at(i, j)) * c;
    }
  return out;
}

std::vector<Complex> robin_defect(const RibbonSolution& sol, const GridField& u, Side side) {
  const auto& g = sol.grid;
  if (u.size() != g.size()) throw Error(ErrorCode::validation, "field size does not match the grid");
  std::vector<Complex> out(static_cast<std::size_t>(g.nx));
  const double i2hy = 1.0 / (2.0 * g.hy());
  for (int i = 0; i < g.nx; ++i) {
    Complex uy;
    int j;
    if (side == Side::upper) {
      j = g.ny - 1;
      uy = (3.0 * u[g.index(i, j)] - 4.0 * u[g.index(i, j - 1)] + u[g.index(i, j - 2)]) * i2hy;
    } else {
      j = 0;
      uy = (-3.0 * u[g.index(i, 0)] + 4.0 * u[g.index(i, 1)] - u[g.index(i, 2)]) * i2hy;
    }
    const double w = sol.at(i, j);
    const double coef = sol.durham.A_at(side, g.x(i), g.period_L) * std::exp(w) - sol.durham.B(side) * std::exp(-w);
    out[static_cast<std::size_t>(i)] = uy - coef * u[g.index(i, j)];
  }
  return out;
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int q) {
  // Fornberg's recursion for weights of derivatives 0..q; returns order q.
  const int n = static_cast<int>(nodes.size());
  if (q < 0 || n < q + 1) throw Error(ErrorCode::validation, "not enough nodes for the requested derivative");
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(q + 1), 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, q);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = c[i][q];
  return w;
}

namespace {

// w^{(k)}, k = 0..n, along the 1D ODE from (w, w_y) by Taylor-mode recursion.
std::vector<double> profile_derivatives(double w, double wy, int n) {
  std::vector<double> c(static_cast<std::size_t>(n + 3), 0.0), e(static_cast<std::size_t>(n + 1), 0.0),
      f(static_cast<std::size_t>(n + 1), 0.0);
  c[0] = w;
  c[1] = wy;
  for (int k = 0; k + 2 <= n; ++k) {
    if (k == 0) {
      e[0] = std::exp(2.0 * w);
      f[0] = std::exp(-2.0 * w);
    } else {
      double se = 0.0, sf = 0.0;
      for (int j = 1; j <= k; ++j) {
        se += j * 2.0 * c[j] * e[k - j];
        sf += j * -2.0 * c[j] * f[k - j];
      }
      e[k] = se / k;
      f[k] = sf / k;
    }
    c[k + 2] = -(e[k] - f[k]) / (4.0 * (k + 1) * (k + 2));
  }
  std::vector<double> d(static_cast<std::size_t>(n + 1));
  double fact = 1.0;
  for (int k = 0; k <= n; ++k) {
    if (k > 0) fact *= k;
    d[k] = fact * c[k];
  }
  return d;
}

void require_profile(const RibbonSolution& sol) {
  if (!sol.profile)
    throw Error(ErrorCode::unsupported, "exact derivative chain needs an x-independent profile; use finite differences");
}

GridField broadcast_rows(const RibbonGrid& g, const std::vector<Complex>& rows) {
  GridField out(g.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out[g.index(i, j)] = rows[static_cast<std::size_t>(j)];
  return out;
}

// d_x^q of a real periodic field
std::vector<double> diff_x(const RibbonGrid& g, const std::vector<double>& f, int q, int p) {
  if (q == 0) return f;
  int n = q + p;
  if (n % 2 == 0) ++n;
  n = std::min(n, g.nx % 2 == 1 ? g.nx : g.nx - 1);
  const int half = (n - 1) / 2;
  std::vector<double> nodes;
  for (int k = -half; k <= half; ++k) nodes.push_back(k * g.hx());
  const auto w = fd_weights(0.0, nodes, q);
  std::vector<double> out(f.size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) acc += w[static_cast<std::size_t>(k + half)] * f[g.index(((i + k) % g.nx + g.nx) % g.nx, j)];
      out[g.index(i, j)] = acc;
    }
  return out;
}

std::vector<double> diff_y(const RibbonGrid& g, const std::vector<double>& f, int q, int p) {
  if (q == 0) return f;
  std::vector<double> out(f.size(), 0.0);
  for (int j = 0; j < g.ny; ++j) {
    const auto [start, n] = stencil_window(j, q + p, g.ny);
    std::vector<double> nodes;
    for (int k = 0; k < n; ++k) nodes.push_back(g.y(start + k));
    const auto w = fd_weights(g.y(j), nodes, q);
    for (int i = 0; i < g.nx; ++i) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += w[static_cast<std::size_t>(k)] * f[g.index(i, start + k)];
      out[g.index(i, j)] = acc;
    }
  }
  return out;
}

}  // namespace

GridField derivative_oracle_1d(const RibbonSolution& sol, int a, int b) {
  require_profile(sol);
  if (a < 0 || b < 0 || a + b == 0) throw Error(ErrorCode::validation, "derivative orders must satisfy a, b >= 0, a + b >= 1");
  const auto& p = *sol.profile;
  const Complex mi(0.0, -0.5), pi(0.0, 0.5);
  std::vector<Complex> rows(static_cast<std::size_t>(sol.grid.ny));
  if (a > 0 && b > 0) {
    const CompiledPolynomial poly(DiffPolynomial::derivative_of_omega(a, b));
    const auto [oz, ozb] = poly.max_derivative_orders();
    const int n = std::max({oz, ozb, 1});
    for (int j = 0; j < sol.grid.ny; ++j) {
      const auto d = profile_derivatives(p.omega[j], p.omega_y[j], n);
      std::vector<Complex> dz(static_cast<std::size_t>(n + 1)), dzb(static_cast<std::size_t>(n + 1));
      Complex fz = 1.0, fzb = 1.0;
      for (int k = 1; k <= n; ++k) {
        fz *= mi;
        fzb *= pi;
        dz[k] = fz * d[k];
        dzb[k] = fzb * d[k];
      }
      rows[static_cast<std::size_t>(j)] = poly.evaluate(1.0, std::exp(p.omega[j]), dz.data(), dzb.data());
    }
  } else {
    const int n = a + b;
    const Complex factor = std::pow(a > 0 ? mi : pi, n);
    for (int j = 0; j < sol.grid.ny; ++j) {
      const auto d = profile_derivatives(p.omega[j], p.omega_y[j], n);
      rows[static_cast<std::size_t>(j)] = factor * d[n];
    }
  }
  return broadcast_rows(sol.grid, rows);
}

DerivativeFields derivative_fields(const RibbonSolution& sol, int max_order, OracleKind kind, int fd_accuracy) {
  if (max_order < 1) max_order = 1;
  const auto& g = sol.grid;
  DerivativeFields out;
  out.kind = kind;
  out.max_order = max_order;
  out.fd_accuracy = kind == OracleKind::finite_difference ? fd_accuracy : 0;
  out.dz.assign(static_cast<std::size_t>(max_order + 1), GridField{});
  out.dzb.assign(static_cast<std::size_t>(max_order + 1), GridField{});

  if (kind == OracleKind::exact_1d) {
    require_profile(sol);
    const auto& p = *sol.profile;
    std::vector<std::vector<Complex>> rz(static_cast<std::size_t>(max_order + 1)),
        rzb(static_cast<std::size_t>(max_order + 1));
    for (int j = 0; j < g.ny; ++j) {
      const auto d = profile_derivatives(p.omega[j], p.omega_y[j], max_order);
      Complex fz = 1.0, fzb = 1.0;
      for (int k = 1; k <= max_order; ++k) {
        fz *= Complex(0.0, -0.5);
        fzb *= Complex(0.0, 0.5);
        rz[k].push_back(fz * d[k]);
        rzb[k].push_back(fzb * d[k]);
      }
    }
    for (int k = 1; k <= max_order; ++k) {
      out.dz[k] = broadcast_rows(g, rz[k]);
      out.dzb[k] = broadcast_rows(g, rzb[k]);
    }
    return out;
  }

  if (fd_accuracy < 2) throw Error(ErrorCode::validation, "finite-difference accuracy must be >= 2");
  // partial[jx][ky] = d_x^jx d_y^ky w
  std::vector<std::vector<std::vector<double>>> partial(static_cast<std::size_t>(max_order + 1));
  for (int jx = 0; jx <= max_order; ++jx) {
    const auto fx = diff_x(g, sol.omega, jx, fd_accuracy);
    partial[jx].resize(static_cast<std::size_t>(max_order - jx + 1));
    for (int ky = 0; jx + ky <= max_order; ++ky) partial[jx][ky] = diff_y(g, fx, ky, fd_accuracy);
  }
  for (int a = 1; a <= max_order; ++a) {
    GridField fz(g.size(), Complex(0.0)), fzb(g.size(), Complex(0.0));
    double binom = 1.0;
    for (int jx = 0; jx <= a; ++jx) {
      if (jx > 0) binom = binom * (a - jx + 1) / jx;
      const int ky = a - jx;
      const Complex cz = binom * std::pow(Complex(0.0, -1.0), ky) / std::pow(2.0, a);
      const Complex czb = binom * std::pow(Complex(0.0, 1.0), ky) / std::pow(2.0, a);
      const auto& pv = partial[jx][ky];
      for (std::size_t k = 0; k < g.size(); ++k) {
        fz[k] += cz * pv[k];
        fzb[k] += czb * pv[k];
      }
    }
    out.dz[a] = std::move(fz);
    out.dzb[a] = std::move(fzb);
  }
  return out;
}

}  // namespace sgk
