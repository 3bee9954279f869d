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

#include "sgk/diff_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace sgk {
namespace {

void add_deriv(MonomialKey& key, DerivSymbol sym, int power) {
  auto it = std::lower_bound(key.derivs.begin(), key.derivs.end(), sym,
                             [](const auto& entry, const DerivSymbol& s) { return entry.first < s; });
  if (it != key.derivs.end() && it->first == sym) {
    it->second += power;
    if (it->second == 0) key.derivs.erase(it);
  } else if (power != 0) {
    key.derivs.insert(it, {sym, power});
  }
}

// Product of two keys; returns the sign picked up from i*i.
int multiply_keys(const MonomialKey& a, const MonomialKey& b, MonomialKey& out) {
  out = a;
  int sign = 1;
  out.i_power = a.i_power + b.i_power;
  if (out.i_power == 2) {
    out.i_power = 0;
    sign = -1;
  }
  out.gamma_power += b.gamma_power;
  out.exp_omega += b.exp_omega;
  for (const auto& [sym, e] : b.derivs) add_deriv(out, sym, e);
  return sign;
}

// w_{z zbar} = -(1/16) e^{2w} + (1/16) e^{-2w}
DiffPolynomial mixed_base() {
  return Rational(-1, 16) * DiffPolynomial::exp_omega(2) + Rational(1, 16) * DiffPolynomial::exp_omega(-2);
}

// d_dir^n of w_{z zbar}; only e^{+-2w} and dir-derivatives appear, so the
// recursion never re-enters the mixed case.
DiffPolynomial mixed_derivative(int n, Direction dir) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, DiffPolynomial> cache;
  const std::pair<int, int> key{n, dir == Direction::z ? 0 : 1};
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  DiffPolynomial p = n == 0 ? mixed_base() : dp_differentiate(mixed_derivative(n - 1, dir), dir);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, p);
  return p;
}

std::string rational_text(const Rational& q) {
  return q.get_str();
}

}  // namespace

DiffPolynomial DiffPolynomial::constant(const Rational& c) {
  DiffPolynomial p;
  p.add_term(c, MonomialKey{});
  return p;
}

DiffPolynomial DiffPolynomial::monomial(const Rational& c, MonomialKey key) {
  if (key.i_power < 0 || key.i_power > 1)
    throw Error(ErrorCode::unsupported, "i_power must be 0 or 1 in a normalized key");
  MonomialKey clean = key;
  clean.derivs.clear();
  for (const auto& [sym, e] : key.derivs) add_deriv(clean, sym, e);
  DiffPolynomial p;
  p.add_term(c, clean);
  return p;
}

DiffPolynomial DiffPolynomial::imaginary_unit() {
  MonomialKey k;
  k.i_power = 1;
  return monomial(Rational(1), k);
}

DiffPolynomial DiffPolynomial::gamma_power(int g) {
  MonomialKey k;
  k.gamma_power = g;
  return monomial(Rational(1), k);
}

DiffPolynomial DiffPolynomial::exp_omega(int e) {
  MonomialKey k;
  k.exp_omega = e;
  return monomial(Rational(1), k);
}

DiffPolynomial DiffPolynomial::derivative_of_omega(int a, int b) {
  if (a < 0 || b < 0 || a + b == 0)
    throw Error(ErrorCode::unsupported, "derivative orders must be non-negative with a + b >= 1");
  if (a > 0 && b > 0) {
    // d_z^a d_zbar^b w = d_z^{a-1} d_zbar^{b-1} (w_{z zbar})
    DiffPolynomial p = mixed_derivative(b - 1, Direction::zbar);
    for (int i = 1; i < a; ++i) p = dp_differentiate(p, Direction::z);
    return p;
  }
  MonomialKey k;
  add_deriv(k, DerivSymbol{a > 0 ? a : b, b > 0}, 1);
  return monomial(Rational(1), k);
}

void DiffPolynomial::add_term(const Rational& c, const MonomialKey& key) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

std::vector<DiffMonomial> DiffPolynomial::monomials() const {
  std::vector<DiffMonomial> out;
  out.reserve(terms_.size());
  for (const auto& [k, c] : terms_) out.push_back({c, k});
  return out;
}

std::pair<int, int> DiffPolynomial::max_derivative_orders() const {
  std::pair<int, int> m{0, 0};
  for (const auto& [k, c] : terms_)
    for (const auto& [sym, e] : k.derivs) {
      int& slot = sym.bar ? m.second : m.first;
      slot = std::max(slot, sym.order);
    }
  return m;
}

DiffPolynomial& DiffPolynomial::operator+=(const DiffPolynomial& o) {
  for (const auto& [k, c] : o.terms_) add_term(c, k);
  return *this;
}

DiffPolynomial& DiffPolynomial::operator-=(const DiffPolynomial& o) {
  for (const auto& [k, c] : o.terms_) add_term(-c, k);
  return *this;
}

DiffPolynomial operator-(const DiffPolynomial& a) {
  DiffPolynomial out;
  for (const auto& [k, c] : a.terms_) out.terms_.emplace(k, -c);
  return out;
}

DiffPolynomial operator*(const DiffPolynomial& a, const DiffPolynomial& b) {
  DiffPolynomial out;
  MonomialKey key;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) {
      const int sign = multiply_keys(ka, kb, key);
      Rational c = ca * cb;
      if (sign < 0) c = -c;
      out.add_term(c, key);
    }
  return out;
}

DiffPolynomial operator*(const Rational& c, const DiffPolynomial& a) {
  DiffPolynomial out;
  if (sgn(c) == 0) return out;
  for (const auto& [k, v] : a.terms_) out.terms_.emplace(k, c * v);
  return out;
}

std::string DiffPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    const bool negative = sgn(c) < 0;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;

    std::vector<std::string> factors;
    if (k.i_power == 1) factors.emplace_back("I");
    if (k.gamma_power == 1)
      factors.emplace_back("gamma");
    else if (k.gamma_power != 0)
      factors.push_back("gamma^" + std::to_string(k.gamma_power));
    if (k.exp_omega == 1)
      factors.emplace_back("exp(w)");
    else if (k.exp_omega == -1)
      factors.emplace_back("exp(-w)");
    else if (k.exp_omega != 0)
      factors.push_back("exp(" + std::to_string(k.exp_omega) + "w)");
    for (const auto& [sym, e] : k.derivs) {
      std::string f = "w_";
      for (int j = 0; j < sym.order; ++j) f += sym.bar ? "zb" : "z";
      if (e != 1) f += "^" + std::to_string(e);
      factors.push_back(f);
    }

    const Rational mag = abs(c);
    std::string body;
    if (factors.empty() || mag != 1) body = rational_text(mag);
    for (const auto& f : factors) {
      if (!body.empty()) body += "*";
      body += f;
    }
    os << body;
  }
  return os.str();
}

DiffPolynomial dp_differentiate(const DiffPolynomial& p, Direction dir) {
  DiffPolynomial out;
  const bool bar = dir == Direction::zbar;
  for (const auto& [key, c] : p.terms()) {
    if (key.exp_omega != 0) {
      MonomialKey k = key;
      add_deriv(k, DerivSymbol{1, bar}, 1);
      out += DiffPolynomial::monomial(c * key.exp_omega, k);
    }
    for (const auto& [sym, e] : key.derivs) {
      MonomialKey rest = key;
      add_deriv(rest, sym, -1);
      const Rational ce = c * e;
      if (sym.bar == bar) {
        add_deriv(rest, DerivSymbol{sym.order + 1, bar}, 1);
        out += DiffPolynomial::monomial(ce, rest);
      } else {
        // d_z of d_zbar^b w is d_zbar^{b-1} w_{z zbar}, and symmetrically.
        out += DiffPolynomial::monomial(ce, rest) * mixed_derivative(sym.order - 1, sym.bar ? Direction::zbar : Direction::z);
      }
    }
  }
  return out;
}

SymbolicKillingField ps_recursion(int order) {
  if (order < 0) throw Error(ErrorCode::validation, "recursion order must be >= 0");
  const int n = order;
  const auto dz = [](const DiffPolynomial& q) { return dp_differentiate(q, Direction::z); };
  const DiffPolynomial I = DiffPolynomial::imaginary_unit();
  const DiffPolynomial gamma = DiffPolynomial::gamma_power(1);
  const DiffPolynomial inv_gamma = DiffPolynomial::gamma_power(-1);
  const DiffPolynomial wz = DiffPolynomial::derivative_of_omega(1, 0);

  SymbolicKillingField f;
  f.order = n;
  f.u.assign(static_cast<std::size_t>(n + 1), DiffPolynomial{});
  f.psi.assign(static_cast<std::size_t>(n + 1), DiffPolynomial{});
  std::vector<DiffPolynomial> uz(static_cast<std::size_t>(n + 1));
  f.psi[0] = DiffPolynomial::constant(Rational(-1, 2));

  auto& u = f.u;
  auto& psi = f.psi;
  const auto theta = [&](int p, int q) {
    return gamma * u[p] * u[q + 1] + Rational(4) * (uz[p] * uz[q]) + psi[p] * psi[q];
  };

  for (int m = 0; m < n; ++m) {
    u[m + 1] = inv_gamma * (Rational(-4) * dz(uz[m]) + Rational(4) * (I * wz * psi[m]));
    uz[m + 1] = dz(u[m + 1]);
    const int mm = m + 1;
    DiffPolynomial next;
    int k;
    if (mm % 2 == 1) {
      k = (mm + 1) / 2;
      next = gamma * u[k] * u[k];
    } else {
      k = mm / 2;
      next = gamma * u[k] * u[k + 1] + theta(k, k);
    }
    for (int j = 1; j <= k - 1; ++j) next += Rational(2) * theta(j, mm - j);
    psi[mm] = next;
  }

  const DiffPolynomial e_m2w = DiffPolynomial::exp_omega(-2);
  f.t.resize(static_cast<std::size_t>(n + 1));
  f.s.resize(static_cast<std::size_t>(n + 1));
  for (int m = 0; m <= n; ++m) {
    f.t[m] = inv_gamma * (Rational(-2) * (I * uz[m]) - psi[m]);
    if (m >= 1) f.s[m] = e_m2w * (Rational(2) * (I * uz[m - 1]) - psi[m - 1]);
  }
  return f;
}

std::vector<StructureResidual> verify_structure_eqs(const SymbolicKillingField& f) {
  const auto d = [](const DiffPolynomial& q, Direction dir) { return dp_differentiate(q, dir); };
  const auto at = [](const std::vector<DiffPolynomial>& v, int m) {
    return m < 0 || m >= static_cast<int>(v.size()) ? DiffPolynomial{} : v[static_cast<std::size_t>(m)];
  };
  const DiffPolynomial I = DiffPolynomial::imaginary_unit();
  const DiffPolynomial g = DiffPolynomial::gamma_power(1);
  const DiffPolynomial ginv = DiffPolynomial::gamma_power(-1);
  const DiffPolynomial ew = DiffPolynomial::exp_omega(1);
  const DiffPolynomial emw = DiffPolynomial::exp_omega(-1);
  const DiffPolynomial e2w = DiffPolynomial::exp_omega(2);
  const DiffPolynomial wz = DiffPolynomial::derivative_of_omega(1, 0);
  const DiffPolynomial wzb = DiffPolynomial::derivative_of_omega(0, 1);
  const Rational two(2), four(4);

  std::vector<StructureResidual> out;
  for (int m = 0; m < f.order; ++m) {
    const DiffPolynomial um = at(f.u, m), tm = at(f.t, m), sm = at(f.s, m);
    const DiffPolynomial tmz = d(tm, Direction::z), tmzb = d(tm, Direction::zbar);
    const DiffPolynomial smz = d(sm, Direction::z), smzb = d(sm, Direction::zbar);
    // 4u_{m,z} + i e^{2w} s_{m+1} - i gamma t_m
    out.push_back({1, m, four * d(um, Direction::z) + I * e2w * at(f.s, m + 1) - I * g * tm});
    // 4u_{m,zbar} + i gamma^{-1} s_m - i e^{2w} t_{m-1}
    out.push_back({2, m, four * d(um, Direction::zbar) + I * ginv * sm - I * e2w * at(f.t, m - 1)});
    // 4w_z t_m + 2t_{m,z} - i u_{m+1}
    out.push_back({3, m, four * (wz * tm) + two * tmz - I * at(f.u, m + 1)});
    // 2e^w t_{m,zbar} - i gamma^{-1} e^{-w} u_m
    out.push_back({4, m, two * (ew * tmzb) - I * ginv * emw * um});
    // 2e^w s_{m,z} + i gamma e^{-w} u_m
    out.push_back({5, m, two * (ew * smz) + I * g * emw * um});
    // 4w_zbar s_m + 2s_{m,zbar} + i u_{m-1}
    out.push_back({6, m, four * (wzb * sm) + two * smzb + I * at(f.u, m - 1)});
  }
  return out;
}

LaurentSeries<DiffPolynomial> det_series(const SymbolicKillingField& f) {
  const Order trunc(f.order + 1);
  const LaurentSeries<DiffPolynomial> U(0, f.u, trunc);
  const LaurentSeries<DiffPolynomial> S(0, f.s, trunc);
  const LaurentSeries<DiffPolynomial> T(0, f.t, trunc);
  const DiffPolynomial e2w = DiffPolynomial::exp_omega(2);
  const auto ST = ls_map(S * T, [&](const DiffPolynomial& c) { return e2w * c; });
  return -(U * U) - ST;
}

DiffPolynomial strip_gamma(const DiffPolynomial& p, int g) {
  DiffPolynomial out;
  for (const auto& [k, c] : p.terms()) {
    if (k.gamma_power != g)
      throw Error(ErrorCode::unsupported, "coefficient is not homogeneous of degree " + std::to_string(g) + " in gamma");
    MonomialKey stripped = k;
    stripped.gamma_power = 0;
    out += DiffPolynomial::monomial(c, stripped);
  }
  return out;
}

std::map<std::pair<int, int>, BivariateEntry> bivariate_expand(const SymbolicKillingField& f) {
  // Phi(lambda, gamma) = sum_m [[u_m, gamma^{-1} e^w t_m], [gamma e^w s_m, -u_m]] (lambda/gamma)^m
  // once the gamma-dependence of the recursion is pulled out of the coefficients:
  // u_m ~ gamma^{-m}, t_m ~ gamma^{-m-1}, s_m ~ gamma^{-m+1}.
  std::map<std::pair<int, int>, BivariateEntry> out;
  for (int m = 0; m <= f.order; ++m) {
    const DiffPolynomial u = strip_gamma(f.u[m], -m);
    const DiffPolynomial t = strip_gamma(f.t[m], -m - 1);
    const DiffPolynomial s = strip_gamma(f.s[m], -m + 1);
    if (!u.is_zero()) out[{m, -m}].u = u;
    if (!t.is_zero()) out[{m, -m - 1}].t = t;
    if (!s.is_zero()) out[{m, -m + 1}].s = s;
  }
  return out;
}

CompiledPolynomial::CompiledPolynomial(const DiffPolynomial& p) {
  terms_.reserve(p.size());
  for (const auto& [k, c] : p.terms()) {
    std::complex<double> coeff(c.get_d(), 0.0);
    if (k.i_power == 1) coeff = {0.0, c.get_d()};
    terms_.push_back({coeff, k.gamma_power, k.exp_omega, k.derivs});
  }
  max_orders_ = p.max_derivative_orders();
}

std::complex<double> CompiledPolynomial::evaluate(std::complex<double> gamma, double exp_w,
                                                  const std::complex<double>* dz,
                                                  const std::complex<double>* dzb) const {
  std::complex<double> acc = 0.0;
  for (const auto& t : terms_) {
    std::complex<double> v = t.coeff;
    if (t.gamma_power != 0) v *= std::pow(gamma, t.gamma_power);
    if (t.exp_omega != 0) v *= std::pow(exp_w, t.exp_omega);
    for (const auto& [sym, e] : t.derivs) {
      const std::complex<double> base = sym.bar ? dzb[sym.order] : dz[sym.order];
      std::complex<double> pw = base;
      for (int j = 1; j < e; ++j) pw *= base;
      v *= pw;
    }
    acc += v;
  }
  return acc;
}

}  // namespace sgk
