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

// Differential polynomials in a solution w of w_{z zbar} = -(1/16)e^{2w} + (1/16)e^{-2w}.
//
// A monomial is  c * i^p * gamma^g * e^{k w} * prod D(a,b)^e  where D(a,b) is
// the pure derivative d_z^a d_zbar^b w (a*b == 0). Mixed derivatives never
// survive normalization: they are rewritten through the equation above, which
// makes equality of polynomials decidable by comparing canonical forms.

#ifndef SGK_DIFF_ALGEBRA_HPP
#define SGK_DIFF_ALGEBRA_HPP

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sgk/rational.hpp"
#include "sgk/series.hpp"

namespace sgk {

enum class Direction { z, zbar };

// d_z^order w (bar = false) or d_zbar^order w (bar = true), order >= 1.
struct DerivSymbol {
  int order = 1;
  bool bar = false;

  friend auto operator<=>(const DerivSymbol&, const DerivSymbol&) = default;
};

struct MonomialKey {
  int i_power = 0;  // 0 or 1; i^2 is folded into the coefficient
  int gamma_power = 0;
  int exp_omega = 0;
  std::vector<std::pair<DerivSymbol, int>> derivs;  // sorted, powers >= 1

  friend auto operator<=>(const MonomialKey&, const MonomialKey&) = default;
};

struct DiffMonomial {
  Rational coeff;
  MonomialKey key;
};

class DiffPolynomial {
 public:
  DiffPolynomial() = default;

  static DiffPolynomial constant(const Rational& c);
  static DiffPolynomial monomial(const Rational& c, MonomialKey key);
  static DiffPolynomial imaginary_unit();
  static DiffPolynomial gamma_power(int g);
  static DiffPolynomial exp_omega(int k);
  // d_z^a d_zbar^b w, reduced to pure derivatives when a*b != 0.
  static DiffPolynomial derivative_of_omega(int a, int b);

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<MonomialKey, Rational>& terms() const { return terms_; }
  std::vector<DiffMonomial> monomials() const;

  // Highest derivative order of each kind (0 when absent).
  std::pair<int, int> max_derivative_orders() const;

  DiffPolynomial& operator+=(const DiffPolynomial& o);
  DiffPolynomial& operator-=(const DiffPolynomial& o);

  friend DiffPolynomial operator+(DiffPolynomial a, const DiffPolynomial& b) { return a += b; }
  friend DiffPolynomial operator-(DiffPolynomial a, const DiffPolynomial& b) { return a -= b; }
  friend DiffPolynomial operator-(const DiffPolynomial& a);
  friend DiffPolynomial operator*(const DiffPolynomial& a, const DiffPolynomial& b);
  friend DiffPolynomial operator*(const Rational& c, const DiffPolynomial& a);
  friend bool operator==(const DiffPolynomial& a, const DiffPolynomial& b) { return a.terms_ == b.terms_; }

  // Stable text form, e.g. "-2*I*gamma^-1*w_z" or "1/2*exp(-2w)".
  std::string to_string() const;

 private:
  void add_term(const Rational& c, const MonomialKey& key);

  std::map<MonomialKey, Rational> terms_;
};

template <>
struct RingTraits<DiffPolynomial> {
  static DiffPolynomial zero_like(const DiffPolynomial&) { return {}; }
  static bool is_zero(const DiffPolynomial& p) { return p.is_zero(); }
  static bool compatible(const DiffPolynomial&, const DiffPolynomial&) { return true; }
};

DiffPolynomial dp_differentiate(const DiffPolynomial& p, Direction dir);

// Coefficients of the canonical Killing field, indices 0..order.
struct SymbolicKillingField {
  int order = 0;
  std::vector<DiffPolynomial> u, psi, t, s;
};

SymbolicKillingField ps_recursion(int order);

struct StructureResidual {
  int equation = 0;  // 1..6 in the order listed in diff_algebra.cpp
  int m = 0;
  DiffPolynomial residual;
};

// Six residuals per order m = 0..order-1; all vanish for a Killing field.
std::vector<StructureResidual> verify_structure_eqs(const SymbolicKillingField& f);

// -U^2 - e^{2w} S T as a lambda-series, known through lambda^order.
LaurentSeries<DiffPolynomial> det_series(const SymbolicKillingField& f);

// Support of the field in (lambda, gamma) after stripping gamma from the
// coefficients: u_m sits at (m,-m), t_m at (m,-m-1), s_m at (m,-m+1).
struct BivariateEntry {
  DiffPolynomial u, t, s;
};
std::map<std::pair<int, int>, BivariateEntry> bivariate_expand(const SymbolicKillingField& f);

// Removes the gamma tag: returns q with p = gamma^g * q, or throws
// ErrorCode::unsupported when p is not homogeneous in gamma.
DiffPolynomial strip_gamma(const DiffPolynomial& p, int g);

// Numerical evaluation. dz[a] = d_z^a w and dzb[b] = d_zbar^b w (index 0
// ignored); exp_w = e^{w}.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  explicit CompiledPolynomial(const DiffPolynomial& p);

  std::complex<double> evaluate(std::complex<double> gamma, double exp_w,
                                const std::complex<double>* dz, const std::complex<double>* dzb) const;
  std::pair<int, int> max_derivative_orders() const { return max_orders_; }

 private:
  struct Term {
    std::complex<double> coeff;
    int gamma_power;
    int exp_omega;
    std::vector<std::pair<DerivSymbol, int>> derivs;
  };
  std::vector<Term> terms_;
  std::pair<int, int> max_orders_{0, 0};
};

}  // namespace sgk

#endif  // SGK_DIFF_ALGEBRA_HPP
