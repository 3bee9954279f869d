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

// Exact rational and Gaussian-rational scalars.

#ifndef SGK_RATIONAL_HPP
#define SGK_RATIONAL_HPP

#include <gmpxx.h>

#include <complex>
#include <ostream>
#include <string>

#include "sgk/error.hpp"
#include "sgk/series.hpp"

namespace sgk {

using Rational = mpq_class;

template <>
struct RingTraits<Rational> {
  static Rational zero_like(const Rational&) { return Rational(0); }
  static bool is_zero(const Rational& q) { return sgn(q) == 0; }
  static bool compatible(const Rational&, const Rational&) { return true; }
  static Rational invert(const Rational& q) {
    if (sgn(q) == 0) throw Error(ErrorCode::not_invertible, "division by zero");
    return Rational(1) / q;
  }
};

// re + i*im with rational parts.
struct GaussRational {
  Rational re{0};
  Rational im{0};

  GaussRational() = default;
  GaussRational(Rational r) : re(std::move(r)) {}  // NOLINT
  GaussRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
  GaussRational(long r) : re(r) {}  // NOLINT

  friend GaussRational operator+(const GaussRational& a, const GaussRational& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend GaussRational operator-(const GaussRational& a, const GaussRational& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend GaussRational operator-(const GaussRational& a) { return {-a.re, -a.im}; }
  friend GaussRational operator*(const GaussRational& a, const GaussRational& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend GaussRational operator/(const GaussRational& a, const GaussRational& b) {
    const Rational n = b.re * b.re + b.im * b.im;
    if (sgn(n) == 0) throw Error(ErrorCode::not_invertible, "division by zero");
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
  friend bool operator==(const GaussRational& a, const GaussRational& b) {
    return a.re == b.re && a.im == b.im;
  }
  friend bool operator!=(const GaussRational& a, const GaussRational& b) { return !(a == b); }

  std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }

  friend std::ostream& operator<<(std::ostream& os, const GaussRational& g) {
    return os << g.re.get_str() << (sgn(g.im) < 0 ? "-" : "+") << Rational(abs(g.im)).get_str() << "i";
  }
};

inline GaussRational conj(const GaussRational& g) { return {g.re, -g.im}; }

template <>
struct RingTraits<GaussRational> {
  static GaussRational zero_like(const GaussRational&) { return {}; }
  static bool is_zero(const GaussRational& g) { return sgn(g.re) == 0 && sgn(g.im) == 0; }
  static bool compatible(const GaussRational&, const GaussRational&) { return true; }
  static GaussRational invert(const GaussRational& g) { return GaussRational(1) / g; }
};

}  // namespace sgk

#endif  // SGK_RATIONAL_HPP
