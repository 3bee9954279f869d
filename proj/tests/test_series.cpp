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

#include <random>

#include "sgk/rational.hpp"
#include "sgk/series.hpp"
#include "test_util.hpp"

namespace {

// Integers modulo n; series over different moduli must not mix.
struct Mod {
  long v = 0;
  long n = 7;
  friend Mod operator+(const Mod& a, const Mod& b) { return {(a.v + b.v) % a.n, a.n}; }
  friend Mod operator-(const Mod& a) { return {(a.n - a.v) % a.n, a.n}; }
  friend Mod operator*(const Mod& a, const Mod& b) { return {(a.v * b.v) % a.n, a.n}; }
  friend bool operator==(const Mod&, const Mod&) = default;
};

}  // namespace

template <>
struct sgk::RingTraits<Mod> {
  static Mod zero_like(const Mod& a) { return {0, a.n}; }
  static bool is_zero(const Mod& a) { return a.v == 0; }
  static bool compatible(const Mod& a, const Mod& b) { return a.n == b.n; }
};

using sgk::ErrorCode;
using sgk::LaurentPolynomial;
using sgk::Order;
using sgk::Rational;
using sgk::testing::error_of;
using QS = sgk::LaurentSeries<Rational>;

namespace {

QS poly(int start, std::vector<long> c, Order trunc = Order::infinity()) {
  std::vector<Rational> q;
  for (long v : c) q.emplace_back(v);
  return QS(start, q, trunc);
}

QS random_series(std::mt19937_64& rng, int trunc) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<int> start(-2, 2);
  const int s = start(rng);
  std::vector<Rational> c;
  for (int k = s; k < trunc; ++k) {
    c.emplace_back(num(rng), 1 + static_cast<unsigned long>(std::abs(num(rng))));
    c.back().canonicalize();
  }
  return QS(s, c, Order(trunc));
}

}  // namespace

TEST_CASE("addition examples") {
  const auto a = poly(-1, {1, 1}) + poly(-1, {-1});
  CHECK(a.degree() == Order(0));
  CHECK(a == poly(0, {1}));
  const auto f = poly(2, {3, -1});
  CHECK(f + QS() == f);
  CHECK(poly(0, {1, 2}) + poly(1, {3, 1}) == poly(0, {1, 5, 1}));
}

TEST_CASE("addition keeps the smaller truncation order") {
  const auto s = poly(0, {1, 2, 3}, Order(3)) + poly(0, {1}, Order(2));
  CHECK(s.truncation_order() == Order(2));
  CHECK(s == poly(0, {2, 2}, Order(2)));
}

TEST_CASE("ring mismatch is reported") {
  const sgk::LaurentSeries<Mod> a(0, {Mod{1, 7}});
  const sgk::LaurentSeries<Mod> b(0, {Mod{1, 5}});
  CHECK(error_of([&] { (void)(a + b); }) == ErrorCode::ring_mismatch);
  CHECK(error_of([&] { (void)(a * b); }) == ErrorCode::ring_mismatch);
  const auto c = a * a;
  CHECK(c.coeff(0) == Mod{1, 7});
}

TEST_CASE("multiplication examples") {
  const auto f = poly(-3, {2, 0, 5});
  CHECK(f * poly(0, {1}) == f);
  CHECK(poly(-1, {1}) * poly(1, {1}) == poly(0, {1}));
  CHECK(poly(0, {1, 1}) * poly(0, {1, -1}) == poly(0, {1, 0, -1}));
}

TEST_CASE("multiplication truncation order") {
  // min(trunc_a + deg_b, trunc_b + deg_a)
  const auto p = poly(1, {1, 1}, Order(4)) * poly(-1, {2, 1}, Order(2));
  CHECK(p.truncation_order() == Order(3));
  CHECK(p.first() == 0);
  for (int k = 0; k < 3; ++k) CHECK(p.is_known(k));
  CHECK_FALSE(p.is_known(3));
}

TEST_CASE("inversion examples") {
  CHECK(sgk::ls_invert(poly(0, {1}), 5) == poly(0, {1}, Order(6)));
  CHECK(sgk::ls_invert(poly(1, {1}), 3).coeff(-1) == 1);
  CHECK(sgk::ls_invert(poly(1, {1}), 3).degree() == Order(-1));
  CHECK(sgk::ls_invert(poly(0, {1, -1}), 3) == poly(0, {1, 1, 1, 1}, Order(4)));
  CHECK(error_of([] { (void)sgk::ls_invert(QS(), 3); }) == ErrorCode::not_invertible);
  const sgk::LaurentSeries<Mod> m(0, {Mod{3, 7}});
  CHECK(error_of([&] { (void)sgk::ls_invert(m, 3); }) == ErrorCode::unsupported);
}

TEST_CASE("truncate, degree and bidegree") {
  CHECK(sgk::ls_truncate(poly(0, {1, 1, 1}), 1) == poly(0, {1, 1}, Order(2)));
  CHECK(sgk::ls_degree(QS()) == Order::infinity());
  CHECK(QS().degree().is_infinite());
  CHECK(error_of([] { (void)Order::infinity().value(); }) == ErrorCode::unsupported);
  const LaurentPolynomial<Rational> p(1, {Rational(1), Rational(0), Rational(0), Rational(1)});
  CHECK(sgk::lp_bidegree(p) == std::make_pair(Order(1), Order(4)));
  CHECK(sgk::lp_bidegree(LaurentPolynomial<Rational>()).first.is_infinite());
}

TEST_CASE("polynomials trim zero ends and reject truncated series") {
  const LaurentPolynomial<double> p(-2, {0.0, 0.0, 3.0, 0.0});
  CHECK(p.lo() == 0);
  CHECK(p.hi() == 0);
  CHECK(p.coeff(0) == 3.0);
  CHECK(error_of([] { (void)LaurentPolynomial<Rational>(poly(0, {1}, Order(3))); }) == ErrorCode::unsupported);
}

TEST_CASE("coefficients past the truncation order are unknown") {
  const auto s = poly(0, {1, 2}, Order(2));
  CHECK(error_of([&] { (void)s.coeff(2); }) == ErrorCode::unsupported);
  CHECK(s.coeff(-4) == 0);
}

TEST_CASE("ring laws on random truncated series") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_series(rng, 5), b = random_series(rng, 4), c = random_series(rng, 6);
    CHECK((a + b) == (b + a));
    CHECK(((a + b) + c) == (a + (b + c)));
    CHECK((a * b) == (b * a));
    CHECK(((a * b) * c) == (a * (b * c)));
    CHECK((a * (b + c)) == (a * b + a * c));
    if (!a.is_zero() && !b.is_zero()) CHECK((a * b).degree() == a.degree() + b.degree());
    for (const auto& s : {a + b, a * b})
      if (!s.is_zero()) CHECK(Order(s.last()) < s.truncation_order());
  }
}

TEST_CASE("inverse agrees with one on retained coefficients") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_series(rng, 6);
    if (a.is_zero()) continue;
    const auto inv = sgk::ls_invert(a, 4);
    CHECK(inv.degree() == -a.degree());
    const auto one = a * inv;
    for (int k = one.is_zero() ? 0 : one.first(); one.is_known(k); ++k) CHECK(one.coeff(k) == (k == 0 ? 1 : 0));
    CHECK(one.is_known(0));
  }
}

TEST_CASE("evaluation and shifting") {
  const auto s = poly(-1, {1, 2, 3});
  CHECK(sgk::ls_evaluate(s, Rational(2)) == Rational(1, 2) + 2 + 6);
  CHECK(sgk::ls_shift(s, 2) == poly(1, {1, 2, 3}));
}
