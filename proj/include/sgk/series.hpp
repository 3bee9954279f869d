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

// Truncated Laurent series and Laurent polynomials in the spectral parameter
// over a pluggable coefficient ring.
//
// A series stores the coefficients c_k for k = start .. start + size - 1 and a
// truncation order t: exponents >= t are unknown, exponents below t that are
// not stored are known to vanish. An exact series has t = +inf.
//
// Coefficient rings plug in through RingTraits<R>, which must provide
//   static R    zero_like(const R&)              a zero with the same shape
//   static bool is_zero(const R&)
//   static bool compatible(const R&, const R&)   same ring (shape, grid, ...)
// and optionally
//   static R    invert(const R&)                 field-like rings only

#ifndef SGK_SERIES_HPP
#define SGK_SERIES_HPP

#include <algorithm>
#include <complex>
#include <concepts>
#include <cstddef>
#include <ostream>
#include <type_traits>
#include <utility>
#include <iterator>
#include <vector>

#include "sgk/error.hpp"

namespace sgk {

// An integer or +infinity. Used for series degrees (the zero series has
// degree +inf) and for truncation orders (exact series).
class Order {
 public:
  constexpr Order(int v) noexcept : finite_(true), value_(v) {}  // NOLINT

  static constexpr Order infinity() noexcept {
    Order o(0);
    o.finite_ = false;
    return o;
  }

  constexpr bool is_finite() const noexcept { return finite_; }
  constexpr bool is_infinite() const noexcept { return !finite_; }

  int value() const {
    if (!finite_) throw Error(ErrorCode::unsupported, "Order::value() on +inf");
    return value_;
  }

  friend constexpr Order operator+(Order a, Order b) noexcept {
    if (!a.finite_ || !b.finite_) return infinity();
    return Order(a.value_ + b.value_);
  }
  friend constexpr Order operator-(Order a) noexcept {
    // only meaningful for finite values
    return Order(-a.value_);
  }
  friend constexpr bool operator==(Order a, Order b) noexcept {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend constexpr bool operator<(Order a, Order b) noexcept {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(Order a, Order b) noexcept { return !(b < a); }
  friend constexpr bool operator>(Order a, Order b) noexcept { return b < a; }
  friend constexpr bool operator>=(Order a, Order b) noexcept { return !(a < b); }

  friend std::ostream& operator<<(std::ostream& os, Order o) {
    if (o.finite_) return os << o.value_;
    return os << "+inf";
  }

 private:
  bool finite_;
  int value_;
};

constexpr Order min(Order a, Order b) noexcept { return b < a ? b : a; }
constexpr Order max(Order a, Order b) noexcept { return a < b ? b : a; }

template <class R>
struct RingTraits;

// Plain scalars: real and complex floating point, integers.
template <class S>
struct ScalarRingTraits {
  static S zero_like(const S&) { return S{}; }
  static bool is_zero(const S& s) { return s == S{}; }
  static bool compatible(const S&, const S&) { return true; }
  static S invert(const S& s) { return S{1} / s; }
};

template <>
struct RingTraits<double> : ScalarRingTraits<double> {};
template <>
struct RingTraits<std::complex<double>> : ScalarRingTraits<std::complex<double>> {};

template <class R>
concept CoefficientRing = requires(const R& a, const R& b) {
  { a + b } -> std::convertible_to<R>;
  { -a } -> std::convertible_to<R>;
  { RingTraits<R>::zero_like(a) } -> std::convertible_to<R>;
  { RingTraits<R>::is_zero(a) } -> std::convertible_to<bool>;
  { RingTraits<R>::compatible(a, b) } -> std::convertible_to<bool>;
};

template <class R>
concept InvertibleRing = CoefficientRing<R> && requires(const R& a) {
  { RingTraits<R>::invert(a) } -> std::convertible_to<R>;
};

template <CoefficientRing R>
class LaurentSeries {
 public:
  using value_type = R;

  // The zero series, exact unless a truncation order is given.
  explicit LaurentSeries(R zero_like = R{}, Order trunc = Order::infinity())
      : trunc_(trunc), zero_(RingTraits<R>::zero_like(zero_like)) {}

  LaurentSeries(int start, std::vector<R> coeffs, Order trunc = Order::infinity())
      : LaurentSeries(start, std::move(coeffs), trunc, R{}) {}

  LaurentSeries(int start, std::vector<R> coeffs, Order trunc, const R& zero_like)
      : start_(start), coeffs_(std::move(coeffs)), trunc_(trunc) {
    zero_ = coeffs_.empty() ? RingTraits<R>::zero_like(zero_like)
                            : RingTraits<R>::zero_like(coeffs_.front());
    normalize();
  }

  static LaurentSeries monomial(const R& c, int k, Order trunc = Order::infinity()) {
    return LaurentSeries(k, std::vector<R>{c}, trunc, c);
  }

  Order degree() const { return coeffs_.empty() ? Order::infinity() : Order(start_); }
  Order truncation_order() const { return trunc_; }
  bool is_zero() const { return coeffs_.empty(); }
  bool is_exact() const { return trunc_.is_infinite(); }

  // First and last stored exponent; meaningless for the zero series.
  int first() const { return start_; }
  int last() const { return start_ + static_cast<int>(coeffs_.size()) - 1; }

  const std::vector<R>& coefficients() const { return coeffs_; }
  const R& zero() const { return zero_; }

  bool is_known(int k) const { return Order(k) < trunc_; }

  R coeff(int k) const {
    if (!is_known(k))
      throw Error(ErrorCode::unsupported,
                  "coefficient " + std::to_string(k) + " lies beyond the truncation order");
    if (coeffs_.empty() || k < start_ || k > last()) return zero_;
    return coeffs_[static_cast<std::size_t>(k - start_)];
  }

  friend bool operator==(const LaurentSeries& a, const LaurentSeries& b) {
    if (!(a.trunc_ == b.trunc_) || a.coeffs_.size() != b.coeffs_.size()) return false;
    if (a.coeffs_.empty()) return true;
    return a.start_ == b.start_ && a.coeffs_ == b.coeffs_;
  }

 private:
  void normalize() {
    if (trunc_.is_finite()) {
      const long keep = static_cast<long>(trunc_.value()) - start_;
      if (keep <= 0)
        coeffs_.clear();
      else if (static_cast<std::size_t>(keep) < coeffs_.size())
        coeffs_.resize(static_cast<std::size_t>(keep));
    }
    while (!coeffs_.empty() && RingTraits<R>::is_zero(coeffs_.back())) coeffs_.pop_back();
    std::size_t lead = 0;
    while (lead < coeffs_.size() && RingTraits<R>::is_zero(coeffs_[lead])) ++lead;
    if (lead > 0) {
      coeffs_ = std::vector<R>(std::make_move_iterator(coeffs_.begin() + static_cast<long>(lead)),
                               std::make_move_iterator(coeffs_.end()));
      start_ += static_cast<int>(lead);
    }
    if (coeffs_.empty()) start_ = 0;
  }

  int start_ = 0;
  std::vector<R> coeffs_;
  Order trunc_ = Order::infinity();
  R zero_{};
};

template <class R>
Order ls_degree(const LaurentSeries<R>& a) {
  return a.degree();
}

namespace detail {

template <class A, class B>
void require_compatible(const A& a, const B& b) {
  if constexpr (std::is_same_v<A, B>) {
    if (!RingTraits<A>::compatible(a, b))
      throw Error(ErrorCode::ring_mismatch, "series coefficients live in different rings");
  }
}

// Lowest exponent that can be nonzero: the degree, or the truncation order
// when every known coefficient vanishes.
template <class R>
Order effective_degree(const LaurentSeries<R>& a) {
  return min(a.degree(), a.truncation_order());
}

}  // namespace detail

template <class R>
LaurentSeries<R> ls_add(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  detail::require_compatible(a.zero(), b.zero());
  const Order trunc = min(a.truncation_order(), b.truncation_order());
  if (a.is_zero()) return LaurentSeries<R>(b.first(), b.coefficients(), trunc, b.zero());
  if (b.is_zero()) return LaurentSeries<R>(a.first(), a.coefficients(), trunc, a.zero());
  const int lo = std::min(a.first(), b.first());
  const int hi = std::max(a.last(), b.last());
  std::vector<R> out(static_cast<std::size_t>(hi - lo + 1), a.zero());
  for (int k = a.first(); k <= a.last(); ++k)
    out[static_cast<std::size_t>(k - lo)] = a.coefficients()[static_cast<std::size_t>(k - a.first())];
  for (int k = b.first(); k <= b.last(); ++k) {
    auto& slot = out[static_cast<std::size_t>(k - lo)];
    slot = slot + b.coefficients()[static_cast<std::size_t>(k - b.first())];
  }
  return LaurentSeries<R>(lo, std::move(out), trunc, a.zero());
}

template <class R>
LaurentSeries<R> ls_neg(const LaurentSeries<R>& a) {
  std::vector<R> out;
  out.reserve(a.coefficients().size());
  for (const auto& c : a.coefficients()) out.push_back(-c);
  return LaurentSeries<R>(a.first(), std::move(out), a.truncation_order(), a.zero());
}

template <class R>
LaurentSeries<R> ls_sub(const LaurentSeries<R>& a, const LaurentSeries<R>& b) {
  return ls_add(a, ls_neg(b));
}

// Cauchy product. With a scalar series on the left and a module-valued series
// on the right this is the module action; with equal types it is the ring
// product (order of factors preserved for matrix coefficients).
template <class A, class B>
using product_t = std::conditional_t<std::is_same_v<A, B>, A,
                                     std::decay_t<decltype(std::declval<A>() * std::declval<B>())>>;

template <class A, class B>
auto ls_mul(const LaurentSeries<A>& a, const LaurentSeries<B>& b) -> LaurentSeries<product_t<A, B>> {
  using C = product_t<A, B>;
  detail::require_compatible(a.zero(), b.zero());
  const Order trunc = min(a.truncation_order() + detail::effective_degree(b),
                          b.truncation_order() + detail::effective_degree(a));
  const C zero = a.zero() * b.zero();
  if (a.is_zero() || b.is_zero()) return LaurentSeries<C>(zero, trunc);
  const auto& ca = a.coefficients();
  const auto& cb = b.coefficients();
  std::size_t n = ca.size() + cb.size() - 1;
  if (trunc.is_finite()) {
    const long room = static_cast<long>(trunc.value()) - (a.first() + b.first());
    if (room <= 0) return LaurentSeries<C>(zero, trunc);
    n = std::min(n, static_cast<std::size_t>(room));
  }
  std::vector<C> out(n, zero);
  for (std::size_t i = 0; i < ca.size() && i < n; ++i) {
    if (RingTraits<A>::is_zero(ca[i])) continue;
    for (std::size_t j = 0; j < cb.size() && i + j < n; ++j) out[i + j] = out[i + j] + ca[i] * cb[j];
  }
  return LaurentSeries<C>(a.first() + b.first(), std::move(out), trunc, zero);
}

// Multiplicative inverse, retaining exponents <= max_exponent (and no more
// than the input precision supports).
template <class R>
LaurentSeries<R> ls_invert(const LaurentSeries<R>& a, int max_exponent) {
  if constexpr (!InvertibleRing<R>) {
    throw Error(ErrorCode::unsupported, "series inversion needs a field of coefficients");
  } else {
    if (a.is_zero()) throw Error(ErrorCode::not_invertible, "the zero series is not invertible");
    const int k = a.first();
    Order trunc = Order(max_exponent + 1);
    if (a.truncation_order().is_finite())
      trunc = min(trunc, Order(-k + (a.truncation_order().value() - k)));
    const long count = static_cast<long>(trunc.value()) + k;
    if (count <= 0) return LaurentSeries<R>(a.zero(), trunc);
    const auto& ca = a.coefficients();
    const R inv0 = RingTraits<R>::invert(ca.front());
    std::vector<R> b;
    b.reserve(static_cast<std::size_t>(count));
    b.push_back(inv0);
    for (long j = 1; j < count; ++j) {
      R acc = a.zero();
      for (long i = 1; i <= j && i < static_cast<long>(ca.size()); ++i)
        acc = acc + ca[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j - i)];
      b.push_back(-(inv0 * acc));
    }
    return LaurentSeries<R>(-k, std::move(b), trunc, a.zero());
  }
}

// Drops exponents > n.
template <class R>
LaurentSeries<R> ls_truncate(const LaurentSeries<R>& a, int n) {
  return LaurentSeries<R>(a.first(), a.coefficients(), min(a.truncation_order(), Order(n + 1)), a.zero());
}

// Multiplication by lambda^s.
template <class R>
LaurentSeries<R> ls_shift(const LaurentSeries<R>& a, int s) {
  const Order trunc = a.truncation_order() + Order(s);
  return LaurentSeries<R>(a.first() + s, a.coefficients(), trunc, a.zero());
}

template <class R, class F>
auto ls_map(const LaurentSeries<R>& a, F&& f) -> LaurentSeries<std::decay_t<std::invoke_result_t<F, const R&>>> {
  using C = std::decay_t<std::invoke_result_t<F, const R&>>;
  std::vector<C> out;
  out.reserve(a.coefficients().size());
  for (const auto& c : a.coefficients()) out.push_back(f(c));
  return LaurentSeries<C>(a.first(), std::move(out), a.truncation_order(), f(a.zero()));
}

// Sum of the known coefficients times x^k.
template <class R, class S>
R ls_evaluate(const LaurentSeries<R>& a, const S& x) {
  R acc = a.zero();
  if (a.is_zero()) return acc;
  S p = S{1};
  const int k0 = a.first();
  if (k0 >= 0) {
    for (int i = 0; i < k0; ++i) p = p * x;
  } else {
    const S inv = S{1} / x;
    for (int i = 0; i < -k0; ++i) p = p * inv;
  }
  for (const auto& c : a.coefficients()) {
    acc = acc + c * p;
    p = p * x;
  }
  return acc;
}

template <class R>
LaurentSeries<R> operator+(const LaurentSeries<R>& a, const LaurentSeries<R>& b) { return ls_add(a, b); }
template <class R>
LaurentSeries<R> operator-(const LaurentSeries<R>& a, const LaurentSeries<R>& b) { return ls_sub(a, b); }
template <class R>
LaurentSeries<R> operator-(const LaurentSeries<R>& a) { return ls_neg(a); }
template <class A, class B>
auto operator*(const LaurentSeries<A>& a, const LaurentSeries<B>& b) { return ls_mul(a, b); }

template <class R>
class LaurentPolynomial {
 public:
  explicit LaurentPolynomial(R zero_like = R{}) : zero_(RingTraits<R>::zero_like(zero_like)) {}

  LaurentPolynomial(int lo, std::vector<R> coeffs) : lo_(lo), coeffs_(std::move(coeffs)) {
    zero_ = coeffs_.empty() ? R{} : RingTraits<R>::zero_like(coeffs_.front());
    while (!coeffs_.empty() && RingTraits<R>::is_zero(coeffs_.back())) coeffs_.pop_back();
    std::size_t lead = 0;
    while (lead < coeffs_.size() && RingTraits<R>::is_zero(coeffs_[lead])) ++lead;
    coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<long>(lead));
    lo_ = coeffs_.empty() ? 0 : lo_ + static_cast<int>(lead);
  }

  explicit LaurentPolynomial(const LaurentSeries<R>& s) : LaurentPolynomial(s.first(), s.coefficients()) {
    if (!s.is_exact())
      throw Error(ErrorCode::unsupported, "a truncated series is not a Laurent polynomial");
  }

  bool is_zero() const { return coeffs_.empty(); }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<R>& coefficients() const { return coeffs_; }

  R coeff(int k) const {
    if (coeffs_.empty() || k < lo_ || k > hi()) return zero_;
    return coeffs_[static_cast<std::size_t>(k - lo_)];
  }

  std::pair<Order, Order> bidegree() const {
    if (coeffs_.empty()) return {Order::infinity(), Order::infinity()};
    return {Order(lo()), Order(hi())};
  }

  LaurentSeries<R> to_series() const { return LaurentSeries<R>(lo_, coeffs_, Order::infinity(), zero_); }

  friend bool operator==(const LaurentPolynomial& a, const LaurentPolynomial& b) {
    return a.coeffs_ == b.coeffs_ && (a.coeffs_.empty() || a.lo_ == b.lo_);
  }

 private:
  int lo_ = 0;
  std::vector<R> coeffs_;
  R zero_{};
};

template <class R>
std::pair<Order, Order> lp_bidegree(const LaurentPolynomial<R>& p) {
  return p.bidegree();
}

}  // namespace sgk

#endif  // SGK_SERIES_HPP
