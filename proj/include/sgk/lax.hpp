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

// The sinh-Gordon Lax connection, the reflection matrix K and the boundary
// identities tying them together. Templates work over exact scalars
// (Rational, GaussRational) as well as std::complex<double>.

#ifndef SGK_LAX_HPP
#define SGK_LAX_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sgk/rational.hpp"
#include "sgk/series.hpp"

namespace sgk {

using Complex = std::complex<double>;

template <class T>
struct Mat2 {
  T a11{}, a12{}, a21{}, a22{};

  static Mat2 identity() { return {T(1), T(0), T(0), T(1)}; }

  T trace() const { return a11 + a22; }
  T det() const { return a11 * a22 - a12 * a21; }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }

  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Mat2 operator-(const Mat2& a) { return {-a.a11, -a.a12, -a.a21, -a.a22}; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Mat2 operator*(const T& s, const Mat2& a) { return {s * a.a11, s * a.a12, s * a.a21, s * a.a22}; }
  friend Mat2 operator*(const Mat2& a, const T& s) { return s * a; }
  friend bool operator==(const Mat2& a, const Mat2& b) {
    return a.a11 == b.a11 && a.a12 == b.a12 && a.a21 == b.a21 && a.a22 == b.a22;
  }
};

using CMat2 = Mat2<Complex>;

inline Rational conj(const Rational& q) { return q; }

template <class T>
Mat2<T> conj(const Mat2<T>& m) {
  using sgk::conj;
  using std::conj;
  return {T(conj(m.a11)), T(conj(m.a12)), T(conj(m.a21)), T(conj(m.a22))};
}

// Max absolute entry.
inline double max_norm(const CMat2& m) {
  return std::max({std::abs(m.a11), std::abs(m.a12), std::abs(m.a21), std::abs(m.a22)});
}

template <class T>
bool is_exact_zero(const Mat2<T>& m) {
  return RingTraits<T>::is_zero(m.a11) && RingTraits<T>::is_zero(m.a12) && RingTraits<T>::is_zero(m.a21) &&
         RingTraits<T>::is_zero(m.a22);
}

template <class T>
struct RingTraits<Mat2<T>> {
  static Mat2<T> zero_like(const Mat2<T>&) { return {}; }
  static bool is_zero(const Mat2<T>& m) { return is_exact_zero(m); }
  static bool compatible(const Mat2<T>&, const Mat2<T>&) { return true; }
};

template <class T>
Mat2<T> sigma0() { return {T(1), T(0), T(0), T(-1)}; }
template <class T>
Mat2<T> sigma_plus() { return {T(0), T(1), T(0), T(0)}; }
template <class T>
Mat2<T> sigma_minus() { return {T(0), T(0), T(1), T(0)}; }

struct LaxPoint {
  Complex omega = 0.0;
  Complex omega_z = 0.0;
  Complex omega_zbar = 0.0;
  Complex lambda = 1.0;
  Complex gamma = 1.0;
};

struct LaxPair {
  CMat2 alpha_z;
  CMat2 alpha_zbar;
};

LaxPair lax_connection(const LaxPoint& p);

// alpha_x = alpha_z + alpha_zbar written through omega_y.
CMat2 lax_real_part(const LaxPoint& p, double omega_y);

template <class T>
struct KMatrixT {
  T A{};
  T B{};
};
using KMatrix = KMatrixT<double>;

namespace detail {
template <class T>
void require_nonzero(const T& lambda, const T& gamma) {
  if (RingTraits<T>::is_zero(lambda) || RingTraits<T>::is_zero(gamma))
    throw Error(ErrorCode::parameter_domain, "spectral and torsion parameters must be nonzero");
}
}  // namespace detail

template <class T, class S>
Mat2<S> k_matrix(const KMatrixT<T>& km, const S& lambda, const S& gamma) {
  detail::require_nonzero(lambda, gamma);
  const S A(km.A), B(km.B), four(4);
  const S off = lambda / gamma - gamma / lambda;
  return {four * A * gamma - four * B * lambda, off, off, four * A / gamma - four * B / lambda};
}

template <class T, class S>
S k_det(const KMatrixT<T>& km, const S& lambda, const S& gamma) {
  return k_matrix(km, lambda, gamma).det();
}

template <class S>
struct KIdentityResiduals {
  Mat2<S> inverse_product;  // K(1/l,1/g) K(l,g) - D Id
  Mat2<S> conjugate_product;  // conj(K(1/conj l, 1/conj g)) K(l,g) - D Id
  S det_symmetry{};  // D(l,g) - D(1/l,1/g)
};

template <class T, class S>
KIdentityResiduals<S> k_identities_check(const KMatrixT<T>& km, const S& lambda, const S& gamma) {
  using sgk::conj;
  using std::conj;
  const Mat2<S> K = k_matrix(km, lambda, gamma);
  const S D = K.det();
  if (RingTraits<S>::is_zero(D)) {
    std::ostringstream os;
    os << "det K vanishes at lambda=" << lambda << ", gamma=" << gamma;
    throw Error(ErrorCode::singular_k, os.str());
  }
  const S one(1);
  const Mat2<S> DI = D * Mat2<S>::identity();
  KIdentityResiduals<S> r;
  const S il = one / lambda, ig = one / gamma;
  const S icl = one / S(conj(lambda)), icg = one / S(conj(gamma));
  r.inverse_product = k_matrix(km, il, ig) * K - DI;
  r.conjugate_product = conj(k_matrix(km, icl, icg)) * K - DI;
  r.det_symmetry = D - k_det(km, il, ig);
  return r;
}

// max |entry| over the Sklyanin relation K a_x(l,g) - a_x(1/l,1/g) K.
double sklyanin_lax_residual(const KMatrix& km, const LaxPoint& p, double omega_y);

// Conjugation by diag(gamma^{-1/2}, gamma^{1/2}): maps the gamma = 1 object
// at lambda/gamma to the gamma object at lambda.
CMat2 gauge_transform(const CMat2& m, Complex gamma);
std::function<CMat2(Complex)> gauge_transform(std::function<CMat2(Complex)> at_unit_gamma, Complex gamma);
// Series form: coefficient m is scaled by gamma^{-m} before conjugation.
LaurentSeries<CMat2> gauge_transform(const LaurentSeries<CMat2>& phi, Complex gamma);

// count-th roots of unity with |D(lambda, gamma)| above a cutoff on every
// listed K-matrix; throws ErrorCode::sample_set when nothing survives.
std::vector<Complex> default_lambda_samples(const std::vector<KMatrix>& kms, Complex gamma, int count = 8);

}  // namespace sgk

#endif  // SGK_LAX_HPP
