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

#include "sgk/lax.hpp"

#include <numbers>

namespace sgk {
namespace {

constexpr Complex kI{0.0, 1.0};

void check_point(const LaxPoint& p) {
  if (p.lambda == 0.0 || p.gamma == 0.0)
    throw Error(ErrorCode::parameter_domain, "spectral and torsion parameters must be nonzero");
}

}  // namespace

LaxPair lax_connection(const LaxPoint& p) {
  check_point(p);
  const Complex ew = std::exp(p.omega), emw = std::exp(-p.omega);
  const CMat2 s0 = sigma0<Complex>(), sp = sigma_plus<Complex>(), sm = sigma_minus<Complex>();
  LaxPair out;
  out.alpha_z = (0.5 * p.omega_z) * s0 + (kI / (4.0 * p.lambda) * ew) * sp + (kI * p.gamma / 4.0 * emw) * sm;
  out.alpha_zbar = (-0.5 * p.omega_zbar) * s0 + (kI / (4.0 * p.gamma) * emw) * sp + (kI * p.lambda / 4.0 * ew) * sm;
  return out;
}

CMat2 lax_real_part(const LaxPoint& p, double omega_y) {
  check_point(p);
  const Complex ew = std::exp(p.omega), emw = std::exp(-p.omega);
  const Complex plus = kI / (4.0 * p.lambda) * ew + kI / (4.0 * p.gamma) * emw;
  const Complex minus = kI * p.gamma / 4.0 * emw + kI * p.lambda / 4.0 * ew;
  return (-0.5 * kI * omega_y) * sigma0<Complex>() + plus * sigma_plus<Complex>() + minus * sigma_minus<Complex>();
}

double sklyanin_lax_residual(const KMatrix& km, const LaxPoint& p, double omega_y) {
  const CMat2 K = k_matrix(km, p.lambda, p.gamma);
  LaxPoint inv = p;
  inv.lambda = 1.0 / p.lambda;
  inv.gamma = 1.0 / p.gamma;
  return max_norm(K * lax_real_part(p, omega_y) - lax_real_part(inv, omega_y) * K);
}

CMat2 gauge_transform(const CMat2& m, Complex gamma) {
  if (std::abs(std::abs(gamma) - 1.0) > 1e-12)
    throw Error(ErrorCode::parameter_domain, "gauge transform needs |gamma| = 1");
  // diag(g^{-1/2}, g^{1/2}) m diag(g^{1/2}, g^{-1/2}); the square roots pair up
  return {m.a11, m.a12 / gamma, m.a21 * gamma, m.a22};
}

std::function<CMat2(Complex)> gauge_transform(std::function<CMat2(Complex)> at_unit_gamma, Complex gamma) {
  if (std::abs(std::abs(gamma) - 1.0) > 1e-12)
    throw Error(ErrorCode::parameter_domain, "gauge transform needs |gamma| = 1");
  return [f = std::move(at_unit_gamma), gamma](Complex lambda) { return gauge_transform(f(lambda / gamma), gamma); };
}

LaurentSeries<CMat2> gauge_transform(const LaurentSeries<CMat2>& phi, Complex gamma) {
  if (std::abs(std::abs(gamma) - 1.0) > 1e-12)
    throw Error(ErrorCode::parameter_domain, "gauge transform needs |gamma| = 1");
  if (phi.is_zero()) return phi;
  std::vector<CMat2> out;
  Complex scale = std::pow(gamma, -phi.first());
  for (const auto& c : phi.coefficients()) {
    out.push_back(gauge_transform(scale * c, gamma));
    scale /= gamma;
  }
  return LaurentSeries<CMat2>(phi.first(), std::move(out), phi.truncation_order(), CMat2{});
}

std::vector<Complex> default_lambda_samples(const std::vector<KMatrix>& kms, Complex gamma, int count) {
  std::vector<Complex> out;
  for (int j = 0; j < count; ++j) {
    const double arg = 2.0 * std::numbers::pi * j / count;
    const Complex lambda = std::polar(1.0, arg);
    bool ok = true;
    for (const auto& km : kms) {
      const double scale = 1.0 + 16.0 * (km.A * km.A + km.B * km.B);
      if (std::abs(k_det(km, lambda, gamma)) <= 1e-10 * scale) ok = false;
    }
    if (ok) out.push_back(lambda);
  }
  if (out.empty()) throw Error(ErrorCode::sample_set, "every lambda sample hits a zero of det K");
  return out;
}

}  // namespace sgk
