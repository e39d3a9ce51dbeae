// Copyright 2026 The mudiv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Multiuser-diversity benefit: spectral efficiency of the scheduled user,
// C_df(K) = E[log2(1 + P max_i gamma_i)], its bounds, and the approximations
// used in the multiantenna analysis.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "mudiv/errors.hpp"
#include "mudiv/specfun.hpp"

namespace mudiv {

enum class SpectralEfficiencyMethod {
  ClosedFormAlternatingSum,
  Quadrature,
  ApproxLogLog,
  GaussianMaxApprox,
  SimoGrowthRate,
};

constexpr std::string_view to_string(SpectralEfficiencyMethod m) {
  switch (m) {
    case SpectralEfficiencyMethod::ClosedFormAlternatingSum: return "closed_form";
    case SpectralEfficiencyMethod::Quadrature: return "quadrature";
    case SpectralEfficiencyMethod::ApproxLogLog: return "approx_loglog";
    case SpectralEfficiencyMethod::GaussianMaxApprox: return "gaussian_max";
    case SpectralEfficiencyMethod::SimoGrowthRate: return "simo_growth_rate";
  }
  return "unknown";
}

/// Largest K for which the alternating binomial sum keeps ~1e-6 bit accuracy.
inline constexpr std::uint64_t kAlternatingSumMaxK = 30;

/// log2(e) * sum_{j=1}^k C(k,j) (-1)^{j+1} e^{j/p} E1(j/p), in long double.
///
/// The terms grow like 2^k while the sum stays O(log log k); beyond
/// kAlternatingSumMaxK the cancellation eats the result, and the function
/// throws RangeError instead of returning noise.
inline double c_df_closed_form(std::uint64_t k, double p) {
  if (k < 1) throw DomainError("c_df_closed_form: k must be >= 1");
  if (!(p > 0)) throw DomainError("c_df_closed_form: p must be > 0");
  if (k > kAlternatingSumMaxK) throw RangeError("c_df_closed_form: k above alternating-sum limit");
  long double sum = 0;
  long double binom = 1;  // C(k, j)
  for (std::uint64_t j = 1; j <= k; ++j) {
    binom = binom * static_cast<long double>(k - j + 1) / static_cast<long double>(j);
    const long double term =
        binom * exp_integral_e1_scaled(static_cast<long double>(j) / static_cast<long double>(p));
    sum += (j % 2 == 1) ? term : -term;
  }
  return static_cast<double>(sum * std::numbers::log2e_v<long double>);
}

/// C_df(k) by quadrature, valid for any k.
///
/// With u = 1 - e^{-x} the maximum has CDF u^k; writing u^k = e^{-s} turns
/// the expectation into int_0^inf log2(1 + p x(s)) e^{-s} ds with
/// x(s) = -log(1 - e^{-s/k}), which is smooth except for an integrable
/// log-log singularity at s = 0. exp_sinh handles both the singularity and
/// the infinite range; the mass no longer moves with k.
inline double c_df_quadrature(std::uint64_t k, double p) {
  if (k < 1) throw DomainError("c_df_quadrature: k must be >= 1");
  if (!(p > 0)) throw DomainError("c_df_quadrature: p must be > 0");
  const double kd = static_cast<double>(k);
  auto integrand = [&](double s) {
    const double x = -std::log(-std::expm1(-s / kd));
    return std::log1p(p * x) * std::exp(-s);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double nats = integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
  return nats * std::numbers::log2e;
}

struct CdfBounds {
  double lower;
  double upper;
};

/// Large-K sandwich: lower = log2(1 + p(log k - log log log k)) with the o(1)
/// term dropped, upper = log2(1 + p(0.58 + log k)) from Jensen and H_k ~ 0.58 + log k.
inline CdfBounds bounds_c_df(std::uint64_t k, double p) {
  if (k < 3) throw DomainError("bounds_c_df: k must be >= 3");
  if (!(p > 0)) throw DomainError("bounds_c_df: p must be > 0");
  const double lk = std::log(static_cast<double>(k));
  return {std::log2(1.0 + p * (lk - std::log(std::log(lk)))), std::log2(1.0 + p * (0.58 + lk))};
}

/// log2(1 + p log k). Returns 0 at k = 1, where no diversity is available.
inline double c_df_approx(std::uint64_t k, double p) {
  if (k < 1) throw DomainError("c_df_approx: k must be >= 1");
  return std::log2(1.0 + p * std::log(static_cast<double>(k)));
}

/// Dispatch for the SISO spectral-efficiency evaluators.
inline double c_df(std::uint64_t k, double p, SpectralEfficiencyMethod method) {
  switch (method) {
    case SpectralEfficiencyMethod::ClosedFormAlternatingSum: return c_df_closed_form(k, p);
    case SpectralEfficiencyMethod::Quadrature: return c_df_quadrature(k, p);
    case SpectralEfficiencyMethod::ApproxLogLog: return c_df_approx(k, p);
    default: throw DomainError("c_df: method needs antenna parameters");
  }
}

/// Gaussian model of the V-BLAST mutual information of an n x n i.i.d. channel.
struct GaussianMi {
  double mu;
  double sigma2;
  /// False for p <= e, where mu <= 0 and the high-SNR model is meaningless.
  bool high_snr_regime;
};

/// mu = n log2(p/e), sigma^2 = (log2 e)^2 (log n + 1.58).
inline GaussianMi mimo_mi_gaussian_params(unsigned n, double p) {
  if (n < 1) throw DomainError("mimo_mi_gaussian_params: n must be >= 1");
  if (!(p > 0)) throw DomainError("mimo_mi_gaussian_params: p must be > 0");
  constexpr double l2e = std::numbers::log2e;
  return {n * std::log2(p / std::numbers::e), l2e * l2e * (std::log(static_cast<double>(n)) + 1.58),
          p > std::numbers::e};
}

/// Extreme-value mean of k i.i.d. N(mu, sigma2): mu + sigma sqrt(2 log k).
/// At k = 1 this is mu, the exact mean of a single draw.
inline double gaussian_max_mean(double mu, double sigma2, std::uint64_t k) {
  if (k < 1) throw DomainError("gaussian_max_mean: k must be >= 1");
  if (sigma2 < 0) throw DomainError("gaussian_max_mean: sigma2 must be >= 0");
  return mu + std::sqrt(sigma2) * std::sqrt(2.0 * std::log(static_cast<double>(k)));
}

struct GrowthRate {
  double b_k;
  double c_k;
  unsigned n_r;
};

/// Growth rate b_K of the maximum of K i.i.d. Gamma(n_r, 1) variables.
///
/// c_K is the first-order root of b = log K + (n_r - 1) log b - log (n_r-1)!,
/// obtained from the two-term expansion of W_{-1}; b_K then re-enters the
/// truncated exponential series once: b_K = log K + log sum_{j<n_r} c_K^j / j!.
inline GrowthRate simo_growth_rate(std::uint64_t k, unsigned n_r) {
  if (k < 2) throw DomainError("simo_growth_rate: k must be >= 2");
  if (n_r < 1) throw DomainError("simo_growth_rate: n_r must be >= 1");
  const double lk = std::log(static_cast<double>(k));
  if (n_r == 1) return {lk, lk, 1};
  const double m = n_r - 1.0;
  const double log_fact = std::lgamma(m + 1.0);  // log (n_r - 1)!
  const double inner = lk + m * std::log(m) - log_fact;
  if (!(inner > 0)) throw DomainError("simo_growth_rate: k too small for the expansion");
  const double c = lk + m * std::log(inner) - log_fact;
  double series = 0;
  double term = 1;
  for (unsigned j = 0; j < n_r; ++j) {
    if (j > 0) term *= c / j;
    series += term;
  }
  if (!(series > 0)) throw DomainError("simo_growth_rate: nonpositive series");
  return {lk + std::log(series), c, n_r};
}

}  // namespace mudiv
