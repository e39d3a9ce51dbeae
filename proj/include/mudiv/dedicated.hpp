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

// Dedicated feedback: every one of the K feedback users reports L_fb bits on
// orthogonal uplink symbols each block, costing K L_fb / log2(1+P) symbols.
// FDD charges that to the uplink rate, TDD to the downlink data time.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "mudiv/channel.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/mc.hpp"
#include "mudiv/muvdiv.hpp"
#include "mudiv/specfun.hpp"

namespace mudiv {

enum class Duplex { FDD, TDD };

constexpr std::string_view to_string(Duplex d) { return d == Duplex::FDD ? "fdd" : "tdd"; }

struct SystemParams {
  double p = 1.0;               // average SNR, linear
  std::uint64_t t_check = 100;  // downlink resource blocklength W_c T_c, symbols
  std::uint64_t l_fb = 5;       // feedback bits per user
  double lambda_r = 0.5;        // downlink rate weight (FDD)
  std::uint64_t k_total = 75;   // users in the cell

  /// Throws DomainError on any field outside its range.
  void validate() const {
    if (!(p > 0)) throw DomainError("SystemParams: p must be > 0");
    if (t_check < 1) throw DomainError("SystemParams: blocklength must be >= 1");
    if (l_fb < 1) throw DomainError("SystemParams: l_fb must be >= 1");
    if (!(lambda_r >= 0)) throw DomainError("SystemParams: lambda_r must be >= 0");
    if (k_total < 1) throw DomainError("SystemParams: k_total must be >= 1");
    if (!(t_eff() > 1)) throw DomainError("SystemParams: effective blocklength must exceed 1");
  }

  /// T = T_check / L_fb.
  double t_eff() const { return static_cast<double>(t_check) / static_cast<double>(l_fb); }

  /// Uplink AWGN spectral efficiency log2(1 + P).
  double uplink_capacity() const { return std::log2(1.0 + p); }

  /// T log2(1 + P): the number of feedback users that would consume the whole block.
  double t1() const { return t_eff() * uplink_capacity(); }

  /// Largest k whose feedback still fits in the block (zero data bandwidth allowed).
  std::uint64_t k_exhaust() const {
    return static_cast<std::uint64_t>(std::floor(t1() * (1.0 + 1e-12)));
  }

  /// Optimizer domain upper end: data bandwidth strictly positive, at most k_total.
  std::uint64_t k_max() const {
    const std::uint64_t ke = k_exhaust();
    const std::uint64_t strict = ke >= 1 ? ke - 1 : 0;
    return std::min(k_total, strict);
  }
};

enum class OptMethod { ExactScan, LambertApprox };

constexpr std::string_view to_string(OptMethod m) {
  return m == OptMethod::ExactScan ? "exact_scan" : "lambert_approx";
}

enum class ScanMode {
  EarlyExit,  // stop at the first non-increase; valid for concave objectives
  FullScan,
};

struct OptResult {
  std::uint64_t k_star = 1;
  std::optional<std::uint64_t> n_star;
  double value = 0;
  OptMethod method = OptMethod::ExactScan;
  std::uint64_t k_min = 1;
  std::uint64_t k_max = 1;
  /// Unrounded optimizer for closed-form approximants, NaN for scans.
  double k_continuous = std::numeric_limits<double>::quiet_NaN();
};

struct RateEntry {
  std::uint64_t k;
  double r_d;
  double r_u;  // zero in TDD
  double objective;
};

struct RateCurve {
  std::vector<RateEntry> entries;
  SpectralEfficiencyMethod method;
  Duplex duplex;
};

/// Spectral efficiency as a function of the number of feedback users.
using SpectralCurve = std::function<double(std::uint64_t)>;

inline SpectralCurve spectral_curve(double p, SpectralEfficiencyMethod method) {
  return [p, method](std::uint64_t k) { return c_df(k, p, method); };
}

/// Curve backed by a Monte Carlo table indexed k = 1..table.size().
inline SpectralCurve spectral_curve(std::vector<McEstimate> table) {
  return [table = std::move(table)](std::uint64_t k) {
    if (k < 1 || k > table.size()) throw RangeError("spectral_curve: k outside Monte Carlo table");
    return table[k - 1].mean;
  };
}

/// Integer argmax of f over [k_min, k_max]; ties go to the smaller k.
template <class Objective>
OptResult argmax_scan(std::uint64_t k_min, std::uint64_t k_max, Objective&& f,
                      ScanMode mode = ScanMode::FullScan) {
  if (k_max < k_min) throw InfeasibleError("argmax_scan: empty feasible range");
  OptResult r;
  r.k_min = k_min;
  r.k_max = k_max;
  r.method = OptMethod::ExactScan;
  r.k_star = k_min;
  r.value = f(k_min);
  for (std::uint64_t k = k_min + 1; k <= k_max; ++k) {
    const double v = f(k);
    if (v > r.value) {
      r.value = v;
      r.k_star = k;
    } else if (mode == ScanMode::EarlyExit) {
      break;
    }
  }
  return r;
}

namespace detail {

// Rounds a continuous optimizer to the better of floor/ceil under `f`,
// clamped to [k_min, k_max].
template <class Objective>
OptResult round_continuous(double k_cont, std::uint64_t k_min, std::uint64_t k_max, Objective&& f) {
  if (k_max < k_min) throw InfeasibleError("round_continuous: empty feasible range");
  auto clamp = [&](double x) {
    if (!(x >= static_cast<double>(k_min))) return k_min;
    if (x >= static_cast<double>(k_max)) return k_max;
    return static_cast<std::uint64_t>(x);
  };
  const std::uint64_t lo = clamp(std::floor(k_cont));
  const std::uint64_t hi = clamp(std::ceil(k_cont));
  OptResult r;
  r.k_min = k_min;
  r.k_max = k_max;
  r.method = OptMethod::LambertApprox;
  r.k_continuous = k_cont;
  const double v_lo = f(lo);
  const double v_hi = hi == lo ? v_lo : f(hi);
  if (v_hi > v_lo) {
    r.k_star = hi;
    r.value = v_hi;
  } else {
    r.k_star = lo;
    r.value = v_lo;
  }
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// FDD

/// R_U(k) = log2(1 + P) - k / T.
inline double fdd_uplink_rate(const SystemParams& params, std::uint64_t k) {
  if (k > params.k_exhaust())
    throw InfeasibleError("fdd_uplink_rate: feedback exceeds the uplink block");
  return params.uplink_capacity() - static_cast<double>(k) / params.t_eff();
}

inline double fdd_weighted_objective(const SystemParams& params, std::uint64_t k, const SpectralCurve& c) {
  return params.lambda_r * c(k) + fdd_uplink_rate(params, k);
}

/// lambda_R C_df(k) + R_U(k).
inline double fdd_weighted_objective(const SystemParams& params, std::uint64_t k,
                                     SpectralEfficiencyMethod method) {
  return fdd_weighted_objective(params, k, spectral_curve(params.p, method));
}

inline OptResult fdd_optimize_exact(const SystemParams& params, const SpectralCurve& c,
                                    ScanMode mode = ScanMode::EarlyExit) {
  params.validate();
  return argmax_scan(1, params.k_max(), [&](std::uint64_t k) { return fdd_weighted_objective(params, k, c); },
                     mode);
}

inline OptResult fdd_optimize_exact(const SystemParams& params,
                                    SpectralEfficiencyMethod method = SpectralEfficiencyMethod::Quadrature,
                                    ScanMode mode = ScanMode::EarlyExit) {
  return fdd_optimize_exact(params, spectral_curve(params.p, method), mode);
}

inline RateCurve fdd_rate_curve(const SystemParams& params, SpectralEfficiencyMethod method) {
  params.validate();
  RateCurve curve{{}, method, Duplex::FDD};
  for (std::uint64_t k = 1; k <= params.k_max(); ++k) {
    const double rd = c_df(k, params.p, method);
    const double ru = fdd_uplink_rate(params, k);
    curve.entries.push_back({k, rd, ru, params.lambda_r * rd + ru});
  }
  return curve;
}

enum class RateUnit { Bits, Nats };

/// lambda_R log(1 + P log k) + log2(1 + P) - k/T. With RateUnit::Nats the
/// first logarithm is natural; that is the objective whose stationarity
/// condition K (1/P + log K) = lambda_R T the Lambert-W formula solves.
inline double fdd_surrogate_objective(const SystemParams& params, std::uint64_t k,
                                      RateUnit unit = RateUnit::Nats) {
  const double gain = std::log1p(params.p * std::log(static_cast<double>(k)));
  const double scale = unit == RateUnit::Bits ? std::numbers::log2e : 1.0;
  return params.lambda_r * scale * gain + fdd_uplink_rate(params, k);
}

inline OptResult fdd_surrogate_optimize(const SystemParams& params, RateUnit unit = RateUnit::Nats) {
  params.validate();
  return argmax_scan(1, params.k_max(), [&](std::uint64_t k) { return fdd_surrogate_objective(params, k, unit); },
                     ScanMode::FullScan);
}

/// Continuous K_ap = lambda_R T / W(e^{1/P} lambda_R T).
inline double fdd_lambert_k(const SystemParams& params) {
  const double lt = params.lambda_r * params.t_eff();
  if (!(lt > 0)) throw DomainError("fdd_k_ap: lambda_r * T must be > 0");
  return lt / lambert_w(std::exp(1.0 / params.p) * lt);
}

/// The same, with the two-term asymptotic W in place of the exact one.
inline double fdd_lambert_k_asymptotic(const SystemParams& params) {
  const double lt = params.lambda_r * params.t_eff();
  if (!(lt > 0)) throw DomainError("fdd_k_ap: lambda_r * T must be > 0");
  const double a = 1.0 / params.p + std::log(lt);
  return lt / (a - std::log(a));
}

inline OptResult fdd_k_ap(const SystemParams& params) {
  params.validate();
  return detail::round_continuous(fdd_lambert_k(params), 1, params.k_max(),
                                  [&](std::uint64_t k) { return fdd_surrogate_objective(params, k); });
}

// ---------------------------------------------------------------------------
// TDD

/// (1 - k / (T log2(1 + P))) * C_df(k).
inline double tdd_downlink_rate(const SystemParams& params, std::uint64_t k, const SpectralCurve& c) {
  if (k > params.k_exhaust())
    throw InfeasibleError("tdd_downlink_rate: feedback exceeds the block");
  const double w = 1.0 - static_cast<double>(k) / params.t1();
  if (w <= 0) return 0.0;
  return w * c(k);
}

inline double tdd_downlink_rate(const SystemParams& params, std::uint64_t k, SpectralEfficiencyMethod method) {
  return tdd_downlink_rate(params, k, spectral_curve(params.p, method));
}

inline OptResult tdd_optimize_exact(const SystemParams& params, const SpectralCurve& c,
                                    ScanMode mode = ScanMode::EarlyExit) {
  params.validate();
  return argmax_scan(1, params.k_max(), [&](std::uint64_t k) { return tdd_downlink_rate(params, k, c); }, mode);
}

inline OptResult tdd_optimize_exact(const SystemParams& params,
                                    SpectralEfficiencyMethod method = SpectralEfficiencyMethod::Quadrature,
                                    ScanMode mode = ScanMode::EarlyExit) {
  return tdd_optimize_exact(params, spectral_curve(params.p, method), mode);
}

inline RateCurve tdd_rate_curve(const SystemParams& params, SpectralEfficiencyMethod method) {
  params.validate();
  RateCurve curve{{}, method, Duplex::TDD};
  for (std::uint64_t k = 1; k <= params.k_max(); ++k) {
    const double rd = tdd_downlink_rate(params, k, method);
    curve.entries.push_back({k, rd, 0.0, rd});
  }
  return curve;
}

/// (1 - k/T_1) log2(1 + P log k); the base of the logarithm does not move the argmax.
inline double tdd_surrogate_objective(const SystemParams& params, std::uint64_t k) {
  return (1.0 - static_cast<double>(k) / params.t1()) * c_df_approx(k, params.p);
}

inline OptResult tdd_surrogate_optimize(const SystemParams& params) {
  params.validate();
  return argmax_scan(1, params.k_max(), [&](std::uint64_t k) { return tdd_surrogate_objective(params, k); },
                     ScanMode::FullScan);
}

/// Intermediate values of the two-stage TDD approximant.
struct TddLambertTrace {
  double t1;  // T log2(1 + P)
  double k1;  // first-order root of K log(bK) = T_1
  double t2;  // (T_1 - K_1) / log(1 + P log K_1)
  double k_ap;
};

/// K_1 = T_1 / W(e^{1/P} T_1), T_2 = (T_1 - K_1) / log(1 + P log K_1),
/// K_ap = T_2 / W(e^{1/P} T_2).
inline TddLambertTrace tdd_lambert_trace(const SystemParams& params) {
  const double t1 = params.t1();
  if (!(t1 > std::numbers::e)) throw DomainError("tdd_k_ap: T log2(1+P) must exceed e");
  const double b = std::exp(1.0 / params.p);
  const double k1 = t1 / lambert_w(b * t1);
  const double t2 = (t1 - k1) / std::log1p(params.p * std::log(k1));
  if (!(t2 > 0)) throw DomainError("tdd_k_ap: second-stage blocklength is not positive");
  return {t1, k1, t2, t2 / lambert_w(b * t2)};
}

inline OptResult tdd_k_ap(const SystemParams& params) {
  params.validate();
  return detail::round_continuous(tdd_lambert_trace(params).k_ap, 1, params.k_max(),
                                  [&](std::uint64_t k) { return tdd_surrogate_objective(params, k); });
}

// ---------------------------------------------------------------------------
// Multiantenna (TDD accounting)

struct MimoResult {
  OptResult scan;         // argmax of the Gaussian-max downlink rate
  OptResult closed_form;  // two-stage Lambert expression
  GaussianMi gauss;
  double k1;     // first-stage root
  double log_b;  // log B = 0.5 (1 + (mu/sigma) sqrt(2 log K_1))
};

/// (1 - k/T_1)(mu + sigma sqrt(2 log k)).
inline double mimo_approx_rate(const SystemParams& params, const GaussianMi& g, std::uint64_t k) {
  return (1.0 - static_cast<double>(k) / params.t1()) * gaussian_max_mean(g.mu, g.sigma2, k);
}

/// Both approximations of the MIMO optimum for an explicit Gaussian model.
inline MimoResult mimo_optimize(const SystemParams& params, const GaussianMi& g) {
  params.validate();
  const std::uint64_t k_max = params.k_max();
  auto rate = [&](std::uint64_t k) { return mimo_approx_rate(params, g, k); };
  MimoResult r{argmax_scan(1, k_max, rate, ScanMode::FullScan), {}, g, 0, 0};
  const double half = params.t1() / 2;
  r.k1 = half / lambert_w(half);
  const double sigma = std::sqrt(g.sigma2);
  if (sigma > 0) {
    r.log_b = 0.5 * (1.0 + g.mu / sigma * std::sqrt(2.0 * std::log(r.k1)));
    const double x = std::exp(r.log_b) * half;
    r.closed_form = detail::round_continuous(half / lambert_w(x), 1, k_max, rate);
  } else {
    // No spread, no diversity: the closed form degenerates to K -> 0.
    r.log_b = std::numeric_limits<double>::infinity();
    r.closed_form = detail::round_continuous(0.0, 1, k_max, rate);
  }
  return r;
}

inline MimoResult mimo_optimize(const SystemParams& params, unsigned n) {
  return mimo_optimize(params, mimo_mi_gaussian_params(n, params.p));
}

/// argmax of (1 - k/T_1) E[max_i C_i] with the expectation by Monte Carlo
/// over i.i.d. n x n channels.
inline OptResult mimo_optimize_mc(const SystemParams& params, unsigned n, const McConfig& mc) {
  params.validate();
  const auto table = scheduled_rate_curve_mc(FadingConfig::mimo(n, params.p), params.k_max(), mc);
  return tdd_optimize_exact(params, spectral_curve(table), ScanMode::FullScan);
}

/// (1 - k/T_1) log2(1 + P b_k).
inline double simo_approx_rate(const SystemParams& params, unsigned n_r, std::uint64_t k) {
  return (1.0 - static_cast<double>(k) / params.t1()) * std::log2(1.0 + params.p * simo_growth_rate(k, n_r).b_k);
}

/// Numeric argmax of the growth-rate downlink rate over k >= 2 (the growth
/// rate is undefined for a single user).
inline OptResult simo_optimize(const SystemParams& params, unsigned n_r) {
  params.validate();
  return argmax_scan(2, params.k_max(), [&](std::uint64_t k) { return simo_approx_rate(params, n_r, k); },
                     ScanMode::FullScan);
}

/// argmax of (1 - k/T_1) E[log2(1 + P max_i gamma_i)], gamma_i ~ Gamma(n_r, 1), by Monte Carlo.
inline OptResult simo_optimize_mc(const SystemParams& params, unsigned n_r, const McConfig& mc) {
  params.validate();
  const auto table = scheduled_rate_curve_mc(FadingConfig::simo(n_r, params.p), params.k_max(), mc);
  return tdd_optimize_exact(params, spectral_curve(table), ScanMode::FullScan);
}

}  // namespace mudiv
