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

// SNR-dependent feedback. Users whose SNR clears gamma_th = log(K/N) report
// (L_fb + log2 K) bits in one of N random-access slots; the base station
// schedules the best user among those captured.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "mudiv/capture.hpp"
#include "mudiv/dedicated.hpp"
#include "mudiv/errors.hpp"
#include "mudiv/mc.hpp"
#include "mudiv/rng.hpp"

namespace mudiv {

enum class SumRateVariant {
  Joint,                // P(X >= 1) multiplies downlink and uplink terms
  UplinkUnconditional,  // P(X >= 1) multiplies the downlink term only
};

constexpr std::string_view to_string(SumRateVariant v) {
  return v == SumRateVariant::Joint ? "joint" : "uplink_unconditional";
}

enum class SdfSampler {
  // Draws all K users: SNR, slot, threshold test, collisions.
  FullProcess,
  // Draws L ~ Binom(K, N/K) by inversion, then only the eligible users'
  // slots; the scheduled SNR is gamma_th plus the max of X unit exponentials,
  // drawn by inversion. Same law, cost O(L) per trial, and the inversions
  // keep neighbouring grid points strongly coupled.
  Memoryless,
};

enum class IdBits {
  Continuous,  // log2 K
  Ceil,        // ceil(log2 K), a realizable user index
};

struct SdfOptions {
  SumRateVariant variant = SumRateVariant::Joint;
  SdfSampler sampler = SdfSampler::Memoryless;
  IdBits id_bits = IdBits::Continuous;
};

/// Uplink symbols one feedback slot occupies: (L_fb + log2 K) / log2(1 + P).
inline double sdf_slot_symbols(const SystemParams& params, std::uint64_t k, IdBits bits = IdBits::Continuous) {
  if (k < 1) throw DomainError("sdf_slot_symbols: k must be >= 1");
  double id = std::log2(static_cast<double>(k));
  if (bits == IdBits::Ceil) id = std::ceil(id);
  return (static_cast<double>(params.l_fb) + id) / params.uplink_capacity();
}

/// Fraction of the block spent on N feedback slots.
inline double sdf_feedback_fraction(const SystemParams& params, std::uint64_t k, std::uint64_t n,
                                    IdBits bits = IdBits::Continuous) {
  return sdf_slot_symbols(params, k, bits) * static_cast<double>(n) / static_cast<double>(params.t_check);
}

/// w_data = 1 - ((L_fb + log2 K)/log2(1+P)) N / T_check.
inline double sdf_data_fraction(const SystemParams& params, std::uint64_t k, std::uint64_t n,
                                IdBits bits = IdBits::Continuous) {
  return 1.0 - sdf_feedback_fraction(params, k, n, bits);
}

/// Largest slot count that leaves a positive data fraction (0 if none does).
inline std::uint64_t sdf_n_max(const SystemParams& params, std::uint64_t k, IdBits bits = IdBits::Continuous) {
  const double bound = static_cast<double>(params.t_check) / sdf_slot_symbols(params, k, bits);
  auto n = static_cast<std::uint64_t>(std::floor(bound));
  while (n > 0 && !(sdf_data_fraction(params, k, n, bits) > 0)) --n;
  return n;
}

struct SdfMcResult {
  McEstimate rate;          // E[log2(1 + P gamma_sdf) | X >= 1]
  McEstimate capture_prob;  // empirical P(X >= 1)
  bool degenerate = false;  // no trial captured anyone
};

namespace detail {

// Binomial(k, q) CDF for inversion.
inline std::vector<double> binomial_cdf(std::uint64_t k, double q) {
  std::vector<double> cdf(k + 1);
  double acc = 0;
  for (std::uint64_t l = 0; l <= k; ++l) {
    acc += binomial_pmf(k, q, l);
    cdf[l] = acc;
  }
  cdf[k] = std::numeric_limits<double>::infinity();
  return cdf;
}

// Per-slot occupancy and the SNR of the last user to land there.
struct SlotBook {
  std::vector<std::uint32_t> occupancy;
  std::vector<double> snr;

  void reset(std::uint64_t n) {
    occupancy.assign(n, 0);
    snr.assign(n, 0.0);
  }
  void put(std::uint64_t slot, double g) {
    ++occupancy[slot];
    snr[slot] = g;
  }
  // Returns {X, max captured SNR}.
  std::pair<std::uint64_t, double> captured() const {
    std::uint64_t x = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < occupancy.size(); ++s)
      if (occupancy[s] == 1) {
        ++x;
        best = std::max(best, snr[s]);
      }
    return {x, best};
  }
};

}  // namespace detail

/// Monte Carlo of the scheduled rate and capture probability under (K, N).
inline SdfMcResult sdf_scheduled_rate_mc(const CaptureModel& model, double p, const McConfig& mc,
                                         SdfSampler sampler = SdfSampler::FullProcess) {
  model.validate();
  if (!(p > 0)) throw DomainError("sdf_scheduled_rate_mc: p must be > 0");
  const std::uint64_t k = model.k;
  const std::uint64_t n = model.n_slots;
  const double th = model.gamma_th();
  const auto cdf = sampler == SdfSampler::Memoryless ? detail::binomial_cdf(k, model.eligibility())
                                                     : std::vector<double>{};

  auto trial = [&](std::uint64_t, Stream& s, std::span<double> out) {
    thread_local detail::SlotBook book;
    book.reset(n);
    double gamma = 0;
    std::uint64_t x = 0;
    if (sampler == SdfSampler::FullProcess) {
      for (std::uint64_t i = 0; i < k; ++i) {
        const double g = s.exponential();
        const std::uint64_t slot = s.below(n);
        if (g >= th) book.put(slot, g);
      }
      std::tie(x, gamma) = book.captured();
    } else {
      const double u = s.uniform();
      const auto l = static_cast<std::uint64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const double v = s.uniform_open();
      for (std::uint64_t j = 0; j < l; ++j) book.put(s.below(n), 0.0);
      x = book.captured().first;
      if (x > 0) gamma = th - std::log(-std::expm1(std::log(v) / static_cast<double>(x)));
    }
    if (x == 0) return;
    const double r = std::log2(1.0 + p * gamma);
    out[0] = 1.0;
    out[1] = r;
    out[2] = r * r;
  };

  const auto est = estimate_vector(mc, 3, trial);
  SdfMcResult res;
  res.capture_prob = est[0];
  res.rate.trials = mc.trials;
  res.rate.seed = mc.seed;
  const double m0 = est[0].mean;
  if (!(m0 > 0)) {
    res.degenerate = true;
    res.rate.mean = std::numeric_limits<double>::quiet_NaN();
    return res;
  }
  const double captured = m0 * static_cast<double>(mc.trials);
  res.rate.mean = est[1].mean / m0;
  const double var = std::max(0.0, est[2].mean / m0 - res.rate.mean * res.rate.mean);
  res.rate.std_error = captured > 1 ? std::sqrt(var * captured / (captured - 1) / captured) : 0.0;
  return res;
}

struct SdfRates {
  double r_d = 0;
  double r_u = 0;  // FDD only
  double w_data = 0;
  double p_capture = 0;
  double objective = 0;
  SdfMcResult mc;
};

/// Rates for (K, N) under either duplex. `table` must be the no-singleton
/// table for N covering l up to K.
inline SdfRates sdf_rates(const SystemParams& params, Duplex duplex, std::uint64_t k, std::uint64_t n,
                          const McConfig& mc, const NoSingletonTable& table, const SdfOptions& opt = {}) {
  params.validate();
  if (k < 1) throw DomainError("sdf_rates: k must be >= 1");
  if (n < 1) throw DomainError("sdf_rates: n must be >= 1");
  SdfRates r;
  r.w_data = sdf_data_fraction(params, k, n, opt.id_bits);
  if (!(r.w_data > 0)) throw InfeasibleError("sdf_rates: feedback slots exceed the block");
  const CaptureModel model{k, n};
  r.p_capture = p_x_ge_1(model, table);
  r.mc = sdf_scheduled_rate_mc(model, params.p, mc, opt.sampler);
  const double e = r.mc.degenerate ? 0.0 : r.mc.rate.mean;
  if (duplex == Duplex::FDD) {
    r.r_d = r.p_capture * e;
    r.r_u = r.w_data * params.uplink_capacity();
    if (opt.variant == SumRateVariant::Joint) r.r_u *= r.p_capture;
    r.objective = params.lambda_r * r.r_d + r.r_u;
  } else {
    r.r_d = r.p_capture * r.w_data * e;
    r.objective = r.r_d;
  }
  return r;
}

inline SdfRates sdf_rates(const SystemParams& params, Duplex duplex, std::uint64_t k, std::uint64_t n,
                          const McConfig& mc, const SdfOptions& opt = {}) {
  return sdf_rates(params, duplex, k, n, mc, NoSingletonTable(std::max<std::uint64_t>(n, 1), k), opt);
}

/// lambda_R R_D + R_U.
inline double fdd_sdf_objective(const SystemParams& params, std::uint64_t k, std::uint64_t n, const McConfig& mc,
                                 const SdfOptions& opt = {}) {
  return sdf_rates(params, Duplex::FDD, k, n, mc, opt).objective;
}

/// P(X >= 1) w_data E[log2(1 + P gamma_sdf) | X >= 1].
inline double tdd_sdf_objective(const SystemParams& params, std::uint64_t k, std::uint64_t n, const McConfig& mc,
                                const SdfOptions& opt = {}) {
  return sdf_rates(params, Duplex::TDD, k, n, mc, opt).objective;
}

/// Exhaustive grid over K = 1..k_total and N = 1..N_max(K), every point
/// evaluated with the same seed. Ties keep the earlier point (smaller K,
/// then smaller N).
inline OptResult sdf_optimize(const SystemParams& params, Duplex duplex, const McConfig& mc,
                              const SdfOptions& opt = {}) {
  params.validate();
  std::map<std::uint64_t, NoSingletonTable> tables;
  OptResult best;
  best.method = OptMethod::ExactScan;
  best.k_min = 1;
  best.k_max = params.k_total;
  bool found = false;
  for (std::uint64_t k = 1; k <= params.k_total; ++k) {
    const std::uint64_t n_max = sdf_n_max(params, k, opt.id_bits);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
      auto it = tables.find(n);
      if (it == tables.end()) it = tables.emplace(n, NoSingletonTable(n, params.k_total)).first;
      const double v = sdf_rates(params, duplex, k, n, mc, it->second, opt).objective;
      if (!found || v > best.value) {
        found = true;
        best.value = v;
        best.k_star = k;
        best.n_star = n;
      }
    }
  }
  if (!found) throw InfeasibleError("sdf_optimize: no feasible (K, N)");
  return best;
}

}  // namespace mudiv
