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

// Per-user block-fading channel draws for the three antenna configurations.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "mudiv/errors.hpp"
#include "mudiv/mc.hpp"
#include "mudiv/rng.hpp"

namespace mudiv {

struct SisoRayleigh {};
struct SimoGamma {
  unsigned n_r = 1;
};
struct MimoIid {
  unsigned n = 1;
};

using FadingKind = std::variant<SisoRayleigh, SimoGamma, MimoIid>;

/// Fading model plus the average SNR P (linear power ratio).
struct FadingConfig {
  FadingKind kind = SisoRayleigh{};
  double avg_snr_p = 1.0;

  static FadingConfig siso(double p) { return checked({SisoRayleigh{}, p}); }
  static FadingConfig simo(unsigned n_r, double p) { return checked({SimoGamma{n_r}, p}); }
  static FadingConfig mimo(unsigned n, double p) { return checked({MimoIid{n}, p}); }

  bool is_mimo() const { return std::holds_alternative<MimoIid>(kind); }

 private:
  static FadingConfig checked(FadingConfig cfg) {
    if (!(cfg.avg_snr_p > 0)) throw DomainError("FadingConfig: average SNR must be > 0");
    std::visit(
        [](const auto& k) {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, SimoGamma>) {
            if (k.n_r < 1) throw DomainError("FadingConfig: n_r must be >= 1");
          } else if constexpr (std::is_same_v<K, MimoIid>) {
            if (k.n < 1) throw DomainError("FadingConfig: n must be >= 1");
          }
        },
        cfg.kind);
    return cfg;
  }
};

/// SNR (linear) for SISO/SIMO, mutual information in bits/symbol for MIMO.
struct LinkMetricSample {
  double value = 0;
  bool is_mutual_information = false;
};

/// log2 det(I + (P/n) H H^H) through the Cholesky factor of the (positive
/// definite) argument.
inline double mimo_log2det(const Eigen::MatrixXcd& h, double p) {
  const auto n = h.rows();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
  a.noalias() += (p / static_cast<double>(n)) * h * h.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(a);
  double logdet = 0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(llt.matrixL()(i, i).real());
  return 2.0 * logdet / std::numbers::ln2;
}

/// n x n matrix of i.i.d. CN(0,1) entries: real and imaginary parts N(0, 1/2).
inline Eigen::MatrixXcd sample_cn_matrix(unsigned n, Stream& stream) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  Eigen::MatrixXcd h(n, n);
  for (unsigned c = 0; c < n; ++c)
    for (unsigned r = 0; r < n; ++r) {
      const double re = gauss(stream);
      const double im = gauss(stream);
      h(r, c) = {re, im};
    }
  return h;
}

/// One user's link metric. |h|^2 of a CN(0,1) coefficient is Exp(1), so the
/// SISO and SIMO gains are drawn as sums of unit exponentials.
inline LinkMetricSample sample_user_metric(const FadingConfig& cfg, Stream& stream) {
  return std::visit(
      [&](const auto& k) -> LinkMetricSample {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SisoRayleigh>) {
          return {stream.exponential(), false};
        } else if constexpr (std::is_same_v<K, SimoGamma>) {
          double g = 0;
          for (unsigned j = 0; j < k.n_r; ++j) g += stream.exponential();
          return {g, false};
        } else {
          return {mimo_log2det(sample_cn_matrix(k.n, stream), cfg.avg_snr_p), true};
        }
      },
      cfg.kind);
}

/// Maximum of k independent user metrics (the scheduled user's metric).
inline LinkMetricSample sample_max_metric(const FadingConfig& cfg, std::uint64_t k, Stream& stream) {
  if (k < 1) throw DomainError("sample_max_metric: k must be >= 1");
  LinkMetricSample best = sample_user_metric(cfg, stream);
  for (std::uint64_t i = 1; i < k; ++i) {
    const auto s = sample_user_metric(cfg, stream);
    if (s.value > best.value) best = s;
  }
  return best;
}

/// Rate delivered to a scheduled user with metric `m`: log2(1 + P m) for an
/// SNR metric, the metric itself for mutual information.
inline double scheduled_rate(const FadingConfig& cfg, const LinkMetricSample& m) {
  return m.is_mutual_information ? m.value : std::log2(1.0 + cfg.avg_snr_p * m.value);
}

/// Monte Carlo E[rate of the best of k users] for every k = 1..k_max in one
/// pass: each trial draws k_max users and records the running maximum.
inline std::vector<McEstimate> scheduled_rate_curve_mc(const FadingConfig& cfg, std::uint64_t k_max,
                                                       const McConfig& mc) {
  if (k_max < 1) throw DomainError("scheduled_rate_curve_mc: k_max must be >= 1");
  return estimate_vector(mc, k_max, [&](std::uint64_t, Stream& s, std::span<double> out) {
    double best = -std::numeric_limits<double>::infinity();
    LinkMetricSample best_sample;
    for (std::uint64_t i = 0; i < k_max; ++i) {
      const auto m = sample_user_metric(cfg, s);
      if (m.value > best) {
        best = m.value;
        best_sample = m;
      }
      out[i] = scheduled_rate(cfg, best_sample);
    }
  });
}

}  // namespace mudiv
