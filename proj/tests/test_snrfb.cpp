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

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "mudiv/snrfb.hpp"
#include "oracles.hpp"

using namespace mudiv;

namespace {

SystemParams params(std::uint64_t t, double p, double lambda = 0.5) {
  SystemParams s;
  s.t_check = t;
  s.p = p;
  s.lambda_r = lambda;
  return s;
}

}  // namespace

TEST(Bandwidth, SlotSizeAndDataFraction) {
  const auto s = params(300, 10.0);
  EXPECT_NEAR(sdf_slot_symbols(s, 64), 11.0 / std::log2(11.0), 1e-14);
  EXPECT_NEAR(sdf_slot_symbols(s, 75, IdBits::Ceil), 12.0 / std::log2(11.0), 1e-14);
  EXPECT_NEAR(sdf_data_fraction(s, 64, 10), 1 - 10 * 11.0 / std::log2(11.0) / 300, 1e-14);
  const auto n_max = sdf_n_max(s, 75);
  EXPECT_GT(sdf_data_fraction(s, 75, n_max), 0.0);
  EXPECT_LE(sdf_data_fraction(s, 75, n_max + 1), 0.0);
  EXPECT_THROW(fdd_sdf_objective(s, 75, n_max + 1, McConfig{10, 1}), InfeasibleError);
}

TEST(Bandwidth, FeedbackCostIsLogarithmic) {
  const auto s = params(300, 10.0);
  double prev_ratio = 10;
  for (std::uint64_t k = 16; k <= 4096; k *= 2) {
    const double ratio = sdf_feedback_fraction(s, 2 * k, 5) / sdf_feedback_fraction(s, k, 5);
    EXPECT_GT(ratio, 1.0);
    EXPECT_LT(ratio, prev_ratio);
    prev_ratio = ratio;
  }
  EXPECT_LT(prev_ratio, 1.06);
}

TEST(ScheduledRate, SingleUserSingleSlot) {
  const auto r = sdf_scheduled_rate_mc(CaptureModel{1, 1}, 10.0, McConfig{200000, 3});
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.capture_prob.mean, 1.0);
  EXPECT_TRUE(r.rate.within(oracle::c_df(1, 10.0), 3.0)) << r.rate.mean;
}

TEST(ScheduledRate, ManySlotsReduceToDedicated) {
  // N >> K: threshold 0, collisions rare; the gap to dedicated scheduling
  // is bounded by the collision probability.
  const auto r = sdf_scheduled_rate_mc(CaptureModel{8, 20000}, 10.0, McConfig{100000, 5});
  EXPECT_TRUE(r.rate.within(oracle::c_df(8, 10.0), 3.0)) << r.rate.mean << " " << oracle::c_df(8, 10.0);
}

// A proportion estimate with zero observed misses has zero standard error;
// fall back to the rule of three, P(miss) < 3 / trials at 95%.
bool proportion_consistent(const McEstimate& e, double p, double n_se) {
  const double slack = std::max(n_se * e.std_error, 3.0 / static_cast<double>(e.trials));
  return std::abs(e.mean - p) <= slack;
}

TEST(ScheduledRate, BothSamplersMatchSemiAnalyticLaw) {
  for (auto [k, n] : {std::pair<std::uint64_t, std::uint64_t>{4, 2}, {12, 3}, {20, 30}}) {
    const auto exact = oracle::sdf(k, n, 10.0);
    for (auto sampler : {SdfSampler::FullProcess, SdfSampler::Memoryless}) {
      const auto r = sdf_scheduled_rate_mc(CaptureModel{k, n}, 10.0, McConfig{300000, 7}, sampler);
      EXPECT_TRUE(r.rate.within(exact.rate_given_capture, 3.5)) << k << " " << n << " " << r.rate.mean;
      EXPECT_TRUE(proportion_consistent(r.capture_prob, exact.p_capture, 3.5)) << k << " " << n;
      EXPECT_TRUE(proportion_consistent(r.capture_prob, p_x_ge_1(CaptureModel{k, n}), 3.5));
    }
  }
}

TEST(ScheduledRate, CaptureProbabilityAtDefaults) {
  const auto r = sdf_scheduled_rate_mc(CaptureModel{75, 10}, 10.0, McConfig{200000, 2});
  EXPECT_TRUE(r.capture_prob.within(p_x_ge_1(CaptureModel{75, 10}), 3.0));
}

TEST(ScheduledRate, EligibleCountIsBinomial) {
  // Count the users above threshold directly with the same draw layout.
  const std::uint64_t k = 20, n = 5, trials = 100000;
  const double th = CaptureModel{k, n}.gamma_th();
  std::vector<double> freq(k + 1, 0.0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Stream s(9, t);
    std::uint64_t l = 0;
    for (std::uint64_t i = 0; i < k; ++i) {
      if (s.exponential() >= th) ++l;
      s.below(n);
    }
    freq[l] += 1;
  }
  double chi2 = 0;
  int cells = 0;
  for (std::uint64_t l = 0; l <= k; ++l) {
    const double e = trials * binomial_pmf(k, 0.25, l);
    if (e < 5) continue;
    chi2 += (freq[l] - e) * (freq[l] - e) / e;
    ++cells;
  }
  EXPECT_LT(chi2, cells + 4 * std::sqrt(2.0 * cells));
}

TEST(ScheduledRate, DegenerateWhenNothingIsCaptured) {
  // K = 2, N = 1: a trial captures iff exactly one user clears log 2.
  int degenerate = 0;
  for (std::uint64_t seed = 1; seed <= 64; ++seed) {
    const auto r = sdf_scheduled_rate_mc(CaptureModel{2, 1}, 10.0, McConfig{1, seed});
    if (r.degenerate) {
      ++degenerate;
      EXPECT_TRUE(std::isnan(r.rate.mean));
      EXPECT_EQ(r.capture_prob.mean, 0.0);
    } else {
      EXPECT_EQ(r.capture_prob.mean, 1.0);
      EXPECT_GE(r.rate.mean, std::log2(1 + 10 * std::log(2.0)));
    }
  }
  EXPECT_GT(degenerate, 10);
  EXPECT_LT(degenerate, 54);
}

TEST(ScheduledRate, ReproducibleAcrossWorkers) {
  McConfig one{20000, 4, 0.997, 1};
  McConfig four = one;
  four.workers = 4;
  for (auto sampler : {SdfSampler::FullProcess, SdfSampler::Memoryless}) {
    const auto a = sdf_scheduled_rate_mc(CaptureModel{75, 10}, 10.0, one, sampler);
    const auto b = sdf_scheduled_rate_mc(CaptureModel{75, 10}, 10.0, four, sampler);
    EXPECT_EQ(a.rate.mean, b.rate.mean);
    EXPECT_EQ(a.rate.std_error, b.rate.std_error);
    EXPECT_EQ(a.capture_prob.mean, b.capture_prob.mean);
  }
}

TEST(Objectives, DeterministicUnderFixedSeed) {
  const auto s = params(300, 10.0);
  const McConfig mc{4000, 11};
  const double a = fdd_sdf_objective(s, 75, 10, mc);
  EXPECT_EQ(a, fdd_sdf_objective(s, 75, 10, mc));
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_EQ(tdd_sdf_objective(s, 75, 10, mc), tdd_sdf_objective(s, 75, 10, mc));
}

TEST(Objectives, AssembledFromParts) {
  const auto s = params(300, 10.0);
  const McConfig mc{4000, 2};
  const auto f = sdf_rates(s, Duplex::FDD, 40, 6, mc);
  EXPECT_NEAR(f.r_d, f.p_capture * f.mc.rate.mean, 1e-14);
  EXPECT_NEAR(f.r_u, f.p_capture * f.w_data * std::log2(11.0), 1e-14);
  EXPECT_NEAR(f.objective, 0.5 * f.r_d + f.r_u, 1e-14);
  SdfOptions alt;
  alt.variant = SumRateVariant::UplinkUnconditional;
  const auto g = sdf_rates(s, Duplex::FDD, 40, 6, mc, alt);
  EXPECT_NEAR(g.r_u, g.w_data * std::log2(11.0), 1e-14);
  const auto t = sdf_rates(s, Duplex::TDD, 40, 6, mc);
  EXPECT_NEAR(t.objective, t.p_capture * t.w_data * t.mc.rate.mean, 1e-14);
  EXPECT_EQ(t.r_u, 0.0);
}

TEST(Objectives, TddBelowFddAtUnitWeight) {
  const auto s = params(300, 10.0, 1.0);
  const McConfig mc{3000, 5};
  for (std::uint64_t k : {10, 40, 75})
    for (std::uint64_t n : {2, 6, 12})
      EXPECT_LE(tdd_sdf_objective(s, k, n, mc), fdd_sdf_objective(s, k, n, mc)) << k << " " << n;
}

TEST(Objectives, DecreasingInSlotsPastTheOptimum) {
  for (auto duplex : {Duplex::FDD, Duplex::TDD}) {
    const auto s = params(300, 10.0);
    const McConfig mc{3000, 8};
    std::vector<double> v;
    for (std::uint64_t n = 1; n <= 30; ++n) v.push_back(sdf_rates(s, duplex, 75, n, mc).objective);
    const auto best = std::max_element(v.begin(), v.end()) - v.begin();
    for (std::size_t i = best + 1; i < v.size(); ++i) EXPECT_LT(v[i], v[i - 1]) << i + 1;
  }
}

TEST(Optimizer, SingleUserSystem) {
  auto s = params(300, 10.0);
  s.k_total = 1;
  for (auto duplex : {Duplex::FDD, Duplex::TDD}) {
    const auto r = sdf_optimize(s, duplex, McConfig{500, 1});
    EXPECT_EQ(r.k_star, 1u);
    ASSERT_TRUE(r.n_star.has_value());
    EXPECT_EQ(*r.n_star, 1u);
  }
}

TEST(Optimizer, AllUsersParticipate) {
  for (auto duplex : {Duplex::FDD, Duplex::TDD}) {
    const auto s = params(100, 10.0);
    const auto r = sdf_optimize(s, duplex, McConfig{2000, 1});
    EXPECT_EQ(r.k_star, 75u);
    EXPECT_GE(*r.n_star, 1u);
  }
}

TEST(Optimizer, SlotCountStableAcrossSeeds) {
  const auto s = params(300, 10.0);
  std::vector<std::uint64_t> n;
  for (std::uint64_t seed : {1, 2, 3}) n.push_back(*sdf_optimize(s, Duplex::FDD, McConfig{2000, seed}).n_star);
  const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
  EXPECT_LE(*hi - *lo, 1u);
}
