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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mudiv/dedicated.hpp"
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

const double kDb0 = 1.0;
const double kDb10 = 10.0;

}  // namespace

TEST(SystemParams, Validation) {
  EXPECT_NO_THROW(params(100, 1.0).validate());
  auto s = params(100, 1.0);
  s.p = 0;
  EXPECT_THROW(s.validate(), DomainError);
  s = params(100, 1.0);
  s.lambda_r = -0.1;
  EXPECT_THROW(s.validate(), DomainError);
  s = params(100, 1.0);
  s.k_total = 0;
  EXPECT_THROW(s.validate(), DomainError);
  s = params(5, 1.0);
  EXPECT_THROW(s.validate(), DomainError);  // T = 1
}

TEST(SystemParams, FeasibleRange) {
  const auto s = params(100, kDb0);  // T = 20, T_1 = 20
  EXPECT_DOUBLE_EQ(s.t_eff(), 20.0);
  EXPECT_DOUBLE_EQ(s.t1(), 20.0);
  EXPECT_EQ(s.k_exhaust(), 20u);
  EXPECT_EQ(s.k_max(), 19u);
  EXPECT_EQ(params(1000, kDb10).k_max(), 75u);
  EXPECT_THROW(fdd_uplink_rate(s, 21), InfeasibleError);
  EXPECT_DOUBLE_EQ(fdd_uplink_rate(s, 20), 0.0);
  EXPECT_DOUBLE_EQ(tdd_downlink_rate(s, 20, SpectralEfficiencyMethod::Quadrature), 0.0);
}

TEST(Fdd, ExactOptimumAtDefaults) {
  EXPECT_EQ(fdd_optimize_exact(params(100, kDb0)).k_star, 4u);
  EXPECT_EQ(fdd_optimize_exact(params(300, kDb10)).k_star, 14u);
  // Unit downlink weight.
  EXPECT_EQ(fdd_optimize_exact(params(100, kDb0, 1.0)).k_star, 8u);
  EXPECT_EQ(fdd_optimize_exact(params(300, kDb10, 1.0)).k_star, 24u);
}

TEST(Fdd, ScanAgreesWithIndependentObjective) {
  for (double p : {kDb0, kDb10})
    for (std::uint64_t t : {100, 150, 200, 250, 300}) {
      const auto s = params(t, p);
      const double t_eff = t / 5.0;
      std::uint64_t best = 1;
      double best_v = -1e300;
      for (std::uint64_t k = 1; k <= s.k_max(); ++k) {
        const double v = 0.5 * oracle::c_df(k, p) + std::log2(1 + p) - k / t_eff;
        if (v > best_v) best_v = v, best = k;
      }
      const auto r = fdd_optimize_exact(s);
      EXPECT_EQ(r.k_star, best) << t << " " << p;
      EXPECT_NEAR(r.value, best_v, 1e-9);
      EXPECT_EQ(fdd_optimize_exact(s, SpectralEfficiencyMethod::Quadrature, ScanMode::FullScan).k_star, best);
    }
}

TEST(Fdd, WeightLimits) {
  EXPECT_EQ(fdd_optimize_exact(params(300, kDb10, 0.0)).k_star, 1u);
  const auto s = params(300, kDb10, 1e6);
  EXPECT_EQ(fdd_optimize_exact(s).k_star, s.k_max());
}

TEST(Fdd, OptimumGrowsWithBlocklength) {
  std::uint64_t prev = 0;
  for (std::uint64_t t = 100; t <= 1000; t += 50) {
    const auto k = fdd_optimize_exact(params(t, kDb10)).k_star;
    EXPECT_GE(k, prev);
    prev = k;
  }
}

TEST(Fdd, LambertSolvesStationarity) {
  for (double p : {kDb0, kDb10})
    for (std::uint64_t t : {100, 300, 5000}) {
      const auto s = params(t, p);
      const double k = fdd_lambert_k(s);
      EXPECT_NEAR(k * (1 / p + std::log(k)), s.lambda_r * s.t_eff(), 1e-9 * t);
    }
}

TEST(Fdd, LambertApproximantMatchesSurrogateScan) {
  for (double p : {kDb0, kDb10})
    for (std::uint64_t t : {100, 150, 200, 250, 300}) {
      const auto s = params(t, p);
      const auto ap = fdd_k_ap(s);
      const auto scan = fdd_surrogate_optimize(s);
      EXPECT_LE(std::abs(double(ap.k_star) - double(scan.k_star)), 1.0) << t << " " << p;
      EXPECT_EQ(ap.method, OptMethod::LambertApprox);
      EXPECT_TRUE(std::isfinite(ap.k_continuous));
    }
}

TEST(Fdd, AsymptoticLambertIsClose) {
  for (double lt : {1e3, 1e5, 1e7}) {
    auto s = params(static_cast<std::uint64_t>(lt * 10), kDb10);
    EXPECT_NEAR(fdd_lambert_k_asymptotic(s) / fdd_lambert_k(s), 1.0, 0.1);
  }
}

TEST(Fdd, RateCurveConsistent) {
  const auto s = params(200, kDb10);
  const auto curve = fdd_rate_curve(s, SpectralEfficiencyMethod::Quadrature);
  ASSERT_EQ(curve.entries.size(), s.k_max());
  for (const auto& e : curve.entries) {
    EXPECT_NEAR(e.objective, 0.5 * e.r_d + e.r_u, 1e-14);
    EXPECT_NEAR(e.r_u, std::log2(11.0) - e.k / 40.0, 1e-14);
  }
}

TEST(Tdd, ExactOptimumAtDefaults) {
  EXPECT_EQ(tdd_optimize_exact(params(100, kDb0)).k_star, 4u);
  EXPECT_EQ(tdd_optimize_exact(params(300, kDb10)).k_star, 17u);
}

TEST(Tdd, ScanAgreesWithIndependentObjective) {
  for (double p : {kDb0, kDb10})
    for (std::uint64_t t : {100, 200, 300}) {
      const auto s = params(t, p);
      const double t1 = t / 5.0 * std::log2(1 + p);
      std::uint64_t best = 1;
      double best_v = -1;
      for (std::uint64_t k = 1; k <= s.k_max(); ++k) {
        const double v = (1 - k / t1) * oracle::c_df(k, p);
        if (v > best_v) best_v = v, best = k;
      }
      EXPECT_EQ(tdd_optimize_exact(s).k_star, best);
    }
}

TEST(Tdd, TraceStagesAreConsistent) {
  const auto s = params(300, kDb10);
  const auto tr = tdd_lambert_trace(s);
  EXPECT_NEAR(tr.k1 * (1 / s.p + std::log(tr.k1)), tr.t1, 1e-9 * tr.t1);
  EXPECT_NEAR(tr.t2, (tr.t1 - tr.k1) / std::log1p(s.p * std::log(tr.k1)), 1e-12 * tr.t2);
  EXPECT_NEAR(tr.k_ap * (1 / s.p + std::log(tr.k_ap)), tr.t2, 1e-9 * tr.t2);
  EXPECT_LT(tr.k_ap, tr.k1);
}

TEST(Tdd, LambertApproximantNearSurrogateAtLowSnr) {
  for (std::uint64_t t : {100, 150, 200, 250, 300}) {
    const auto s = params(t, kDb0);
    EXPECT_LE(std::abs(double(tdd_k_ap(s).k_star) - double(tdd_surrogate_optimize(s).k_star)), 1.0) << t;
  }
}

TEST(Tdd, MoreConservativeThanFddAtUnitWeight) {
  for (std::uint64_t t : {100, 300})
    EXPECT_LE(tdd_optimize_exact(params(t, kDb10)).k_star, fdd_optimize_exact(params(t, kDb10, 1.0)).k_star);
}

TEST(Scan, TiesPreferSmallerK) {
  const auto r = argmax_scan(3, 9, [](std::uint64_t) { return 1.0; });
  EXPECT_EQ(r.k_star, 3u);
  EXPECT_THROW(argmax_scan(5, 4, [](std::uint64_t) { return 0.0; }), InfeasibleError);
  const auto early = argmax_scan(1, 10, [](std::uint64_t k) { return k == 2 ? -1.0 : double(k); }, ScanMode::EarlyExit);
  EXPECT_EQ(early.k_star, 1u);
  EXPECT_TRUE(std::isnan(early.k_continuous));
}

TEST(Curves, MonteCarloTableBounds) {
  const auto c = spectral_curve(std::vector<McEstimate>{{1.0, 0, 1, 1}, {2.0, 0, 1, 1}});
  EXPECT_EQ(c(2), 2.0);
  EXPECT_THROW(c(3), RangeError);
  EXPECT_THROW(c(0), RangeError);
}

TEST(Mimo, GaussianScanDecreasesWithAntennas) {
  const auto s = params(300, kDb10);
  std::uint64_t prev = 1000;
  for (unsigned n : {1u, 2u, 4u, 8u}) {
    const auto r = mimo_optimize(s, n);
    EXPECT_LE(r.scan.k_star, prev);
    EXPECT_LE(std::abs(double(r.closed_form.k_star) - double(r.scan.k_star)), 2.0) << n;
    prev = r.scan.k_star;
  }
  EXPECT_EQ(mimo_optimize(s, 1).scan.k_star, 21u);
  EXPECT_EQ(mimo_optimize(s, 8).scan.k_star, 12u);
}

TEST(Mimo, NoSpreadMeansNoDiversity) {
  const auto r = mimo_optimize(params(300, kDb10), GaussianMi{5.0, 0.0, true});
  EXPECT_EQ(r.scan.k_star, 1u);
  EXPECT_EQ(r.closed_form.k_star, 1u);
}

TEST(Mimo, MonteCarloOptimumDecreases) {
  const auto s = params(300, kDb10);
  McConfig mc{3000, 17};
  const auto k1 = mimo_optimize_mc(s, 1, mc).k_star;
  const auto k4 = mimo_optimize_mc(s, 4, mc).k_star;
  EXPECT_GT(k1, k4);
  // 1x1 MIMO is SISO: the MC optimum sits next to the exact one.
  EXPECT_LE(std::abs(double(k1) - double(tdd_optimize_exact(s).k_star)), 2.0);
}

TEST(Simo, GrowthScanDecreasesWithAntennas) {
  const auto s = params(300, kDb10);
  std::uint64_t prev = 1000;
  for (unsigned n : {1u, 2u, 4u, 8u}) {
    const auto k = simo_optimize(s, n).k_star;
    EXPECT_LE(k, prev);
    prev = k;
  }
  EXPECT_EQ(simo_optimize(s, 1).k_star, 18u);
}

TEST(Simo, MonteCarloSingleAntennaMatchesSiso) {
  const auto s = params(300, kDb10);
  const auto k = simo_optimize_mc(s, 1, McConfig{4000, 2}).k_star;
  EXPECT_LE(std::abs(double(k) - double(tdd_optimize_exact(s).k_star)), 2.0);
}
