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

// Seeded Monte Carlo engine.
//
// Trials are grouped in fixed blocks of kBlockTrials. Each block is reduced
// sequentially, and block results are merged pairwise in block order, so the
// estimate depends only on (trials, seed, trial function) and never on the
// number of worker threads.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "mudiv/errors.hpp"
#include "mudiv/rng.hpp"

namespace mudiv {

struct McConfig {
  std::uint64_t trials = 10000;
  std::uint64_t seed = 1;
  double ci_level = 0.997;
  unsigned workers = 1;
};

struct McEstimate {
  double mean = 0;
  double std_error = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;

  /// Zero standard error, or a single trial: the spread carries no information.
  bool flagged() const { return trials <= 1 || std_error == 0; }

  /// Half-width of the two-sided normal interval at `level`.
  double half_width(double level) const {
    boost::math::normal_distribution<double> z;
    return boost::math::quantile(z, 0.5 + level / 2) * std_error;
  }

  /// |mean - value| <= n_se * std_error.
  bool within(double value, double n_se = 3.0) const {
    return std::abs(mean - value) <= n_se * std_error;
  }
};

inline constexpr std::uint64_t kBlockTrials = 1024;

namespace detail {

// Running mean and sum of squared deviations for one coordinate.
struct Moments {
  double count = 0;
  double mean = 0;
  double m2 = 0;

  void add(double x) {
    count += 1;
    const double d = x - mean;
    mean += d / count;
    m2 += d * (x - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    Moments r;
    r.count = a.count + b.count;
    const double d = b.mean - a.mean;
    r.mean = a.mean + d * (b.count / r.count);
    r.m2 = a.m2 + b.m2 + d * d * (a.count * b.count / r.count);
    return r;
  }
};

inline std::vector<Moments> merge_range(const std::vector<std::vector<Moments>>& blocks,
                                        std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  auto left = merge_range(blocks, lo, mid);
  const auto right = merge_range(blocks, mid, hi);
  for (std::size_t d = 0; d < left.size(); ++d) left[d] = Moments::merge(left[d], right[d]);
  return left;
}

}  // namespace detail

/// Vector-valued estimate. `fn(trial, stream, out)` writes `dim` payoffs for
/// one trial; the stream is keyed by (config.seed, trial).
template <class TrialFn>
std::vector<McEstimate> estimate_vector(const McConfig& config, std::size_t dim, TrialFn&& fn) {
  if (config.trials == 0) throw DomainError("estimate: trials must be >= 1");
  const std::uint64_t n_blocks = (config.trials + kBlockTrials - 1) / kBlockTrials;
  std::vector<std::vector<detail::Moments>> blocks(n_blocks, std::vector<detail::Moments>(dim));

  std::atomic<std::uint64_t> next_block{0};
  std::mutex error_mutex;
  std::uint64_t error_trial = std::numeric_limits<std::uint64_t>::max();
  std::string error_what;

  auto work = [&] {
    std::vector<double> out(dim);
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      const std::uint64_t first = b * kBlockTrials;
      const std::uint64_t last = std::min(config.trials, first + kBlockTrials);
      auto& moments = blocks[b];
      for (std::uint64_t t = first; t < last; ++t) {
        Stream stream(config.seed, t);
        std::fill(out.begin(), out.end(), 0.0);
        try {
          fn(t, stream, std::span<double>(out));
        } catch (const std::exception& e) {
          std::lock_guard lock(error_mutex);
          if (t < error_trial) {
            error_trial = t;
            error_what = e.what();
          }
          break;
        }
        for (std::size_t d = 0; d < dim; ++d) moments[d].add(out[d]);
      }
    }
  };

  const unsigned workers =
      static_cast<unsigned>(std::clamp<std::uint64_t>(config.workers, 1, n_blocks));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error_trial != std::numeric_limits<std::uint64_t>::max())
    throw TrialError(error_trial, error_what);

  const auto total = detail::merge_range(blocks, 0, blocks.size());
  std::vector<McEstimate> result(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    const auto& m = total[d];
    result[d].mean = m.mean;
    result[d].std_error = m.count > 1 ? std::sqrt(m.m2 / (m.count - 1) / m.count) : 0.0;
    result[d].trials = config.trials;
    result[d].seed = config.seed;
  }
  return result;
}

/// Scalar estimate; `fn(trial, stream) -> double`.
template <class TrialFn>
McEstimate estimate(const McConfig& config, TrialFn&& fn) {
  return estimate_vector(config, 1,
                         [&](std::uint64_t t, Stream& s, std::span<double> out) { out[0] = fn(t, s); })
      .front();
}

/// Estimate of E[a - b] with common random numbers: both trial functions see
/// identically keyed streams, and the standard error is that of the paired
/// differences.
template <class TrialFnA, class TrialFnB>
McEstimate paired_estimate(const McConfig& config, TrialFnA&& fn_a, TrialFnB&& fn_b) {
  return estimate(config, [&](std::uint64_t t, Stream& s) {
    Stream twin = s;
    const double a = fn_a(t, s);
    const double b = fn_b(t, twin);
    return a - b;
  });
}

}  // namespace mudiv
