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

// Capture combinatorics of the threshold-gated slotted-ALOHA feedback channel.
//
// L eligible users each pick one of N slots uniformly; a user is captured iff
// it is alone in its slot. P(X = 0 | L = l) is the probability that no slot
// holds exactly one user.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "mudiv/errors.hpp"

namespace mudiv {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

inline std::vector<std::vector<BigInt>> pascal(std::uint64_t n) {
  std::vector<std::vector<BigInt>> c(n + 1);
  for (std::uint64_t r = 0; r <= n; ++r) {
    c[r].assign(r + 1, BigInt(1));
    for (std::uint64_t m = 1; m < r; ++m) c[r][m] = c[r - 1][m - 1] + c[r - 1][m];
  }
  return c;
}

inline BigInt ipow(std::uint64_t base, std::uint64_t e) {
  BigInt r = 1;
  for (std::uint64_t i = 0; i < e; ++i) r *= base;
  return r;
}

inline double log_choose(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace detail

/// Number of assignments of l labelled users to n labelled slots in which
/// every occupied slot holds at least two users.
///
/// Sums over slot-occupancy compositions (each part 0 or >= 2) weighted by
/// the multinomial count, one slot at a time:
///   f(s, r) = f(s-1, r) + sum_{m=2..r} C(r, m) f(s-1, r-m).
inline BigInt no_singleton_count(std::uint64_t l, std::uint64_t n) {
  if (n < 1) throw DomainError("no_singleton_count: n must be >= 1");
  const auto c = detail::pascal(l);
  std::vector<BigInt> f(l + 1, BigInt(0));
  f[0] = 1;  // zero slots hold zero users
  for (std::uint64_t s = 1; s <= n; ++s) {
    std::vector<BigInt> g(l + 1, BigInt(0));
    for (std::uint64_t r = 0; r <= l; ++r) {
      BigInt acc = f[r];
      for (std::uint64_t m = 2; m <= r; ++m) acc += c[r][m] * f[r - m];
      g[r] = acc;
    }
    f = std::move(g);
  }
  return f[l];
}

/// P(X = 0 | L = l) as an exact rational.
inline Rational p_x0_given_l_exact(std::uint64_t l, std::uint64_t n) {
  if (n < 1) throw DomainError("p_x0_given_l_exact: n must be >= 1");
  return Rational(no_singleton_count(l, n), detail::ipow(n, l));
}

/// Floating-point table of P(X = 0 | L = l), l = 0..l_max, for a fixed slot
/// count. Same recursion as no_singleton_count on h(s, r) = f(s, r) / n^r;
/// every term is nonnegative, so there is no cancellation.
class NoSingletonTable {
 public:
  NoSingletonTable(std::uint64_t n, std::uint64_t l_max) : n_(n) {
    if (n < 1) throw DomainError("NoSingletonTable: n must be >= 1");
    const auto nl = static_cast<long double>(n);
    // weight[r][m] = C(r, m) / n^m, built by the product recurrence in long double
    std::vector<std::vector<long double>> weight(l_max + 1);
    for (std::uint64_t r = 0; r <= l_max; ++r) {
      weight[r].resize(r + 1);
      weight[r][0] = 1.0L;
      for (std::uint64_t m = 1; m <= r; ++m)
        weight[r][m] = weight[r][m - 1] * static_cast<long double>(r - m + 1) / (static_cast<long double>(m) * nl);
    }
    std::vector<long double> h(l_max + 1, 0.0L);
    h[0] = 1.0L;
    for (std::uint64_t s = 1; s <= n; ++s) {
      for (std::uint64_t r = l_max; r >= 2; --r) {  // in place: h[r - m] for m >= 2 still holds row s-1
        long double acc = h[r];
        for (std::uint64_t m = 2; m <= r; ++m) acc += weight[r][m] * h[r - m];
        h[r] = acc;
      }
      if (l_max >= 1) h[1] = 0.0L;
    }
    table_.assign(h.begin(), h.end());
  }

  std::uint64_t slots() const { return n_; }
  std::uint64_t l_max() const { return table_.size() - 1; }

  double operator[](std::uint64_t l) const {
    if (l >= table_.size()) throw RangeError("NoSingletonTable: l beyond table");
    return std::clamp(table_[l], 0.0, 1.0);
  }

 private:
  std::uint64_t n_;
  std::vector<double> table_;
};

inline double p_x0_given_l(std::uint64_t l, std::uint64_t n) { return NoSingletonTable(n, l)[l]; }

/// Hard cap on n^l for exhaustive enumeration.
inline constexpr std::uint64_t kEnumerationCap = 100'000'000;

/// Oracle: P(X = 0 | L = l) by visiting all n^l assignments.
inline Rational p_x0_given_l_enumerate(std::uint64_t l, std::uint64_t n) {
  if (n < 1) throw DomainError("p_x0_given_l_enumerate: n must be >= 1");
  double total = std::pow(static_cast<double>(n), static_cast<double>(l));
  if (total > static_cast<double>(kEnumerationCap))
    throw ResourceError("p_x0_given_l_enumerate: n^l above enumeration cap");
  std::vector<std::uint64_t> choice(l, 0);
  std::vector<std::uint64_t> occupancy(n, 0);
  std::uint64_t hits = 0;
  const auto count = static_cast<std::uint64_t>(total);
  for (std::uint64_t a = 0; a < count; ++a) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    for (std::uint64_t u = 0; u < l; ++u) ++occupancy[choice[u]];
    if (std::none_of(occupancy.begin(), occupancy.end(), [](std::uint64_t o) { return o == 1; })) ++hits;
    for (std::uint64_t u = 0; u < l; ++u) {  // odometer increment
      if (++choice[u] < n) break;
      choice[u] = 0;
    }
  }
  return Rational(BigInt(hits), BigInt(count));
}

/// Oracle: inclusion-exclusion over "slot s holds exactly one user",
/// sum_{j} (-1)^j C(n, j) (l)_j (n - j)^{l - j} / n^l.
inline Rational p_x0_given_l_inclusion_exclusion(std::uint64_t l, std::uint64_t n) {
  if (n < 1) throw DomainError("p_x0_given_l_inclusion_exclusion: n must be >= 1");
  BigInt sum = 0;
  BigInt n_choose_j = 1;
  BigInt falling = 1;  // l (l-1) ... (l-j+1)
  for (std::uint64_t j = 0; j <= std::min(l, n); ++j) {
    if (j > 0) {
      n_choose_j = n_choose_j * (n - j + 1) / j;
      falling *= (l - j + 1);
    }
    const BigInt term = n_choose_j * falling * detail::ipow(n - j, l - j);
    if (j % 2 == 0)
      sum += term;
    else
      sum -= term;
  }
  return Rational(sum, detail::ipow(n, l));
}

/// K users, N slots, threshold log(K/N) clamped at 0.
struct CaptureModel {
  std::uint64_t k = 1;
  std::uint64_t n_slots = 1;

  void validate() const {
    if (k < 1) throw DomainError("CaptureModel: k must be >= 1");
    if (n_slots < 1) throw DomainError("CaptureModel: n_slots must be >= 1");
  }

  /// gamma_th = log(K/N), or 0 when N >= K (everyone eligible).
  double gamma_th() const {
    return n_slots >= k ? 0.0 : std::log(static_cast<double>(k) / static_cast<double>(n_slots));
  }

  /// P(gamma >= gamma_th) for gamma ~ Exp(1): min(1, N/K).
  double eligibility() const {
    return n_slots >= k ? 1.0 : static_cast<double>(n_slots) / static_cast<double>(k);
  }
};

/// Binomial(k, q) probability mass, evaluated in log space.
inline double binomial_pmf(std::uint64_t k, double q, std::uint64_t l) {
  if (l > k) return 0.0;
  if (q >= 1.0) return l == k ? 1.0 : 0.0;
  if (q <= 0.0) return l == 0 ? 1.0 : 0.0;
  return std::exp(detail::log_choose(k, l) + static_cast<double>(l) * std::log(q) +
                  static_cast<double>(k - l) * std::log1p(-q));
}

struct CaptureDistribution {
  std::vector<double> p_x0_given_l;  // l = 0..k
  double p_x_ge_1 = 0;
};

/// 1 - sum_{l=0}^{K} P(X=0 | L=l) Binom(K, min(1, N/K); l), using a
/// precomputed table for the model's slot count.
inline double p_x_ge_1(const CaptureModel& model, const NoSingletonTable& table) {
  model.validate();
  if (table.slots() != model.n_slots || table.l_max() < model.k)
    throw DomainError("p_x_ge_1: table does not match the model");
  const double q = model.eligibility();
  double p0 = 0;
  for (std::uint64_t l = 0; l <= model.k; ++l) p0 += table[l] * binomial_pmf(model.k, q, l);
  return std::clamp(1.0 - p0, 0.0, 1.0);
}

inline double p_x_ge_1(const CaptureModel& model) {
  model.validate();
  return p_x_ge_1(model, NoSingletonTable(model.n_slots, model.k));
}

inline CaptureDistribution capture_distribution(const CaptureModel& model) {
  model.validate();
  const NoSingletonTable table(model.n_slots, model.k);
  CaptureDistribution d;
  for (std::uint64_t l = 0; l <= model.k; ++l) d.p_x0_given_l.push_back(table[l]);
  d.p_x_ge_1 = p_x_ge_1(model, table);
  return d;
}

}  // namespace mudiv
