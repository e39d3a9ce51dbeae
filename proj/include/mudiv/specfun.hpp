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

// Special functions used by the rate formulas: real Lambert-W (branches 0 and
// -1), the exponential integral E1, and harmonic numbers.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>

#include "mudiv/errors.hpp"

namespace mudiv {

enum class Branch { Principal, NegativeOne };

namespace detail {

template <std::floating_point Real>
Real lambert_w_seed(Real x, Branch branch) {
  constexpr Real e = std::numbers::e_v<Real>;
  if (x < Real(-0.25)) {
    // Expansion about the branch point -1/e in p = +-sqrt(2(ex + 1)).
    Real q = std::fma(e, x, Real(1));
    Real p = std::sqrt(Real(2) * (q > 0 ? q : Real(0)));
    if (branch == Branch::NegativeOne) p = -p;
    return Real(-1) + p * (Real(1) + p * (Real(-1) / 3 + p * Real(11) / 72));
  }
  if (branch == Branch::NegativeOne) {
    const Real l1 = std::log(-x);
    const Real l2 = std::log(-l1);
    return l1 - l2 + l2 / l1;
  }
  if (x < Real(3)) return std::log1p(x);
  const Real l1 = std::log(x);
  const Real l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace detail

/// Real Lambert-W: the w on the requested branch with w * exp(w) == x.
///
/// Halley iteration from a branch-specific seed, stopped when the residual
/// |w e^w - x| drops below 4 eps |x|, when the Halley step falls under
/// 4 eps |w|, or after 50 steps. Principal is defined for x >= -1/e and returns
/// w >= -1; NegativeOne is defined for -1/e <= x < 0 and returns w <= -1.
template <std::floating_point Real>
Real lambert_w(Real x, Branch branch = Branch::Principal) {
  constexpr Real inv_e = Real(1) / std::numbers::e_v<Real>;
  if (std::isnan(x) || x < -inv_e) throw DomainError("lambert_w: argument below -1/e");
  if (branch == Branch::NegativeOne && x >= 0)
    throw DomainError("lambert_w: branch -1 requires -1/e <= x < 0");
  if (branch == Branch::Principal && std::isinf(x)) return x;
  if (x == 0) return Real(0);

  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tol = 4 * eps * std::abs(x);
  Real w = detail::lambert_w_seed(x, branch);
  for (int it = 0; it < 50; ++it) {
    const Real ew = std::exp(w);
    const Real f = w * ew - x;
    if (std::abs(f) <= tol) break;
    const Real wp1 = w + 1;
    if (std::abs(wp1) < std::sqrt(eps)) break;  // at the branch point every w near -1 has residual ~0
    const Real step = f / (ew * wp1 - (w + 2) * f / (2 * wp1));
    w -= step;
    if (std::abs(step) <= 4 * eps * std::abs(w)) break;
  }
  if (branch == Branch::Principal) return w < -1 ? Real(-1) : w;
  return w > -1 ? Real(-1) : w;
}

/// Two-term asymptotic Lambert-W: log x - log log x for x >= e (principal),
/// log(-x) - log(-log(-x)) for -1/e <= x < 0 (branch -1). An approximation,
/// not residual-exact.
inline double lambert_w_asymptotic(double x) {
  constexpr double e = std::numbers::e;
  if (x >= e) return std::log(x) - std::log(std::log(x));
  if (x >= -1.0 / e && x < 0) return std::log(-x) - std::log(-std::log(-x));
  throw DomainError("lambert_w_asymptotic: requires x >= e or -1/e <= x < 0");
}

namespace detail {

// Power series; only used for x < 1 where it converges without cancellation trouble.
template <std::floating_point Real>
Real e1_series(Real x) {
  const Real eps = std::numeric_limits<Real>::epsilon();
  Real sum = 0;
  Real term = 1;  // (-1)^{k+1} x^k / k!
  for (int k = 1; k < 1000; ++k) {
    term *= (k == 1 ? x : -x / k);
    const Real add = term / k;
    sum += add;
    if (std::abs(add) < eps * std::abs(sum)) break;
  }
  return -std::numbers::egamma_v<Real> - std::log(x) + sum;
}

// Continued fraction for e^x E1(x), modified Lentz; x >= 1.
template <std::floating_point Real>
Real e1_scaled_cf(Real x) {
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min() / eps;
  Real b = x + 1;
  Real c = 1 / tiny;
  Real d = 1 / b;
  Real h = d;
  for (int i = 1; i < 10000; ++i) {
    const Real an = -Real(i) * Real(i);
    b += 2;
    d = 1 / (an * d + b);
    c = b + an / c;
    const Real del = c * d;
    h *= del;
    if (std::abs(del - 1) <= eps) break;
  }
  return h;
}

}  // namespace detail

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
template <std::floating_point Real>
Real exp_integral_e1(Real x) {
  if (!(x > 0)) throw DomainError("exp_integral_e1: requires x > 0");
  if (x < 1) return detail::e1_series(x);
  return std::exp(-x) * detail::e1_scaled_cf(x);
}

/// e^x * E1(x); finite for arguments where e^x alone would overflow.
template <std::floating_point Real>
Real exp_integral_e1_scaled(Real x) {
  if (!(x > 0)) throw DomainError("exp_integral_e1_scaled: requires x > 0");
  if (x < 1) return std::exp(x) * detail::e1_series(x);
  return detail::e1_scaled_cf(x);
}

/// H_k = sum_{i=1}^k 1/i by forward summation in long double.
inline double harmonic(std::uint64_t k) {
  if (k == 0) throw DomainError("harmonic: requires k >= 1");
  long double sum = 0;
  for (std::uint64_t i = 1; i <= k; ++i) sum += 1.0L / static_cast<long double>(i);
  return static_cast<double>(sum);
}

}  // namespace mudiv
