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

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace mudiv {

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Counter-based random stream. Draw i of the stream keyed by
/// (seed, trial, substream) is a pure function of those four integers, so a
/// trial's randomness never depends on which thread ran it or what ran before.
///
/// Satisfies UniformRandomBitGenerator, so std:: distributions work on it.
class Stream {
 public:
  using result_type = std::uint64_t;

  constexpr Stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t substream = 0)
      : key_(detail::mix64(detail::mix64(detail::mix64(seed ^ 0x5851F42D4C957F2DULL) + trial) +
                           substream * detail::kGolden)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe as a logarithm argument.
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  /// Exp(1) by inversion.
  double exponential() { return -std::log(uniform_open()); }

  /// Integer uniform on [0, n), multiply-shift reduction.
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>((static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mudiv
