/**
 * Copyright 2026 The lcurve Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LCURVE_KEYED_RANDOM_HPP
#define LCURVE_KEYED_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

// Counter-based randomness. Every draw is a pure function of a key and a
// position, so results never depend on evaluation order or on the standard
// library's distribution implementations.
namespace lcurve::keyed {

constexpr uint64_t splitmix64(uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combine two words into one well-mixed key.
constexpr uint64_t combine(uint64_t a, uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// FNV-1a, then finalized with splitmix64.
constexpr uint64_t hash_string(std::string_view s) noexcept {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Sequential stream over a fixed key.
class Stream {
 public:
  explicit constexpr Stream(uint64_t key) noexcept : key_(key) {}

  constexpr uint64_t next() noexcept { return combine(key_, counter_++); }

  constexpr double uniform() noexcept { return to_unit(next()); }

  /// Uniform integer in [0, bound) by rejection; bound must be positive.
  constexpr uint64_t below(uint64_t bound) noexcept {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    uint64_t r = next();
    while (r >= limit) r = next();
    return r % bound;
  }

  /// Standard normal via Box-Muller (one value per call).
  double normal() noexcept {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace lcurve::keyed

#endif  // LCURVE_KEYED_RANDOM_HPP
