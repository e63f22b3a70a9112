/*
 * Copyright 2026 The LISTEN Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LISTEN_RANDOM_HPP_
#define LISTEN_RANDOM_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace listen {

// All sampling goes through this wrapper instead of the std
// distributions, whose output is implementation defined. Identical
// seeds must yield identical streams on every supported platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform index in [0, bound). bound must be positive.
  std::size_t uniform_index(std::size_t bound) {
    using u128 = unsigned __int128;
    return static_cast<std::size_t>(
        (static_cast<u128>(next_u64()) * static_cast<u128>(bound)) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and up to three
/// coordinates (cell index, repetition, ...). Stable across runs.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t state = base;
  std::uint64_t out = splitmix64(state);
  state ^= a + 0x9e3779b97f4a7c15ULL;
  out ^= splitmix64(state);
  state ^= b + 0xc2b2ae3d27d4eb4fULL;
  out ^= splitmix64(state);
  state ^= c + 0x165667b19e3779f9ULL;
  out ^= splitmix64(state);
  return out;
}

}  // namespace listen

#endif  // LISTEN_RANDOM_HPP_
