// Copyright 2026 The tfnfraud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace tfn::numkit {

// splitmix64 output function; also used on its own to derive substream seeds.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

// Stateless splitmix64 finalizer of a single value.
std::uint64_t mix64(std::uint64_t value) noexcept;

// xoshiro256++ seeded from a 64-bit seed through splitmix64.
//
// The stream for a given seed is fixed by the algorithm alone (no platform
// dependent distributions are involved in next_u64/uniform), so the raw
// output can be compared against a committed golden file.
//
// fork(i) derives a child generator from the construction seed and the stream
// index only; it does not consume or depend on draws from the parent.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;

  // Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;

  // Standard normal via Box-Muller (two uniforms per draw, no caching).
  double normal() noexcept;

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  // True with probability p.
  bool bernoulli(double p) noexcept { return uniform() < p; }

  Rng fork(std::uint64_t stream_index) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }

  template <typename T>
  void shuffle(std::span<T> items) noexcept {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_;
};

}  // namespace tfn::numkit
