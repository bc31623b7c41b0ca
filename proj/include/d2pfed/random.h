// Copyright 2026 The D2P-Fed Authors.
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

#ifndef D2PFED_RANDOM_H_
#define D2PFED_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <string_view>

namespace d2pfed {

// SplitMix64 finalizer. Used to derive independent sub-seeds.
constexpr uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, for turning a domain label into a seed component.
constexpr uint64_t HashLabel(std::string_view label) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives a seed for one logical sampling site, e.g.
// DeriveSeed(master, "mask", round, i, j). Distinct label/index tuples give
// statistically independent streams.
uint64_t DeriveSeed(uint64_t master, std::string_view label,
                    std::initializer_list<uint64_t> indices = {});

// xoshiro256** seeded through SplitMix64. Satisfies
// UniformRandomBitGenerator, but the helpers below are used instead of the
// <random> distributions so that streams are identical across standard
// libraries.
class RandomStream {
 public:
  using result_type = uint64_t;

  explicit RandomStream(uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return Next(); }
  uint64_t Next();

  // Uniform on [0, 1) with 53 random bits.
  double UniformDouble();

  // Uniform on [0, bound), unbiased. bound must be positive.
  uint64_t UniformBelow(uint64_t bound);

  bool Bernoulli(double p) { return UniformDouble() < p; }

  // Standard normal via Box-Muller (one draw per call, the pair's second
  // value is discarded to keep the stream position simple).
  double Gaussian();

 private:
  uint64_t s_[4];
};

}  // namespace d2pfed

#endif  // D2PFED_RANDOM_H_
