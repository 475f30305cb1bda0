// Copyright 2026 The activetrack Authors
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

#ifndef ACTIVETRACK_RNG_H_
#define ACTIVETRACK_RNG_H_

#include <cstdint>

namespace activetrack {

// Source of random draws. Everything in the library that consumes randomness
// takes an Rng& so tests can substitute crafted streams.
class Rng {
 public:
  virtual ~Rng() = default;

  // Uniform in [0, 1).
  virtual double Uniform() = 0;

  // Standard normal.
  virtual double Normal() = 0;

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [lo, hi].
  int UniformInt(int lo, int hi);
};

// Counter-based generator: draw i of stream (seed, stream_id, sub_id) is a
// pure function of those values and i, so any draw can be replayed without
// reproducing the draws before it in other streams.
//
//   u64(i)    = mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
//   Uniform() = (u64 >> 11) * 2^-53
//   Normal()  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), two uniforms per draw
//
// mix64 is the SplitMix64 finalizer; key = mix64 of the seed combined with
// the stream and sub-stream identifiers.
class CounterRng final : public Rng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream_id = 0,
                      std::uint64_t sub_id = 0);

  std::uint64_t NextU64();
  double Uniform() override;
  double Normal() override;
  using Rng::Uniform;

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t Mix64(std::uint64_t x);

// Named stream identifiers used by the episode harness.
enum class Stream : std::uint64_t {
  kSetup = 1,
  kTargets = 2,
  kSensor = 3,
  kPlanner = 4,
};

inline CounterRng MakeStream(std::uint64_t seed, Stream stream,
                             std::uint64_t sub_id = 0) {
  return CounterRng(seed, static_cast<std::uint64_t>(stream), sub_id);
}

}  // namespace activetrack

#endif  // ACTIVETRACK_RNG_H_
