//
// Copyright 2026 The mtboot Authors
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
//

#ifndef MTBOOT_RANDOM_H_
#define MTBOOT_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace mtboot {

// Mixes a parent seed with a tag into an independent child seed. Used to
// derive per-stage and per-utterance streams from one top-level seed.
uint64_t DeriveSeed(uint64_t seed, std::string_view tag);

// Deterministic random source. The standard distributions are avoided on
// purpose: their output is not specified across standard libraries, while
// the engine's is.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform();

  // Index drawn with probability proportional to `weights`. Weights must be
  // non-negative with a positive sum.
  size_t SampleIndex(std::span<const double> weights);

  bool Bernoulli(double p) { return Uniform() < p; }

  uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Precomputed cumulative table for repeated draws from one distribution.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::span<const double> weights);
  size_t Sample(Rng& rng) const;
  size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace mtboot

#endif  // MTBOOT_RANDOM_H_
