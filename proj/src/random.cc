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

#include "mtboot/random.h"

#include <algorithm>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

uint64_t DeriveSeed(uint64_t seed, std::string_view tag) {
  return SplitMix64(SplitMix64(seed) ^ Fingerprint(tag));
}

double Rng::Uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

size_t Rng::SampleIndex(std::span<const double> weights) {
  return WeightedSampler(weights).Sample(*this);
}

WeightedSampler::WeightedSampler(std::span<const double> weights) {
  cumulative_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvariantError("sampling weight must be >= 0");
    total += w;
    cumulative_.push_back(total);
  }
  if (!(total > 0.0)) throw InvariantError("sampling weights sum to zero");
}

size_t WeightedSampler::Sample(Rng& rng) const {
  const double target = rng.Uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  size_t index = static_cast<size_t>(it - cumulative_.begin());
  if (index >= cumulative_.size()) {
    // Rounding put the target on the total; take the last positive entry.
    index = cumulative_.size() - 1;
    while (index > 0 && cumulative_[index] == cumulative_[index - 1]) --index;
  }
  return index;
}

}  // namespace mtboot
