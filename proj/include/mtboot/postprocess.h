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

#ifndef MTBOOT_POSTPROCESS_H_
#define MTBOOT_POSTPROCESS_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mtboot/corpus.h"

namespace mtboot {

struct PostprocessConfig {
  // Slot types whose values are redrawn from target-language catalogs.
  std::set<std::string> resample_slots;
  // Slot types whose values are copied back from the source utterance.
  std::set<std::string> retain_original_slots;
  // For types in both sets: chance that an instance is resampled rather than
  // keeping the source value.
  double mix_probability = 0.5;
  uint64_t seed = 0;

  void Validate() const;
};

struct PostprocessStats {
  int resampled = 0;
  int retained = 0;
  // Utterances passed through because a retained type occurs a different
  // number of times in source and translation.
  int multiplicity_mismatches = 0;
};

// Randomness is drawn per utterance from (seed, utterance id), so the output
// does not depend on corpus order or partitioning.
std::vector<Utterance> ResampleSlots(std::span<const Utterance> corpus,
                                     const CatalogMap& catalogs,
                                     const PostprocessConfig& config,
                                     PostprocessStats* stats = nullptr);

// Source utterances are matched by Utterance::origin_id(); slots by type and
// occurrence order.
std::vector<Utterance> RetainOriginalSlots(
    std::span<const Utterance> translated, std::span<const Utterance> source,
    const PostprocessConfig& config, PostprocessStats* stats = nullptr);

// Retention, then resampling. Instances of types in both sets are resampled
// with probability mix_probability.
std::vector<Utterance> CombinedPostprocess(std::span<const Utterance> translated,
                                           std::span<const Utterance> source,
                                           const CatalogMap& catalogs,
                                           const PostprocessConfig& config,
                                           PostprocessStats* stats = nullptr);

}  // namespace mtboot

#endif  // MTBOOT_POSTPROCESS_H_
