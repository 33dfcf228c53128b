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

#include "mtboot/postprocess.h"

#include <map>
#include <optional>

#include "mtboot/error.h"
#include "mtboot/random.h"

namespace mtboot {
namespace {

constexpr char kMixStream[] = "mix";

std::map<std::string, const Utterance*> IndexByOrigin(
    std::span<const Utterance> corpus) {
  std::map<std::string, const Utterance*> index;
  for (const Utterance& u : corpus) index.emplace(u.id, &u);
  return index;
}

// Returns the retained utterance, or nullopt on a multiplicity mismatch.
std::optional<Utterance> Retain(const Utterance& translated,
                                const Utterance& source,
                                const std::set<std::string>& types,
                                int* retained) {
  std::map<std::string, std::vector<const SlotSpan*>> source_slots;
  std::map<std::string, int> target_counts;
  for (const SlotSpan& slot : source.slots) {
    if (types.count(slot.slot_type)) source_slots[slot.slot_type].push_back(&slot);
  }
  for (const SlotSpan& slot : translated.slots) {
    if (types.count(slot.slot_type)) ++target_counts[slot.slot_type];
  }
  for (const std::string& type : types) {
    const size_t in_source =
        source_slots.count(type) ? source_slots.at(type).size() : 0;
    const size_t in_target = target_counts.count(type) ? target_counts.at(type) : 0;
    if (in_source != in_target) return std::nullopt;
  }

  Utterance out = translated;
  std::map<std::string, size_t> seen;
  for (size_t i = 0; i < out.slots.size(); ++i) {
    const std::string type = out.slots[i].slot_type;
    if (!types.count(type)) continue;
    const SlotSpan& original = *source_slots.at(type)[seen[type]++];
    const std::span<const std::string> value(
        source.tokens.data() + original.start, original.length());
    out = ReplaceSlotTokens(out, i, value);
    ++*retained;
  }
  return out;
}

std::vector<Utterance> Postprocess(std::span<const Utterance> translated,
                                   std::span<const Utterance> source,
                                   const CatalogMap& catalogs,
                                   const std::set<std::string>& retain_types,
                                   const std::set<std::string>& resample_types,
                                   const PostprocessConfig& config,
                                   PostprocessStats* stats) {
  config.Validate();
  std::map<std::string, WeightedSampler> samplers;
  for (const std::string& type : resample_types) {
    auto it = catalogs.find(type);
    if (it == catalogs.end()) {
      throw ConfigError("no catalog for resampled slot type " + type);
    }
    it->second.Validate();
    samplers.emplace(type, WeightedSampler(it->second.weights()));
  }
  const auto sources = IndexByOrigin(source);
  const uint64_t mix_seed = DeriveSeed(config.seed, kMixStream);

  PostprocessStats local;
  std::vector<Utterance> out;
  out.reserve(translated.size());
  for (const Utterance& u : translated) {
    Utterance current = u;
    if (!retain_types.empty()) {
      auto it = sources.find(u.origin_id());
      if (it == sources.end()) {
        throw InvariantError("no source utterance for " + u.id);
      }
      std::optional<Utterance> retained =
          Retain(u, *it->second, retain_types, &local.retained);
      if (retained) {
        current = std::move(*retained);
      } else {
        ++local.multiplicity_mismatches;
      }
    }
    if (!resample_types.empty()) {
      Rng draws(DeriveSeed(config.seed, u.id));
      Rng coins(DeriveSeed(mix_seed, u.id));
      for (size_t i = 0; i < current.slots.size(); ++i) {
        const std::string type = current.slots[i].slot_type;
        auto sampler = samplers.find(type);
        if (sampler == samplers.end()) continue;
        // Always draw so the catalog stream is the same for every mix value.
        const CatalogEntry& entry =
            catalogs.at(type).entries[sampler->second.Sample(draws)];
        if (retain_types.count(type) && !coins.Bernoulli(config.mix_probability)) {
          continue;
        }
        current = ReplaceSlotTokens(current, i, entry.tokens);
        ++local.resampled;
      }
    }
    current.Validate();
    out.push_back(std::move(current));
  }
  if (stats != nullptr) {
    stats->resampled += local.resampled;
    stats->retained += local.retained;
    stats->multiplicity_mismatches += local.multiplicity_mismatches;
  }
  return out;
}

}  // namespace

void PostprocessConfig::Validate() const {
  if (!(mix_probability >= 0.0 && mix_probability <= 1.0)) {
    throw ConfigError("mix probability must lie in [0, 1]");
  }
}

std::vector<Utterance> ResampleSlots(std::span<const Utterance> corpus,
                                     const CatalogMap& catalogs,
                                     const PostprocessConfig& config,
                                     PostprocessStats* stats) {
  return Postprocess(corpus, {}, catalogs, {}, config.resample_slots, config,
                     stats);
}

std::vector<Utterance> RetainOriginalSlots(std::span<const Utterance> translated,
                                           std::span<const Utterance> source,
                                           const PostprocessConfig& config,
                                           PostprocessStats* stats) {
  return Postprocess(translated, source, {}, config.retain_original_slots, {},
                     config, stats);
}

std::vector<Utterance> CombinedPostprocess(std::span<const Utterance> translated,
                                           std::span<const Utterance> source,
                                           const CatalogMap& catalogs,
                                           const PostprocessConfig& config,
                                           PostprocessStats* stats) {
  return Postprocess(translated, source, catalogs,
                     config.retain_original_slots, config.resample_slots,
                     config, stats);
}

}  // namespace mtboot
