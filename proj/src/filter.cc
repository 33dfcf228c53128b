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

#include "mtboot/filter.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

constexpr std::pair<RemovalReason, const char*> kReasonNames[] = {
    {RemovalReason::kNoTranslation, "NO_TRANSLATION"},
    {RemovalReason::kUnalignedSlot, "UNALIGNED_SLOT"},
    {RemovalReason::kOverlap, "OVERLAP"},
    {RemovalReason::kIntentMismatch, "INTENT_MISMATCH"},
    {RemovalReason::kSlotMismatch, "SLOT_MISMATCH"},
    {RemovalReason::kLowConfidence, "LOW_CONFIDENCE"},
    {RemovalReason::kBelowThreshold, "BELOW_THRESHOLD"},
};

std::vector<std::string> SlotKeys(const std::vector<SlotSpan>& slots,
                                  SlotComparison comparison) {
  std::vector<std::string> keys;
  keys.reserve(slots.size());
  for (const SlotSpan& slot : slots) {
    keys.push_back(comparison == SlotComparison::kTypesOnly
                       ? slot.slot_type
                       : slot.slot_type + '\t' + AsciiLower(slot.value));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

const char* ReasonName(RemovalReason reason) {
  for (const auto& [value, name] : kReasonNames) {
    if (value == reason) return name;
  }
  return "UNKNOWN";
}

std::optional<RemovalReason> ParseReason(std::string_view name) {
  for (const auto& [value, text] : kReasonNames) {
    if (name == text) return value;
  }
  return std::nullopt;
}

RemovalReason FromProjectionError(ProjectionError error) {
  return error == ProjectionError::kOverlap ? RemovalReason::kOverlap
                                            : RemovalReason::kUnalignedSlot;
}

const char* FilterModeName(FilterMode mode) {
  switch (mode) {
    case FilterMode::kIntent:
      return "INTENT";
    case FilterMode::kIntentSlots:
      return "INTENT_SLOTS";
    case FilterMode::kIntentConfidence:
      return "INTENT_CONFIDENCE";
  }
  return "UNKNOWN";
}

std::optional<FilterMode> ParseFilterMode(std::string_view name) {
  for (FilterMode mode : {FilterMode::kIntent, FilterMode::kIntentSlots,
                          FilterMode::kIntentConfidence}) {
    if (name == FilterModeName(mode)) return mode;
  }
  return std::nullopt;
}

const char* SlotComparisonName(SlotComparison comparison) {
  return comparison == SlotComparison::kTypesOnly ? "TYPES_ONLY"
                                                  : "TYPES_AND_VALUES";
}

std::optional<SlotComparison> ParseSlotComparison(std::string_view name) {
  if (name == "TYPES_ONLY") return SlotComparison::kTypesOnly;
  if (name == "TYPES_AND_VALUES") return SlotComparison::kTypesAndValues;
  return std::nullopt;
}

void FilterConfig::Validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw ConfigError("confidence threshold must lie in [0, 1]");
  }
  if (std::isnan(score_multiplier)) {
    throw ConfigError("score multiplier must be a number");
  }
}

std::map<RemovalReason, int> FilterOutcome::ReasonCounts() const {
  std::map<RemovalReason, int> counts;
  for (const auto& [id, reason] : removed) ++counts[reason];
  return counts;
}

void SaveRemoved(const std::string& path, const FilterOutcome& outcome) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& [id, reason] : outcome.removed) {
    out << id << '\t' << ReasonName(reason) << '\n';
  }
}

std::optional<RemovalReason> CheckRoundTrip(const Utterance& source,
                                            const Utterance& projected,
                                            const Translator& backward,
                                            const NluModels& source_nlu,
                                            const FilterConfig& config) {
  // Step 1: the source reading.
  NluHypothesis reference;
  if (config.use_gold_source_labels) {
    reference = NluHypothesis{source.intent, 1.0, source.slots};
  } else {
    reference = source_nlu.Recognize(source.tokens);
  }
  // Steps 4 and 5: back-translate the raw target tokens and recognize them.
  std::optional<TranslationResult> back =
      backward.Translate(projected.id, projected.tokens);
  if (!back) return RemovalReason::kNoTranslation;
  const NluHypothesis round_trip = source_nlu.Recognize(back->target_tokens);

  // Step 6 and its extensions.
  if (round_trip.intent != reference.intent) {
    return RemovalReason::kIntentMismatch;
  }
  if (config.mode == FilterMode::kIntentSlots &&
      SlotKeys(round_trip.slots, config.slot_comparison) !=
          SlotKeys(reference.slots, config.slot_comparison)) {
    return RemovalReason::kSlotMismatch;
  }
  if (config.mode == FilterMode::kIntentConfidence &&
      round_trip.intent_confidence < config.confidence_threshold) {
    return RemovalReason::kLowConfidence;
  }
  return std::nullopt;
}

FilterOutcome RoundtripFilter(std::span<const Utterance> source_corpus,
                              const Translator& forward,
                              const Translator& backward,
                              const NluModels& source_nlu,
                              const FilterConfig& config,
                              std::string_view target_language) {
  config.Validate();
  FilterOutcome outcome;
  for (const Utterance& source : source_corpus) {
    std::optional<TranslationResult> translation =
        forward.Translate(source.id, source.tokens);
    if (!translation) {
      outcome.removed.emplace_back(source.id, RemovalReason::kNoTranslation);
      continue;
    }
    Projection projection =
        ProjectAnnotations(source, *translation, target_language);
    if (!projection.utterance) {
      outcome.removed.emplace_back(source.id,
                                   FromProjectionError(projection.error));
      continue;
    }
    std::optional<RemovalReason> reason = CheckRoundTrip(
        source, *projection.utterance, backward, source_nlu, config);
    if (reason) {
      outcome.removed.emplace_back(source.id, *reason);
    } else {
      outcome.kept.push_back(std::move(*projection.utterance));
    }
  }
  return outcome;
}

double NormalizeScore(double weighted_total, size_t target_length) {
  if (target_length == 0) throw InvariantError("cannot normalize by length 0");
  return weighted_total / static_cast<double>(target_length);
}

namespace {

double NormalizedScoreOf(const Utterance& u, const TranslationMap& translations) {
  auto it = translations.find(u.origin_id());
  if (it == translations.end()) {
    throw InvariantError("no translation score for " + u.id);
  }
  return NormalizeScore(it->second.scores.weighted_total,
                        it->second.target_tokens.size());
}

}  // namespace

std::map<std::string, DomainStats> ComputeDomainStats(
    std::span<const Utterance> corpus, const TranslationMap& translations) {
  std::map<std::string, std::vector<double>> scores;
  for (const Utterance& u : corpus) {
    scores[u.domain].push_back(NormalizedScoreOf(u, translations));
  }
  std::map<std::string, DomainStats> stats;
  for (const auto& [domain, values] : scores) {
    DomainStats s;
    s.domain = domain;
    s.count = static_cast<int>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / values.size();
    double squares = 0.0;
    for (double v : values) squares += (v - s.mean) * (v - s.mean);
    s.stdev = std::sqrt(squares / values.size());
    stats.emplace(domain, s);
  }
  return stats;
}

FilterOutcome ScoreFilter(std::span<const Utterance> corpus,
                          const TranslationMap& translations,
                          const std::map<std::string, DomainStats>& stats,
                          double k) {
  if (std::isnan(k)) throw ConfigError("score multiplier must be a number");
  FilterOutcome outcome;
  for (const Utterance& u : corpus) {
    auto it = stats.find(u.domain);
    if (it == stats.end()) {
      throw ConfigError("no score statistics for domain " + u.domain);
    }
    // An infinite k is a vacuous (or total) threshold even when stdev is 0.
    const double threshold =
        std::isinf(k) ? k : it->second.mean + k * it->second.stdev;
    if (NormalizedScoreOf(u, translations) >= threshold) {
      outcome.kept.push_back(u);
    } else {
      outcome.removed.emplace_back(u.id, RemovalReason::kBelowThreshold);
    }
  }
  return outcome;
}

}  // namespace mtboot
