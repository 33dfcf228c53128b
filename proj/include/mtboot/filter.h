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

#ifndef MTBOOT_FILTER_H_
#define MTBOOT_FILTER_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mtboot/corpus.h"
#include "mtboot/nlu.h"
#include "mtboot/translate.h"

namespace mtboot {

enum class RemovalReason {
  kNoTranslation,
  kUnalignedSlot,
  kOverlap,
  kIntentMismatch,
  kSlotMismatch,
  kLowConfidence,
  kBelowThreshold,
};

const char* ReasonName(RemovalReason reason);
std::optional<RemovalReason> ParseReason(std::string_view name);
RemovalReason FromProjectionError(ProjectionError error);

enum class FilterMode { kIntent, kIntentSlots, kIntentConfidence };
enum class SlotComparison { kTypesOnly, kTypesAndValues };

const char* FilterModeName(FilterMode mode);
std::optional<FilterMode> ParseFilterMode(std::string_view name);
const char* SlotComparisonName(SlotComparison comparison);
std::optional<SlotComparison> ParseSlotComparison(std::string_view name);

struct FilterConfig {
  FilterMode mode = FilterMode::kIntent;
  // Step-5 intent posteriors below this are removed in kIntentConfidence.
  double confidence_threshold = 0.1;
  // Score filter keeps normalized scores >= mean + multiplier * stdev.
  // -inf disables the filter.
  double score_multiplier = 0.0;
  SlotComparison slot_comparison = SlotComparison::kTypesOnly;
  // Compare against the source's gold annotation instead of the step-1 NLU
  // output.
  bool use_gold_source_labels = false;

  // Throws ConfigError.
  void Validate() const;
};

struct FilterOutcome {
  std::vector<Utterance> kept;
  std::vector<std::pair<std::string, RemovalReason>> removed;

  std::map<RemovalReason, int> ReasonCounts() const;
};

// Writes `id TAB reason` lines.
void SaveRemoved(const std::string& path, const FilterOutcome& outcome);

// Round-trip check for one already-projected translation: back-translates
// the target tokens, recognizes them with the source-language models, and
// compares against the source's reading. Returns the removal reason, if any.
std::optional<RemovalReason> CheckRoundTrip(const Utterance& source,
                                            const Utterance& projected,
                                            const Translator& backward,
                                            const NluModels& source_nlu,
                                            const FilterConfig& config);

// Full semantic round-trip filter: translate, project, back-translate,
// re-recognize, compare. Kept utterances are the projected translations.
FilterOutcome RoundtripFilter(std::span<const Utterance> source_corpus,
                              const Translator& forward,
                              const Translator& backward,
                              const NluModels& source_nlu,
                              const FilterConfig& config,
                              std::string_view target_language = "");

// Score divided by target length. Throws InvariantError on length 0.
double NormalizeScore(double weighted_total, size_t target_length);

struct DomainStats {
  std::string domain;
  double mean = 0.0;
  // Population standard deviation.
  double stdev = 0.0;
  int count = 0;
};

// Translation looked up by Utterance::origin_id(). Throws InvariantError when
// one is missing.
std::map<std::string, DomainStats> ComputeDomainStats(
    std::span<const Utterance> corpus, const TranslationMap& translations);

// Keeps an utterance iff its normalized score reaches mean + k * stdev of its
// domain. Throws ConfigError for a domain missing from `stats`.
FilterOutcome ScoreFilter(std::span<const Utterance> corpus,
                          const TranslationMap& translations,
                          const std::map<std::string, DomainStats>& stats,
                          double k);

}  // namespace mtboot

#endif  // MTBOOT_FILTER_H_
