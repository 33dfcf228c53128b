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

#ifndef MTBOOT_TRANSLATE_H_
#define MTBOOT_TRANSLATE_H_

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mtboot/corpus.h"

namespace mtboot {

// Component order used by score vectors: tm, lm, reordering, word penalty.
inline constexpr size_t kNumScoreComponents = 4;
using ScoreWeights = std::array<double, kNumScoreComponents>;

// Dot product of component scores and weights. Throws InvariantError on a
// length mismatch.
double CombinedScore(std::span<const double> components,
                     std::span<const double> weights);

struct TranslationScores {
  double tm = 0.0;
  double lm = 0.0;
  double reordering = 0.0;
  double word_penalty = 0.0;
  double weighted_total = 0.0;

  std::array<double, kNumScoreComponents> components() const {
    return {tm, lm, reordering, word_penalty};
  }
  // Sets weighted_total from the components.
  void Reweight(const ScoreWeights& weights);

  bool operator==(const TranslationScores&) const = default;
};

// (source index, target index)
using AlignmentPoint = std::pair<int, int>;

struct TranslationResult {
  std::string source_id;
  Tokens target_tokens;
  // Sorted, duplicate-free.
  std::vector<AlignmentPoint> alignment;
  TranslationScores scores;

  bool operator==(const TranslationResult&) const = default;
};

using TranslationMap = std::map<std::string, TranslationResult>;

// Produces a translation for one utterance, or nothing when none exists
// (e.g. a file-backed translator missing the id).
class Translator {
 public:
  virtual ~Translator() = default;
  virtual std::optional<TranslationResult> Translate(
      const std::string& id, const Tokens& tokens) const = 0;
};

// Serves pre-computed translations keyed by utterance id.
class FileTranslator : public Translator {
 public:
  explicit FileTranslator(TranslationMap translations)
      : translations_(std::move(translations)) {}
  std::optional<TranslationResult> Translate(
      const std::string& id, const Tokens& tokens) const override;
  const TranslationMap& translations() const { return translations_; }

 private:
  TranslationMap translations_;
};

// Translation file line:
//   id TAB target tokens TAB "s-t" pairs TAB tm TAB lm TAB reord TAB wp TAB total
struct TranslationFile {
  TranslationMap translations;
  // Lines whose id was already present; the later line wins.
  int duplicate_ids = 0;
};

TranslationFile ReadTranslations(std::istream& in);
TranslationFile LoadTranslations(const std::string& path);
std::string FormatTranslation(const TranslationResult& result);
void WriteTranslations(std::ostream& out, const TranslationMap& translations);
void SaveTranslations(const std::string& path,
                      const TranslationMap& translations);

enum class ProjectionError { kNone, kUnalignedSlot, kOverlap };

const char* ProjectionErrorName(ProjectionError error);

struct Projection {
  std::optional<Utterance> utterance;
  ProjectionError error = ProjectionError::kNone;
};

// Carries the source annotation onto the translation: each slot becomes the
// smallest contiguous target range covering the target positions aligned to
// its source tokens. The result keeps the source id, records it as
// source_id, and takes `target_language`.
Projection ProjectAnnotations(const Utterance& source,
                              const TranslationResult& result,
                              std::string_view target_language = "");

}  // namespace mtboot

#endif  // MTBOOT_TRANSLATE_H_
