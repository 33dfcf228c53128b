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

#include "mtboot/translate.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {

double CombinedScore(std::span<const double> components,
                     std::span<const double> weights) {
  if (components.size() != weights.size()) {
    throw InvariantError("score components and weights differ in length");
  }
  double total = 0.0;
  for (size_t i = 0; i < components.size(); ++i) {
    total += components[i] * weights[i];
  }
  return total;
}

void TranslationScores::Reweight(const ScoreWeights& weights) {
  const auto values = components();
  weighted_total = CombinedScore(values, weights);
}

std::optional<TranslationResult> FileTranslator::Translate(
    const std::string& id, const Tokens& /*tokens*/) const {
  auto it = translations_.find(id);
  if (it == translations_.end()) return std::nullopt;
  return it->second;
}

TranslationFile ReadTranslations(std::istream& in) {
  TranslationFile file;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (StripAsciiWhitespace(line).empty() || line.front() == '#') continue;
    const std::vector<std::string> fields = Split(line, '\t');
    if (fields.size() != 8) {
      throw FormatError("expected 8 tab-separated fields, got " +
                            std::to_string(fields.size()),
                        line_number);
    }
    TranslationResult result;
    result.source_id = fields[0];
    if (result.source_id.empty()) throw FormatError("empty id", line_number);
    result.target_tokens = SplitWhitespace(fields[1]);
    if (result.target_tokens.empty()) {
      throw FormatError("empty target", line_number);
    }
    std::set<AlignmentPoint> points;
    for (const std::string& pair : SplitWhitespace(fields[2])) {
      const size_t dash = pair.find('-');
      long long s = 0;
      long long t = 0;
      if (dash == std::string::npos ||
          !ParseInt(std::string_view(pair).substr(0, dash), &s) ||
          !ParseInt(std::string_view(pair).substr(dash + 1), &t) || s < 0 ||
          t < 0) {
        throw FormatError("bad alignment pair '" + pair + "'", line_number);
      }
      if (t >= static_cast<long long>(result.target_tokens.size())) {
        throw FormatError("alignment target index out of range in '" + pair +
                              "'",
                          line_number);
      }
      points.emplace(static_cast<int>(s), static_cast<int>(t));
    }
    result.alignment.assign(points.begin(), points.end());
    double* numbers[] = {&result.scores.tm, &result.scores.lm,
                         &result.scores.reordering,
                         &result.scores.word_penalty,
                         &result.scores.weighted_total};
    for (int i = 0; i < 5; ++i) {
      if (!ParseDouble(fields[3 + i], numbers[i]) || std::isinf(*numbers[i])) {
        throw FormatError("unparsable score '" + fields[3 + i] + "'",
                          line_number);
      }
    }
    auto [it, inserted] =
        file.translations.insert_or_assign(result.source_id, std::move(result));
    (void)it;
    if (!inserted) ++file.duplicate_ids;
  }
  return file;
}

TranslationFile LoadTranslations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return ReadTranslations(in);
}

std::string FormatTranslation(const TranslationResult& result) {
  std::string out = result.source_id;
  out += '\t';
  out += Join(result.target_tokens, " ");
  out += '\t';
  for (size_t i = 0; i < result.alignment.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(result.alignment[i].first) + '-' +
           std::to_string(result.alignment[i].second);
  }
  for (double value : {result.scores.tm, result.scores.lm,
                       result.scores.reordering, result.scores.word_penalty,
                       result.scores.weighted_total}) {
    out += '\t';
    out += FormatDouble(value);
  }
  return out;
}

void WriteTranslations(std::ostream& out, const TranslationMap& translations) {
  for (const auto& [id, result] : translations) {
    out << FormatTranslation(result) << '\n';
  }
}

void SaveTranslations(const std::string& path,
                      const TranslationMap& translations) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  WriteTranslations(out, translations);
}

const char* ProjectionErrorName(ProjectionError error) {
  switch (error) {
    case ProjectionError::kNone:
      return "NONE";
    case ProjectionError::kUnalignedSlot:
      return "UNALIGNED_SLOT";
    case ProjectionError::kOverlap:
      return "OVERLAP";
  }
  return "UNKNOWN";
}

Projection ProjectAnnotations(const Utterance& source,
                              const TranslationResult& result,
                              std::string_view target_language) {
  if (result.source_id != source.id) {
    throw InvariantError("translation " + result.source_id +
                         " does not belong to utterance " + source.id);
  }
  const int source_length = static_cast<int>(source.tokens.size());
  const int target_length = static_cast<int>(result.target_tokens.size());
  for (const auto& [s, t] : result.alignment) {
    if (s < 0 || s >= source_length || t < 0 || t >= target_length) {
      throw InvariantError("alignment point out of range for " + source.id);
    }
  }

  Utterance target;
  target.id = source.id;
  target.language = std::string(target_language);
  target.domain = source.domain;
  target.intent = source.intent;
  target.tokens = result.target_tokens;
  target.source_id = source.id;

  for (const SlotSpan& slot : source.slots) {
    int lo = target_length;
    int hi = -1;
    for (const auto& [s, t] : result.alignment) {
      if (s >= slot.start && s < slot.end) {
        lo = std::min(lo, t);
        hi = std::max(hi, t);
      }
    }
    if (hi < 0) return Projection{std::nullopt, ProjectionError::kUnalignedSlot};
    target.slots.push_back(MakeSlot(target.tokens, slot.slot_type, lo, hi + 1));
  }
  std::stable_sort(target.slots.begin(), target.slots.end(),
                   [](const SlotSpan& a, const SlotSpan& b) {
                     return a.start < b.start;
                   });
  for (size_t i = 1; i < target.slots.size(); ++i) {
    if (target.slots[i].start < target.slots[i - 1].end) {
      return Projection{std::nullopt, ProjectionError::kOverlap};
    }
  }
  target.Validate();
  return Projection{std::move(target), ProjectionError::kNone};
}

}  // namespace mtboot
