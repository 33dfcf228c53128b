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

#ifndef MTBOOT_EVAL_H_
#define MTBOOT_EVAL_H_

#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "mtboot/corpus.h"
#include "mtboot/nlu.h"

namespace mtboot {

struct SlotAlignment {
  int matches = 0;
  int substitutions = 0;
  int deletions = 0;
  int insertions = 0;
};

// Pairs reference and hypothesis slots of the same type: first every
// reference slot takes the earliest unused hypothesis slot with an equal
// value (case-insensitive), then leftovers pair in order as substitutions.
// Unpaired reference slots are deletions, unpaired hypothesis slots
// insertions.
SlotAlignment AlignSlots(std::span<const SlotSpan> reference,
                         std::span<const SlotSpan> hypothesis);

struct SemerCounts {
  long insertions = 0;
  long deletions = 0;
  long substitutions = 0;
  long intent_errors = 0;
  // Reference slots plus one intent per utterance.
  long reference_count = 0;
  long utterances = 0;

  long errors() const {
    return insertions + deletions + substitutions + intent_errors;
  }
  double semer() const {
    return reference_count == 0 ? 0.0
                                : static_cast<double>(errors()) / reference_count;
  }
  SemerCounts& operator+=(const SemerCounts& other);
  bool operator==(const SemerCounts&) const = default;
};

struct SemerReport {
  SemerCounts overall;
  std::map<std::string, SemerCounts> per_domain;
  // Identifies the reference set, so reports over different sets are not
  // compared.
  std::string test_set;

  double semer() const { return overall.semer(); }
  bool operator==(const SemerReport&) const = default;
};

using HypothesisMap = std::map<std::string, NluHypothesis>;

// Throws InvariantError listing reference ids without a hypothesis.
SemerReport ComputeSemer(std::span<const Utterance> references,
                         const HypothesisMap& hypotheses);

// Runs `models` over every reference utterance.
HypothesisMap Recognize(const NluModels& models,
                        std::span<const Utterance> references);

std::string TestSetFingerprint(std::span<const Utterance> references);

// Tab-separated: overall row then one row per domain, SemER to 4 decimals.
void WriteSemerReport(std::ostream& out, const SemerReport& report);
SemerReport ReadSemerReport(std::istream& in);
void SaveSemerReport(const std::string& path, const SemerReport& report);
SemerReport LoadSemerReport(const std::string& path);

}  // namespace mtboot

#endif  // MTBOOT_EVAL_H_
