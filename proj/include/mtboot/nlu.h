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

#ifndef MTBOOT_NLU_H_
#define MTBOOT_NLU_H_

#include <span>
#include <string>
#include <vector>

#include "mtboot/corpus.h"
#include "mtboot/crf.h"
#include "mtboot/features.h"
#include "mtboot/maxent.h"

namespace mtboot {

struct NluHypothesis {
  std::string intent;
  double intent_confidence = 0.0;
  std::vector<SlotSpan> slots;
};

// Slot tagger plus intent classifier.
struct NluModels {
  CrfModel tagger;
  MaxEntModel classifier;

  NluHypothesis Recognize(const Tokens& tokens) const;
};

NluModels TrainNlu(std::span<const Utterance> corpus, const Gazetteer& gazetteer,
                   const TrainingOptions& tagger_options,
                   const TrainingOptions& classifier_options);

}  // namespace mtboot

#endif  // MTBOOT_NLU_H_
