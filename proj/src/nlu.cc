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

#include "mtboot/nlu.h"

namespace mtboot {

NluHypothesis NluModels::Recognize(const Tokens& tokens) const {
  const IntentPrediction prediction = ClassifyIntent(classifier, tokens);
  return NluHypothesis{prediction.intent, prediction.confidence,
                       TagSlots(tagger, tokens)};
}

NluModels TrainNlu(std::span<const Utterance> corpus, const Gazetteer& gazetteer,
                   const TrainingOptions& tagger_options,
                   const TrainingOptions& classifier_options) {
  return NluModels{TrainSlotTagger(corpus, gazetteer, tagger_options),
                   TrainIntentClassifier(corpus, gazetteer, classifier_options)};
}

}  // namespace mtboot
