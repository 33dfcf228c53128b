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

#ifndef MTBOOT_MAXENT_H_
#define MTBOOT_MAXENT_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtboot/corpus.h"
#include "mtboot/crf.h"
#include "mtboot/features.h"
#include "mtboot/optimizer.h"

namespace mtboot {

// Multinomial logistic regression over bag-of-features, one weight per
// (feature, intent), stored feature-major.
class MaxEntModel {
 public:
  MaxEntModel() = default;
  MaxEntModel(std::vector<std::string> intents, FeatureIndex features,
              Gazetteer gazetteer, double l2);

  size_t num_intents() const { return intents_.size(); }
  size_t num_weights() const { return weights_.size(); }
  const std::vector<std::string>& intents() const { return intents_; }
  std::optional<int> IntentId(const std::string& intent) const;
  const FeatureIndex& features() const { return features_; }
  const Gazetteer& gazetteer() const { return gazetteer_; }
  double l2() const { return l2_; }

  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }
  size_t WeightIndex(int feature, int intent) const {
    return static_cast<size_t>(feature) * intents_.size() + intent;
  }

  void Save(std::ostream& out) const;
  static MaxEntModel Load(std::istream& in);
  void SaveToFile(const std::string& path) const;
  static MaxEntModel LoadFromFile(const std::string& path);

  bool operator==(const MaxEntModel&) const = default;

 private:
  std::vector<std::string> intents_;
  FeatureIndex features_;
  Gazetteer gazetteer_;
  double l2_ = 0.0;
  std::vector<double> weights_;
};

struct EncodedExample {
  std::vector<int> features;
  int intent = -1;
};

EncodedExample EncodeExample(const MaxEntModel& model, const Tokens& tokens);

// Softmax posterior over intents for pre-encoded features.
std::vector<double> IntentPosteriors(const MaxEntModel& model,
                                     std::span<const int> features);
std::vector<double> IntentPosteriors(const MaxEntModel& model,
                                     const Tokens& tokens);

// Sum of -log p(intent | x), plus (l2 / 2) * |w|^2.
ObjectiveValue MaxEntObjective(const MaxEntModel& model,
                               std::span<const EncodedExample> data);

struct IntentPrediction {
  std::string intent;
  // Softmax posterior of `intent`.
  double confidence = 0.0;
};

// Argmax intent; ties go to the earlier intent in sorted order.
IntentPrediction ClassifyIntent(const MaxEntModel& model, const Tokens& tokens);

// Throws InvariantError on an empty corpus.
MaxEntModel TrainIntentClassifier(std::span<const Utterance> corpus,
                                  const Gazetteer& gazetteer,
                                  const TrainingOptions& options,
                                  OptimizerResult* trace = nullptr);

}  // namespace mtboot

#endif  // MTBOOT_MAXENT_H_
