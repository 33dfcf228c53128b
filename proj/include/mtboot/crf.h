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

#ifndef MTBOOT_CRF_H_
#define MTBOOT_CRF_H_

#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mtboot/corpus.h"
#include "mtboot/features.h"
#include "mtboot/optimizer.h"

namespace mtboot {

struct TrainingOptions {
  double l2 = 1.0;
  int max_iterations = 150;
  double tolerance = 1e-4;
};

// "O" followed by B-/I- labels for each slot type in sorted order.
std::vector<std::string> BioLabelSet(const std::set<std::string>& slot_types);

// Per-token BIO labels of an annotated utterance.
std::vector<std::string> SlotsToBio(const Utterance& utterance);

// Decodes BIO labels into spans. An I-X that does not continue an X span
// starts a new one.
std::vector<SlotSpan> BioToSlots(const Tokens& tokens,
                                 std::span<const std::string> labels);

// Linear-chain CRF. Weights are stored flat as
// [emission: feature x label | transition: label x label | start: label].
class CrfModel {
 public:
  CrfModel() = default;
  CrfModel(std::vector<std::string> labels, FeatureIndex features,
           Gazetteer gazetteer, double l2);

  size_t num_labels() const { return labels_.size(); }
  size_t num_features() const { return features_.size(); }
  size_t num_weights() const { return weights_.size(); }

  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> LabelId(const std::string& label) const;
  const FeatureIndex& features() const { return features_; }
  const Gazetteer& gazetteer() const { return gazetteer_; }
  double l2() const { return l2_; }

  std::span<const double> weights() const { return weights_; }
  std::span<double> mutable_weights() { return weights_; }

  size_t EmissionIndex(int feature, int label) const {
    return static_cast<size_t>(feature) * labels_.size() + label;
  }
  size_t TransitionIndex(int from, int to) const {
    return features_.size() * labels_.size() + from * labels_.size() + to;
  }
  size_t StartIndex(int label) const {
    return features_.size() * labels_.size() + labels_.size() * labels_.size() +
           label;
  }

  // Versioned text format; Save(Load(Save(m))) reproduces the same bytes.
  void Save(std::ostream& out) const;
  static CrfModel Load(std::istream& in);
  void SaveToFile(const std::string& path) const;
  static CrfModel LoadFromFile(const std::string& path);

  bool operator==(const CrfModel&) const = default;

 private:
  std::vector<std::string> labels_;
  FeatureIndex features_;
  Gazetteer gazetteer_;
  double l2_ = 0.0;
  std::vector<double> weights_;
};

// Feature ids per position plus, for training data, label ids.
struct EncodedSequence {
  std::vector<std::vector<int>> features;
  std::vector<int> labels;
  size_t size() const { return features.size(); }
};

EncodedSequence EncodeSequence(const CrfModel& model, const Tokens& tokens);
// Throws InvariantError when a label is not in the model's label set.
EncodedSequence EncodeSequence(const CrfModel& model, const Tokens& tokens,
                               std::span<const std::string> labels);

// Unnormalized log-score of a label path.
double CrfPathScore(const CrfModel& model, const EncodedSequence& sequence,
                    std::span<const int> labels);
// log Z(x) by the forward recursion in log space.
double CrfLogPartition(const CrfModel& model, const EncodedSequence& sequence);
// Per-position label marginals from forward-backward.
std::vector<std::vector<double>> CrfMarginals(const CrfModel& model,
                                              const EncodedSequence& sequence);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> gradient;
};

// Sum over sequences of log Z(x) - score(y|x), plus (l2 / 2) * |w|^2.
ObjectiveValue CrfObjective(const CrfModel& model,
                            std::span<const EncodedSequence> data);

struct ViterbiPath {
  std::vector<int> labels;
  double score = 0.0;
};

// Highest-scoring path; ties go to the smaller label id at each step.
ViterbiPath CrfViterbi(const CrfModel& model, const EncodedSequence& sequence);

std::vector<SlotSpan> TagSlots(const CrfModel& model, const Tokens& tokens);

// Builds the label set and feature index from `corpus` and fits weights by
// L-BFGS. Deterministic given corpus order. Throws InvariantError on an
// empty corpus.
CrfModel TrainSlotTagger(std::span<const Utterance> corpus,
                         const Gazetteer& gazetteer,
                         const TrainingOptions& options,
                         OptimizerResult* trace = nullptr);

}  // namespace mtboot

#endif  // MTBOOT_CRF_H_
