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

#include "mtboot/maxent.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "model_io.h"
#include "mtboot/error.h"

namespace mtboot {
namespace {

constexpr char kMagic[] = "mtboot-maxent 1";

}  // namespace

MaxEntModel::MaxEntModel(std::vector<std::string> intents,
                         FeatureIndex features, Gazetteer gazetteer, double l2)
    : intents_(std::move(intents)),
      features_(std::move(features)),
      gazetteer_(std::move(gazetteer)),
      l2_(l2) {
  if (intents_.empty()) throw InvariantError("MaxEnt needs at least one intent");
  if (std::set<std::string>(intents_.begin(), intents_.end()).size() !=
      intents_.size()) {
    throw InvariantError("duplicate intent");
  }
  if (!(l2 >= 0.0) || std::isinf(l2)) throw InvariantError("bad L2 strength");
  weights_.assign(features_.size() * intents_.size(), 0.0);
}

std::optional<int> MaxEntModel::IntentId(const std::string& intent) const {
  auto it = std::find(intents_.begin(), intents_.end(), intent);
  if (it == intents_.end()) return std::nullopt;
  return static_cast<int>(it - intents_.begin());
}

void MaxEntModel::Save(std::ostream& out) const {
  out << kMagic << '\n';
  out << "l2 " << FormatDouble(l2_) << '\n';
  internal::WriteLines(out, "intents", intents_);
  gazetteer_.Write(out);
  internal::WriteLines(out, "features", features_.names());
  internal::WriteNumbers(out, "weights", weights_);
}

MaxEntModel MaxEntModel::Load(std::istream& in) {
  internal::ModelReader reader(in);
  if (reader.Line() != kMagic) throw FormatError("not a MaxEnt model file", 1);
  const double l2 = reader.Number("l2");
  std::vector<std::string> intents = reader.Lines("intents");
  Gazetteer gazetteer = Gazetteer::Read(in, reader.line_number());
  FeatureIndex features;
  for (const std::string& name : reader.Lines("features")) features.Add(name);
  MaxEntModel model(std::move(intents), std::move(features),
                    std::move(gazetteer), l2);
  std::vector<double> weights = reader.Numbers("weights");
  if (weights.size() != model.weights_.size()) {
    throw FormatError("weight count does not match intents and features", 0);
  }
  model.weights_ = std::move(weights);
  return model;
}

void MaxEntModel::SaveToFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  Save(out);
}

MaxEntModel MaxEntModel::LoadFromFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return Load(in);
}

EncodedExample EncodeExample(const MaxEntModel& model, const Tokens& tokens) {
  EncodedExample example;
  example.features =
      model.features().Lookup(ExtractIntentFeatures(tokens, model.gazetteer()));
  return example;
}

std::vector<double> IntentPosteriors(const MaxEntModel& model,
                                     std::span<const int> features) {
  const size_t k = model.num_intents();
  const std::span<const double> w = model.weights();
  std::vector<double> logits(k, 0.0);
  for (int f : features) {
    const double* row = &w[model.WeightIndex(f, 0)];
    for (size_t c = 0; c < k; ++c) logits[c] += row[c];
  }
  const double max = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - max);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

std::vector<double> IntentPosteriors(const MaxEntModel& model,
                                     const Tokens& tokens) {
  return IntentPosteriors(model, EncodeExample(model, tokens).features);
}

ObjectiveValue MaxEntObjective(const MaxEntModel& model,
                               std::span<const EncodedExample> data) {
  const size_t k = model.num_intents();
  const std::span<const double> w = model.weights();
  ObjectiveValue result;
  result.gradient.assign(w.size(), 0.0);
  for (const EncodedExample& example : data) {
    if (example.intent < 0 || example.intent >= static_cast<int>(k)) {
      throw InvariantError("training example without a valid intent");
    }
    std::vector<double> posteriors = IntentPosteriors(model, example.features);
    result.value -= std::log(posteriors[example.intent]);
    posteriors[example.intent] -= 1.0;
    for (int f : example.features) {
      double* row = &result.gradient[model.WeightIndex(f, 0)];
      for (size_t c = 0; c < k; ++c) row[c] += posteriors[c];
    }
  }
  double norm = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    norm += w[i] * w[i];
    result.gradient[i] += model.l2() * w[i];
  }
  result.value += 0.5 * model.l2() * norm;
  return result;
}

IntentPrediction ClassifyIntent(const MaxEntModel& model, const Tokens& tokens) {
  const std::vector<double> posteriors = IntentPosteriors(model, tokens);
  size_t best = 0;
  for (size_t c = 1; c < posteriors.size(); ++c) {
    if (posteriors[c] > posteriors[best]) best = c;
  }
  return IntentPrediction{model.intents()[best], posteriors[best]};
}

MaxEntModel TrainIntentClassifier(std::span<const Utterance> corpus,
                                  const Gazetteer& gazetteer,
                                  const TrainingOptions& options,
                                  OptimizerResult* trace) {
  if (corpus.empty()) throw InvariantError("cannot train on an empty corpus");
  std::set<std::string> intents;
  FeatureIndex features;
  std::vector<std::vector<std::string>> extracted;
  extracted.reserve(corpus.size());
  for (const Utterance& u : corpus) {
    intents.insert(u.intent);
    extracted.push_back(ExtractIntentFeatures(u.tokens, gazetteer));
    for (const std::string& feature : extracted.back()) features.Add(feature);
  }
  MaxEntModel model(std::vector<std::string>(intents.begin(), intents.end()),
                    std::move(features), gazetteer, options.l2);

  std::vector<EncodedExample> data;
  data.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    data.push_back(EncodedExample{model.features().Lookup(extracted[i]),
                                  *model.IntentId(corpus[i].intent)});
  }
  extracted.clear();

  MaxEntModel scratch = model;
  auto objective = [&](std::span<const double> x, std::span<double> gradient) {
    std::copy(x.begin(), x.end(), scratch.mutable_weights().begin());
    ObjectiveValue value = MaxEntObjective(scratch, data);
    std::copy(value.gradient.begin(), value.gradient.end(), gradient.begin());
    return value.value;
  };
  OptimizerOptions optimizer;
  optimizer.max_iterations = options.max_iterations;
  optimizer.gradient_tolerance = options.tolerance;
  OptimizerResult result = MinimizeLbfgs(
      objective, std::vector<double>(model.num_weights(), 0.0), optimizer);
  std::copy(result.x.begin(), result.x.end(), model.mutable_weights().begin());
  if (trace != nullptr) *trace = std::move(result);
  return model;
}

}  // namespace mtboot
