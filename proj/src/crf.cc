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

#include "mtboot/crf.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "model_io.h"
#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

constexpr char kMagic[] = "mtboot-crf 1";

double LogSumExp(std::span<const double> values) {
  double max = -std::numeric_limits<double>::infinity();
  for (double v : values) max = std::max(max, v);
  if (std::isinf(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

using Matrix = std::vector<std::vector<double>>;

// emissions[t][y] = sum of emission weights of the features at t.
Matrix EmissionScores(const CrfModel& model, const EncodedSequence& sequence) {
  const size_t num_labels = model.num_labels();
  const std::span<const double> w = model.weights();
  Matrix scores(sequence.size(), std::vector<double>(num_labels, 0.0));
  for (size_t t = 0; t < sequence.size(); ++t) {
    for (int f : sequence.features[t]) {
      const double* row = &w[model.EmissionIndex(f, 0)];
      for (size_t y = 0; y < num_labels; ++y) scores[t][y] += row[y];
    }
  }
  return scores;
}

// Forward (alpha) and backward (beta) tables in log space.
struct Lattice {
  Matrix emissions;
  Matrix alpha;
  Matrix beta;
  double log_z = 0.0;
};

Lattice ForwardBackward(const CrfModel& model, const EncodedSequence& sequence) {
  const size_t n = sequence.size();
  const size_t num_labels = model.num_labels();
  const std::span<const double> w = model.weights();
  Lattice lattice;
  lattice.emissions = EmissionScores(model, sequence);
  lattice.alpha.assign(n, std::vector<double>(num_labels));
  lattice.beta.assign(n, std::vector<double>(num_labels));
  std::vector<double> terms(num_labels);

  for (size_t y = 0; y < num_labels; ++y) {
    lattice.alpha[0][y] = w[model.StartIndex(y)] + lattice.emissions[0][y];
  }
  for (size_t t = 1; t < n; ++t) {
    for (size_t y = 0; y < num_labels; ++y) {
      for (size_t p = 0; p < num_labels; ++p) {
        terms[p] = lattice.alpha[t - 1][p] + w[model.TransitionIndex(p, y)];
      }
      lattice.alpha[t][y] = LogSumExp(terms) + lattice.emissions[t][y];
    }
  }
  for (size_t y = 0; y < num_labels; ++y) lattice.beta[n - 1][y] = 0.0;
  for (size_t t = n - 1; t-- > 0;) {
    for (size_t y = 0; y < num_labels; ++y) {
      for (size_t next = 0; next < num_labels; ++next) {
        terms[next] = w[model.TransitionIndex(y, next)] +
                      lattice.emissions[t + 1][next] + lattice.beta[t + 1][next];
      }
      lattice.beta[t][y] = LogSumExp(terms);
    }
  }
  lattice.log_z = LogSumExp(lattice.alpha[n - 1]);
  return lattice;
}

}  // namespace

std::vector<std::string> BioLabelSet(const std::set<std::string>& slot_types) {
  std::vector<std::string> labels = {"O"};
  for (const std::string& type : slot_types) {
    labels.push_back("B-" + type);
    labels.push_back("I-" + type);
  }
  return labels;
}

std::vector<std::string> SlotsToBio(const Utterance& utterance) {
  std::vector<std::string> labels(utterance.tokens.size(), "O");
  for (const SlotSpan& slot : utterance.slots) {
    labels[slot.start] = "B-" + slot.slot_type;
    for (int i = slot.start + 1; i < slot.end; ++i) {
      labels[i] = "I-" + slot.slot_type;
    }
  }
  return labels;
}

std::vector<SlotSpan> BioToSlots(const Tokens& tokens,
                                 std::span<const std::string> labels) {
  if (labels.size() != tokens.size()) {
    throw InvariantError("label count differs from token count");
  }
  std::vector<SlotSpan> slots;
  std::string open_type;
  int open_start = -1;
  auto close = [&](int end) {
    if (open_start >= 0) {
      slots.push_back(MakeSlot(tokens, open_type, open_start, end));
    }
    open_start = -1;
    open_type.clear();
  };
  for (size_t i = 0; i < labels.size(); ++i) {
    const std::string& label = labels[i];
    const int pos = static_cast<int>(i);
    if (label.size() > 2 && label[1] == '-' &&
        (label[0] == 'B' || label[0] == 'I')) {
      const std::string type = label.substr(2);
      if (label[0] == 'I' && open_start >= 0 && open_type == type) continue;
      close(pos);
      open_type = type;
      open_start = pos;
    } else {
      close(pos);
    }
  }
  close(static_cast<int>(labels.size()));
  return slots;
}

CrfModel::CrfModel(std::vector<std::string> labels, FeatureIndex features,
                   Gazetteer gazetteer, double l2)
    : labels_(std::move(labels)),
      features_(std::move(features)),
      gazetteer_(std::move(gazetteer)),
      l2_(l2) {
  if (labels_.empty()) throw InvariantError("CRF needs at least one label");
  const std::set<std::string> label_set(labels_.begin(), labels_.end());
  if (label_set.size() != labels_.size()) {
    throw InvariantError("duplicate CRF label");
  }
  for (const std::string& label : labels_) {
    if (label.rfind("I-", 0) == 0 && !label_set.count("B-" + label.substr(2))) {
      throw InvariantError("label " + label + " has no B- counterpart");
    }
  }
  if (!(l2 >= 0.0) || std::isinf(l2)) throw InvariantError("bad L2 strength");
  weights_.assign(features_.size() * labels_.size() +
                      labels_.size() * labels_.size() + labels_.size(),
                  0.0);
}

std::optional<int> CrfModel::LabelId(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

void CrfModel::Save(std::ostream& out) const {
  out << kMagic << '\n';
  out << "l2 " << FormatDouble(l2_) << '\n';
  internal::WriteLines(out, "labels", labels_);
  gazetteer_.Write(out);
  internal::WriteLines(out, "features", features_.names());
  internal::WriteNumbers(out, "weights", weights_);
}

CrfModel CrfModel::Load(std::istream& in) {
  internal::ModelReader reader(in);
  if (reader.Line() != kMagic) throw FormatError("not a CRF model file", 1);
  const double l2 = reader.Number("l2");
  std::vector<std::string> labels = reader.Lines("labels");
  Gazetteer gazetteer = Gazetteer::Read(in, reader.line_number());
  FeatureIndex features;
  for (const std::string& name : reader.Lines("features")) features.Add(name);
  CrfModel model(std::move(labels), std::move(features), std::move(gazetteer),
                 l2);
  std::vector<double> weights = reader.Numbers("weights");
  if (weights.size() != model.weights_.size()) {
    throw FormatError("weight count does not match labels and features", 0);
  }
  model.weights_ = std::move(weights);
  return model;
}

void CrfModel::SaveToFile(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  Save(out);
}

CrfModel CrfModel::LoadFromFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return Load(in);
}

EncodedSequence EncodeSequence(const CrfModel& model, const Tokens& tokens) {
  EncodedSequence sequence;
  for (const auto& features : ExtractSequenceFeatures(tokens, model.gazetteer())) {
    sequence.features.push_back(model.features().Lookup(features));
  }
  return sequence;
}

EncodedSequence EncodeSequence(const CrfModel& model, const Tokens& tokens,
                               std::span<const std::string> labels) {
  if (labels.size() != tokens.size()) {
    throw InvariantError("label count differs from token count");
  }
  EncodedSequence sequence = EncodeSequence(model, tokens);
  for (const std::string& label : labels) {
    std::optional<int> id = model.LabelId(label);
    if (!id) throw InvariantError("unknown label " + label);
    sequence.labels.push_back(*id);
  }
  return sequence;
}

double CrfPathScore(const CrfModel& model, const EncodedSequence& sequence,
                    std::span<const int> labels) {
  const std::span<const double> w = model.weights();
  double score = 0.0;
  for (size_t t = 0; t < sequence.size(); ++t) {
    const int y = labels[t];
    score += t == 0 ? w[model.StartIndex(y)]
                    : w[model.TransitionIndex(labels[t - 1], y)];
    for (int f : sequence.features[t]) score += w[model.EmissionIndex(f, y)];
  }
  return score;
}

double CrfLogPartition(const CrfModel& model, const EncodedSequence& sequence) {
  if (sequence.size() == 0) return 0.0;
  return ForwardBackward(model, sequence).log_z;
}

std::vector<std::vector<double>> CrfMarginals(const CrfModel& model,
                                              const EncodedSequence& sequence) {
  if (sequence.size() == 0) return {};
  const Lattice lattice = ForwardBackward(model, sequence);
  Matrix marginals = lattice.alpha;
  for (size_t t = 0; t < sequence.size(); ++t) {
    for (size_t y = 0; y < model.num_labels(); ++y) {
      marginals[t][y] =
          std::exp(lattice.alpha[t][y] + lattice.beta[t][y] - lattice.log_z);
    }
  }
  return marginals;
}

ObjectiveValue CrfObjective(const CrfModel& model,
                            std::span<const EncodedSequence> data) {
  const size_t num_labels = model.num_labels();
  const std::span<const double> w = model.weights();
  ObjectiveValue result;
  result.gradient.assign(w.size(), 0.0);
  std::vector<double>& g = result.gradient;

  for (const EncodedSequence& sequence : data) {
    const size_t n = sequence.size();
    if (n == 0) continue;
    if (sequence.labels.size() != n) {
      throw InvariantError("training sequence without labels");
    }
    const Lattice lattice = ForwardBackward(model, sequence);
    result.value += lattice.log_z - CrfPathScore(model, sequence, sequence.labels);

    // Expected counts minus observed counts.
    for (size_t t = 0; t < n; ++t) {
      for (size_t y = 0; y < num_labels; ++y) {
        double p = std::exp(lattice.alpha[t][y] + lattice.beta[t][y] -
                            lattice.log_z);
        if (static_cast<int>(y) == sequence.labels[t]) p -= 1.0;
        if (p == 0.0) continue;
        for (int f : sequence.features[t]) g[model.EmissionIndex(f, y)] += p;
        if (t == 0) g[model.StartIndex(y)] += p;
      }
      if (t == 0) continue;
      for (size_t a = 0; a < num_labels; ++a) {
        for (size_t b = 0; b < num_labels; ++b) {
          g[model.TransitionIndex(a, b)] +=
              std::exp(lattice.alpha[t - 1][a] + w[model.TransitionIndex(a, b)] +
                       lattice.emissions[t][b] + lattice.beta[t][b] -
                       lattice.log_z);
        }
      }
      g[model.TransitionIndex(sequence.labels[t - 1], sequence.labels[t])] -= 1.0;
    }
  }

  double norm = 0.0;
  for (size_t i = 0; i < w.size(); ++i) {
    norm += w[i] * w[i];
    g[i] += model.l2() * w[i];
  }
  result.value += 0.5 * model.l2() * norm;
  return result;
}

ViterbiPath CrfViterbi(const CrfModel& model, const EncodedSequence& sequence) {
  const size_t n = sequence.size();
  ViterbiPath path;
  if (n == 0) return path;
  const size_t num_labels = model.num_labels();
  const std::span<const double> w = model.weights();
  const Matrix emissions = EmissionScores(model, sequence);
  Matrix best(n, std::vector<double>(num_labels));
  std::vector<std::vector<int>> back(n, std::vector<int>(num_labels, 0));
  for (size_t y = 0; y < num_labels; ++y) {
    best[0][y] = w[model.StartIndex(y)] + emissions[0][y];
  }
  for (size_t t = 1; t < n; ++t) {
    for (size_t y = 0; y < num_labels; ++y) {
      double top = -std::numeric_limits<double>::infinity();
      int arg = 0;
      for (size_t p = 0; p < num_labels; ++p) {
        const double score = best[t - 1][p] + w[model.TransitionIndex(p, y)];
        if (score > top) {
          top = score;
          arg = static_cast<int>(p);
        }
      }
      best[t][y] = top + emissions[t][y];
      back[t][y] = arg;
    }
  }
  int last = 0;
  for (size_t y = 1; y < num_labels; ++y) {
    if (best[n - 1][y] > best[n - 1][last]) last = static_cast<int>(y);
  }
  path.score = best[n - 1][last];
  path.labels.assign(n, 0);
  path.labels[n - 1] = last;
  for (size_t t = n - 1; t > 0; --t) path.labels[t - 1] = back[t][path.labels[t]];
  return path;
}

std::vector<SlotSpan> TagSlots(const CrfModel& model, const Tokens& tokens) {
  if (tokens.empty()) return {};
  const ViterbiPath path = CrfViterbi(model, EncodeSequence(model, tokens));
  std::vector<std::string> labels;
  labels.reserve(path.labels.size());
  for (int y : path.labels) labels.push_back(model.labels()[y]);
  return BioToSlots(tokens, labels);
}

CrfModel TrainSlotTagger(std::span<const Utterance> corpus,
                         const Gazetteer& gazetteer,
                         const TrainingOptions& options,
                         OptimizerResult* trace) {
  if (corpus.empty()) throw InvariantError("cannot train on an empty corpus");
  std::set<std::string> slot_types;
  FeatureIndex features;
  std::vector<std::vector<std::vector<std::string>>> extracted;
  extracted.reserve(corpus.size());
  for (const Utterance& u : corpus) {
    for (const SlotSpan& slot : u.slots) slot_types.insert(slot.slot_type);
    extracted.push_back(ExtractSequenceFeatures(u.tokens, gazetteer));
    for (const auto& position : extracted.back()) {
      for (const std::string& feature : position) features.Add(feature);
    }
  }
  CrfModel model(BioLabelSet(slot_types), std::move(features), gazetteer,
                 options.l2);

  std::vector<EncodedSequence> data;
  data.reserve(corpus.size());
  for (size_t i = 0; i < corpus.size(); ++i) {
    EncodedSequence sequence;
    for (const auto& position : extracted[i]) {
      sequence.features.push_back(model.features().Lookup(position));
    }
    for (const std::string& label : SlotsToBio(corpus[i])) {
      sequence.labels.push_back(*model.LabelId(label));
    }
    data.push_back(std::move(sequence));
  }
  extracted.clear();

  CrfModel scratch = model;
  auto objective = [&](std::span<const double> x, std::span<double> gradient) {
    std::copy(x.begin(), x.end(), scratch.mutable_weights().begin());
    ObjectiveValue value = CrfObjective(scratch, data);
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
