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

#ifndef MTBOOT_DECODER_H_
#define MTBOOT_DECODER_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mtboot/corpus.h"
#include "mtboot/translate.h"

namespace mtboot {

struct PhraseOption {
  Tokens target;
  double log_prob = 0.0;
};

// Source phrase -> candidate target phrases, each with a translation-model
// log-score.
class PhraseTable {
 public:
  // Throws InvariantError on an empty side or a positive log-score.
  void Add(Tokens source, Tokens target, double log_prob);

  const std::vector<PhraseOption>* Find(std::span<const std::string> source) const;
  size_t max_source_length() const { return max_source_length_; }
  size_t size() const { return size_; }
  const std::map<Tokens, std::vector<PhraseOption>>& entries() const {
    return entries_;
  }

 private:
  std::map<Tokens, std::vector<PhraseOption>> entries_;
  size_t max_source_length_ = 0;
  size_t size_ = 0;
};

// `src ||| tgt ||| logprob` lines.
PhraseTable ReadPhraseTable(std::istream& in);
PhraseTable LoadPhraseTable(const std::string& path);
void WritePhraseTable(std::ostream& out, const PhraseTable& table);

// Bigram language model with add-alpha smoothing over the training
// vocabulary plus end-of-sentence and an unknown-word class.
class BigramLm {
 public:
  static constexpr int kBos = -1;

  BigramLm() = default;
  static BigramLm Train(std::span<const Tokens> sentences, double alpha = 0.1);

  // Vocabulary id, or the unknown-word id.
  int Id(const std::string& word) const;
  int eos() const { return eos_; }

  // log P(word | previous); `previous` may be kBos.
  double LogProb(int previous, int word) const;
  // Sum of bigram log-probs over <s> tokens </s>.
  double Score(std::span<const std::string> tokens) const;

  double alpha() const { return alpha_; }

 private:
  double alpha_ = 0.1;
  std::unordered_map<std::string, int> vocab_;
  int eos_ = 0;
  int unk_ = 1;
  // Event space size: vocabulary + eos + unk.
  double event_count_ = 2.0;
  std::unordered_map<int64_t, double> bigram_counts_;
  std::unordered_map<int, double> history_counts_;
};

// Log-linear phrase-based model with four components: translation model,
// language model, distance reordering, word penalty (-1 per target word).
struct PhraseTableModel {
  PhraseTable table;
  BigramLm lm;
  ScoreWeights weights = {1.0, 1.0, 0.5, 0.0};
  // Maximum |start of next source phrase - end of previous|.
  int max_jump = 2;
  // Log-score of the pass-through pair added for source tokens without a
  // single-token phrase.
  double unknown_log_prob = -10.0;
  // Hypotheses kept per stack after recombination.
  size_t beam_size = 256;
};

// Beam search over segmentations and jump-limited orders. Hypotheses that
// agree on coverage, last source position and last target word are
// recombined. Ties on the weighted total go to the lexicographically
// smallest target sequence. Throws InvariantError on empty input or more
// than 64 tokens.
TranslationResult Decode(const Tokens& tokens, const PhraseTableModel& model,
                         const std::string& source_id = "");

// Phrase options for every source span, including pass-through pairs for
// tokens with no single-token entry. `options[i][len - 1]` covers
// [i, i + len).
std::vector<std::vector<std::vector<PhraseOption>>> CollectPhraseOptions(
    const Tokens& tokens, const PhraseTableModel& model);

class DecoderTranslator : public Translator {
 public:
  explicit DecoderTranslator(const PhraseTableModel* model) : model_(model) {}
  std::optional<TranslationResult> Translate(
      const std::string& id, const Tokens& tokens) const override;

 private:
  const PhraseTableModel* model_;
};

}  // namespace mtboot

#endif  // MTBOOT_DECODER_H_
