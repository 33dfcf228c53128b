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

#include "mtboot/decoder.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <tuple>

#include "mtboot/error.h"
#include "mtboot/strings.h"

namespace mtboot {

void PhraseTable::Add(Tokens source, Tokens target, double log_prob) {
  if (source.empty() || target.empty()) {
    throw InvariantError("phrase pair with an empty side");
  }
  if (!std::isfinite(log_prob) || log_prob > 0.0) {
    throw InvariantError("phrase log-score must be finite and <= 0");
  }
  max_source_length_ = std::max(max_source_length_, source.size());
  entries_[std::move(source)].push_back(PhraseOption{std::move(target), log_prob});
  ++size_;
}

const std::vector<PhraseOption>* PhraseTable::Find(
    std::span<const std::string> source) const {
  auto it = entries_.find(Tokens(source.begin(), source.end()));
  return it == entries_.end() ? nullptr : &it->second;
}

PhraseTable ReadPhraseTable(std::istream& in) {
  PhraseTable table;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (StripAsciiWhitespace(line).empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      size_t pos = line.find("|||", start);
      fields.push_back(line.substr(start, pos == std::string::npos
                                              ? std::string::npos
                                              : pos - start));
      if (pos == std::string::npos) break;
      start = pos + 3;
    }
    if (fields.size() != 3) {
      throw FormatError("expected 'src ||| tgt ||| logprob'", line_number);
    }
    double log_prob = 0.0;
    if (!ParseDouble(fields[2], &log_prob)) {
      throw FormatError("unparsable log-score", line_number);
    }
    try {
      table.Add(SplitWhitespace(fields[0]), SplitWhitespace(fields[1]),
                log_prob);
    } catch (const InvariantError& e) {
      throw FormatError(e.what(), line_number);
    }
  }
  return table;
}

PhraseTable LoadPhraseTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return ReadPhraseTable(in);
}

void WritePhraseTable(std::ostream& out, const PhraseTable& table) {
  for (const auto& [source, options] : table.entries()) {
    for (const PhraseOption& option : options) {
      out << Join(source, " ") << " ||| " << Join(option.target, " ")
          << " ||| " << FormatDouble(option.log_prob) << '\n';
    }
  }
}

BigramLm BigramLm::Train(std::span<const Tokens> sentences, double alpha) {
  if (!(alpha > 0.0)) throw InvariantError("LM smoothing must be positive");
  BigramLm lm;
  lm.alpha_ = alpha;
  // Ids are assigned in first-seen order so training is order-deterministic.
  for (const Tokens& sentence : sentences) {
    for (const std::string& word : sentence) {
      lm.vocab_.emplace(word, static_cast<int>(lm.vocab_.size()) + 2);
    }
  }
  lm.eos_ = 0;
  lm.unk_ = 1;
  lm.event_count_ = static_cast<double>(lm.vocab_.size()) + 2.0;
  for (const Tokens& sentence : sentences) {
    int previous = kBos;
    for (const std::string& word : sentence) {
      const int id = lm.Id(word);
      lm.bigram_counts_[(static_cast<int64_t>(previous) << 32) ^
                        static_cast<uint32_t>(id)] += 1.0;
      lm.history_counts_[previous] += 1.0;
      previous = id;
    }
    lm.bigram_counts_[(static_cast<int64_t>(previous) << 32) ^
                      static_cast<uint32_t>(lm.eos_)] += 1.0;
    lm.history_counts_[previous] += 1.0;
  }
  return lm;
}

int BigramLm::Id(const std::string& word) const {
  auto it = vocab_.find(word);
  return it == vocab_.end() ? unk_ : it->second;
}

double BigramLm::LogProb(int previous, int word) const {
  double pair = 0.0;
  auto it = bigram_counts_.find((static_cast<int64_t>(previous) << 32) ^
                                static_cast<uint32_t>(word));
  if (it != bigram_counts_.end()) pair = it->second;
  double history = 0.0;
  auto hit = history_counts_.find(previous);
  if (hit != history_counts_.end()) history = hit->second;
  return std::log((pair + alpha_) / (history + alpha_ * event_count_));
}

double BigramLm::Score(std::span<const std::string> tokens) const {
  double total = 0.0;
  int previous = kBos;
  for (const std::string& word : tokens) {
    const int id = Id(word);
    total += LogProb(previous, id);
    previous = id;
  }
  return total + LogProb(previous, eos_);
}

std::vector<std::vector<std::vector<PhraseOption>>> CollectPhraseOptions(
    const Tokens& tokens, const PhraseTableModel& model) {
  const size_t n = tokens.size();
  const size_t max_len =
      std::max<size_t>(1, std::min(n, model.table.max_source_length()));
  std::vector<std::vector<std::vector<PhraseOption>>> options(n);
  for (size_t i = 0; i < n; ++i) {
    options[i].resize(std::min(max_len, n - i));
    for (size_t len = 1; len <= options[i].size(); ++len) {
      const std::vector<PhraseOption>* found = model.table.Find(
          std::span<const std::string>(tokens).subspan(i, len));
      if (found != nullptr) options[i][len - 1] = *found;
    }
    if (options[i][0].empty()) {
      options[i][0].push_back(PhraseOption{{tokens[i]}, model.unknown_log_prob});
    }
  }
  return options;
}

namespace {

struct Hypothesis {
  uint64_t coverage = 0;
  int last_end = 0;
  int last_word = BigramLm::kBos;
  std::array<double, kNumScoreComponents> components = {0, 0, 0, 0};
  double partial = 0.0;
  double future = 0.0;
  Tokens target;
  std::vector<AlignmentPoint> alignment;
};

// Strict "a ranks before b" on score, then target tokens, then alignment.
bool RanksBefore(double score_a, const Hypothesis& a, double score_b,
                 const Hypothesis& b) {
  if (score_a != score_b) return score_a > score_b;
  if (a.target != b.target) return a.target < b.target;
  return a.alignment < b.alignment;
}

using StateKey = std::tuple<uint64_t, int, int>;

// Keeps, per recombination state, every hypothesis tied for the best score.
void AddToStack(std::map<StateKey, std::vector<Hypothesis>>& stack,
                Hypothesis hypothesis) {
  auto& slot = stack[StateKey{hypothesis.coverage, hypothesis.last_end,
                              hypothesis.last_word}];
  if (slot.empty() || hypothesis.partial > slot.front().partial) {
    slot.clear();
    slot.push_back(std::move(hypothesis));
  } else if (hypothesis.partial == slot.front().partial) {
    slot.push_back(std::move(hypothesis));
  }
}

}  // namespace

TranslationResult Decode(const Tokens& tokens, const PhraseTableModel& model,
                         const std::string& source_id) {
  const int n = static_cast<int>(tokens.size());
  if (n == 0) throw InvariantError("cannot decode an empty input");
  if (n > 64) throw InvariantError("decoder input longer than 64 tokens");
  if (model.max_jump < 0) throw InvariantError("max_jump must be >= 0");
  for (double w : model.weights) {
    if (!std::isfinite(w)) throw InvariantError("non-finite model weight");
  }

  const auto options = CollectPhraseOptions(tokens, model);
  const ScoreWeights& w = model.weights;
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  // Optimistic per-span estimate (tm and word penalty only) for pruning.
  std::vector<std::vector<double>> future(n + 1,
                                          std::vector<double>(n + 1, kNegInf));
  for (int i = 0; i < n; ++i) {
    for (size_t len = 1; len <= options[i].size(); ++len) {
      for (const PhraseOption& option : options[i][len - 1]) {
        const double estimate =
            w[0] * option.log_prob -
            w[3] * static_cast<double>(option.target.size());
        future[i][i + len] = std::max(future[i][i + len], estimate);
      }
    }
  }
  for (int len = 2; len <= n; ++len) {
    for (int i = 0; i + len <= n; ++i) {
      for (int k = i + 1; k < i + len; ++k) {
        future[i][i + len] =
            std::max(future[i][i + len], future[i][k] + future[k][i + len]);
      }
    }
  }
  auto future_cost = [&](uint64_t coverage) {
    double total = 0.0;
    int i = 0;
    while (i < n) {
      if (coverage >> i & 1) {
        ++i;
        continue;
      }
      int j = i;
      while (j < n && !(coverage >> j & 1)) ++j;
      total += future[i][j];
      i = j;
    }
    return total;
  };

  const uint64_t full = n == 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1;
  std::vector<std::vector<Hypothesis>> stacks(n + 1);
  stacks[0].push_back(Hypothesis{});

  for (int covered = 0; covered < n; ++covered) {
    std::vector<std::map<StateKey, std::vector<Hypothesis>>> next(n + 1);
    for (const Hypothesis& hyp : stacks[covered]) {
      for (int start = 0; start < n; ++start) {
        if (std::abs(start - hyp.last_end) > model.max_jump) continue;
        for (size_t len = 1; len <= options[start].size(); ++len) {
          const int end = start + static_cast<int>(len);
          const uint64_t span_bits =
              (len == 64 ? ~uint64_t{0} : ((uint64_t{1} << len) - 1)) << start;
          if (hyp.coverage & span_bits) break;
          const uint64_t coverage = hyp.coverage | span_bits;
          if (coverage != full) {
            // Each later phrase can pull last_end back by at most
            // max_jump - 1, and some phrase must start at the first gap.
            // Beyond that reach the hypothesis cannot complete.
            const int first_gap = std::countr_one(coverage);
            const int uncovered = n - std::popcount(coverage);
            const int reach = model.max_jump + (uncovered - 1) *
                                                   std::max(0, model.max_jump - 1);
            if (end - first_gap > reach) continue;
          }
          for (const PhraseOption& option : options[start][len - 1]) {
            Hypothesis ext;
            ext.coverage = coverage;
            ext.last_end = end;
            ext.components = hyp.components;
            ext.components[0] += option.log_prob;
            int previous = hyp.last_word;
            for (const std::string& word : option.target) {
              const int id = model.lm.Id(word);
              ext.components[1] += model.lm.LogProb(previous, id);
              previous = id;
            }
            ext.last_word = previous;
            ext.components[2] -= std::abs(start - hyp.last_end);
            ext.components[3] -= static_cast<double>(option.target.size());
            ext.partial = CombinedScore(ext.components, w);
            ext.target = hyp.target;
            ext.alignment = hyp.alignment;
            const int target_start = static_cast<int>(ext.target.size());
            ext.target.insert(ext.target.end(), option.target.begin(),
                              option.target.end());
            for (int s = start; s < end; ++s) {
              for (int t = 0; t < static_cast<int>(option.target.size()); ++t) {
                ext.alignment.emplace_back(s, target_start + t);
              }
            }
            AddToStack(next[covered + len], std::move(ext));
          }
        }
      }
    }
    for (int size = covered + 1; size <= n; ++size) {
      for (auto& [key, hyps] : next[size]) {
        for (Hypothesis& hyp : hyps) stacks[size].push_back(std::move(hyp));
      }
    }
    // Stacks fed from several smaller stacks are re-recombined and pruned
    // once their last contributor has been expanded.
    const int ready = covered + 1;
    std::map<StateKey, std::vector<Hypothesis>> merged;
    for (Hypothesis& hyp : stacks[ready]) AddToStack(merged, std::move(hyp));
    stacks[ready].clear();
    for (auto& [key, hyps] : merged) {
      for (Hypothesis& hyp : hyps) {
        hyp.future = future_cost(hyp.coverage);
        stacks[ready].push_back(std::move(hyp));
      }
    }
    std::sort(stacks[ready].begin(), stacks[ready].end(),
              [](const Hypothesis& a, const Hypothesis& b) {
                return RanksBefore(a.partial + a.future, a,
                                   b.partial + b.future, b);
              });
    if (stacks[ready].size() > model.beam_size) {
      stacks[ready].resize(model.beam_size);
    }
  }

  const Hypothesis* best = nullptr;
  double best_total = kNegInf;
  TranslationScores best_scores;
  for (const Hypothesis& hyp : stacks[n]) {
    TranslationScores scores;
    scores.tm = hyp.components[0];
    scores.lm = hyp.components[1] + model.lm.LogProb(hyp.last_word, model.lm.eos());
    scores.reordering = hyp.components[2];
    scores.word_penalty = hyp.components[3];
    scores.Reweight(w);
    if (best == nullptr ||
        RanksBefore(scores.weighted_total, hyp, best_total, *best)) {
      best = &hyp;
      best_total = scores.weighted_total;
      best_scores = scores;
    }
  }
  if (best == nullptr) throw Error("decoder found no complete hypothesis");

  TranslationResult result;
  result.source_id = source_id;
  result.target_tokens = best->target;
  result.alignment = best->alignment;
  std::sort(result.alignment.begin(), result.alignment.end());
  result.scores = best_scores;
  return result;
}

std::optional<TranslationResult> DecoderTranslator::Translate(
    const std::string& id, const Tokens& tokens) const {
  return Decode(tokens, *model_, id);
}

}  // namespace mtboot
