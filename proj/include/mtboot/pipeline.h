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

#ifndef MTBOOT_PIPELINE_H_
#define MTBOOT_PIPELINE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mtboot/corpus.h"
#include "mtboot/crf.h"
#include "mtboot/decoder.h"
#include "mtboot/error.h"
#include "mtboot/eval.h"
#include "mtboot/filter.h"
#include "mtboot/nlu.h"
#include "mtboot/postprocess.h"

namespace mtboot {

// Canonical stage order; a run executes a subsequence of it.
inline const std::vector<std::string>& AllStages() {
  static const std::vector<std::string> stages = {
      "translate", "project", "filter-semantic", "filter-score",
      "postprocess", "train", "evaluate"};
  return stages;
}

// Settings of one translation direction in decoder mode.
struct DecoderConfig {
  std::string phrase_table;
  // Target-side text (one tokenized sentence per line) for the bigram LM.
  std::string lm_text;
  double lm_alpha = 0.1;
  ScoreWeights weights = {1.0, 1.0, 0.5, 0.0};
  int max_jump = 2;
  double unknown_log_prob = -10.0;
  size_t beam_size = 256;
};

struct PipelineConfig {
  uint64_t seed = 0;
  std::vector<std::string> stages = AllStages();
  std::string source_language = "src";
  std::string target_language = "tgt";

  // Paths are absolute or relative to the config file.
  std::string source_corpus;
  // Starting corpus for runs that skip translate/project.
  std::string input_corpus;
  std::string test_set;
  std::vector<std::string> catalogs;
  std::vector<std::string> source_catalogs;
  // Pre-trained models for runs that evaluate without training.
  std::string tagger_model;
  std::string classifier_model;

  // "file": pre-computed translations; "decoder": built-in phrase decoder.
  std::string translation_mode = "file";
  std::string translations_forward;
  std::string translations_backward;
  DecoderConfig forward_decoder;
  DecoderConfig backward_decoder;

  FilterConfig filter;
  PostprocessConfig postprocess;
  TrainingOptions tagger;
  TrainingOptions classifier;

  // Effective configuration as canonical JSON (sorted keys, all defaults).
  std::string CanonicalJson() const;
  std::string FingerprintHex() const;

  // Throws ConfigError: stage list order, required paths per stage, files
  // existing, value ranges.
  void Validate() const;
};

// Parses JSON text; relative paths are resolved against `base_dir`.
PipelineConfig ParsePipelineConfig(std::string_view json_text,
                                   const std::string& base_dir);
PipelineConfig LoadPipelineConfig(const std::string& path);

// Comma-separated stage list.
std::vector<std::string> ParseStageList(std::string_view text);

struct StageReport {
  std::string stage;
  long input_count = 0;
  long output_count = 0;
  std::map<std::string, long> removed;
  // Stage-specific tallies (duplicate translation ids, mismatches, ...).
  std::map<std::string, long> counters;
  double seconds = 0.0;
  std::string config_fingerprint;
  bool failed = false;
  std::string error;

  long removed_total() const;
};

// Durations go to a separate file so that report.tsv is reproducible.
void WriteStageReports(std::ostream& out, const std::vector<StageReport>& reports);
void WriteTimings(std::ostream& out, const std::vector<StageReport>& reports);

struct PipelineResult {
  std::vector<Utterance> corpus;
  std::optional<NluModels> models;
  std::optional<SemerReport> semer;
  std::vector<StageReport> reports;
};

// Raised when a stage throws; `reports` ends with the failed stage.
class StageFailure : public Error {
 public:
  StageFailure(const std::string& stage, const std::string& message,
               std::vector<StageReport> reports)
      : Error("stage " + stage + " failed: " + message),
        stage_(stage),
        reports_(std::move(reports)) {}
  const std::string& stage() const { return stage_; }
  const std::vector<StageReport>& reports() const { return reports_; }

 private:
  std::string stage_;
  std::vector<StageReport> reports_;
};

// Runs the configured stages in order, writing every intermediate artifact,
// report.tsv and timings.tsv into `out_dir`.
PipelineResult RunPipeline(const PipelineConfig& config,
                           const std::string& out_dir);

// Relative change in percent: (condition - baseline) / baseline * 100.
double RelativeChange(double baseline, double condition);

// "20.72 (-3.09)": condition SemER in percent and its relative change.
std::string FormatWithChange(double baseline_percent, double condition_percent);

struct ComparisonRow {
  std::string scope;
  double baseline_percent = 0.0;
  double condition_percent = 0.0;
  double relative_change = 0.0;
};

// Overall row, then every domain present in both reports. Throws
// InvariantError when the reports cover different test sets.
std::vector<ComparisonRow> CompareRuns(const SemerReport& baseline,
                                       const SemerReport& condition);
std::string FormatComparison(const std::vector<ComparisonRow>& rows);

}  // namespace mtboot

#endif  // MTBOOT_PIPELINE_H_
