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

#include "mtboot/pipeline.h"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "mtboot/random.h"
#include "mtboot/strings.h"

namespace mtboot {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string Resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

json TrainingJson(const TrainingOptions& options) {
  return json{{"l2", options.l2},
              {"max_iterations", options.max_iterations},
              {"tolerance", options.tolerance}};
}

TrainingOptions ParseTraining(const json& j, TrainingOptions options) {
  options.l2 = j.value("l2", options.l2);
  options.max_iterations = j.value("max_iterations", options.max_iterations);
  options.tolerance = j.value("tolerance", options.tolerance);
  return options;
}

json DecoderJson(const DecoderConfig& d) {
  return json{{"phrase_table", d.phrase_table},
              {"lm_text", d.lm_text},
              {"lm_alpha", d.lm_alpha},
              {"weights", d.weights},
              {"max_jump", d.max_jump},
              {"unknown_log_prob", d.unknown_log_prob},
              {"beam_size", d.beam_size}};
}

DecoderConfig ParseDecoder(const json& j, const std::string& base_dir) {
  DecoderConfig d;
  d.phrase_table = Resolve(base_dir, j.value("phrase_table", std::string()));
  d.lm_text = Resolve(base_dir, j.value("lm_text", std::string()));
  d.lm_alpha = j.value("lm_alpha", d.lm_alpha);
  if (j.contains("weights")) {
    const std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    if (weights.size() != kNumScoreComponents) {
      throw ConfigError("decoder weights need 4 values (tm, lm, reordering, "
                        "word penalty)");
    }
    std::copy(weights.begin(), weights.end(), d.weights.begin());
  }
  d.max_jump = j.value("max_jump", d.max_jump);
  d.unknown_log_prob = j.value("unknown_log_prob", d.unknown_log_prob);
  d.beam_size = j.value("beam_size", d.beam_size);
  return d;
}

// Score multipliers may be given as a number or as "none" / "-inf".
double ParseMultiplier(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    if (text == "none") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    if (ParseDouble(text, &value)) return value;
  }
  throw ConfigError("filter.score_multiplier must be a number or \"none\"");
}

json MultiplierJson(double k) {
  if (std::isinf(k)) return k < 0 ? "none" : "inf";
  return k;
}

void RequireFile(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError(what + " is not configured");
  if (!fs::exists(path)) throw ConfigError(what + " does not exist: " + path);
}

bool Contains(const std::vector<std::string>& stages, const std::string& s) {
  return std::find(stages.begin(), stages.end(), s) != stages.end();
}

PhraseTableModel BuildDecoderModel(const DecoderConfig& config) {
  PhraseTableModel model;
  model.table = LoadPhraseTable(config.phrase_table);
  std::ifstream in(config.lm_text);
  if (!in) throw Error("cannot open " + config.lm_text);
  std::vector<Tokens> sentences;
  std::string line;
  while (std::getline(in, line)) {
    Tokens tokens = SplitWhitespace(line);
    if (!tokens.empty()) sentences.push_back(std::move(tokens));
  }
  model.lm = BigramLm::Train(sentences, config.lm_alpha);
  model.weights = config.weights;
  model.max_jump = config.max_jump;
  model.unknown_log_prob = config.unknown_log_prob;
  model.beam_size = config.beam_size;
  return model;
}

std::map<std::string, long> ReasonHistogram(const FilterOutcome& outcome) {
  std::map<std::string, long> histogram;
  for (const auto& [reason, count] : outcome.ReasonCounts()) {
    histogram[ReasonName(reason)] = count;
  }
  return histogram;
}

}  // namespace

std::vector<std::string> ParseStageList(std::string_view text) {
  std::vector<std::string> stages;
  for (const std::string& piece : Split(text, ',')) {
    const std::string stage(StripAsciiWhitespace(piece));
    if (!stage.empty()) stages.push_back(stage);
  }
  return stages;
}

std::string PipelineConfig::CanonicalJson() const {
  json j;
  j["seed"] = seed;
  j["stages"] = stages;
  j["source_language"] = source_language;
  j["target_language"] = target_language;
  j["paths"] = json{{"source_corpus", source_corpus},
                    {"input_corpus", input_corpus},
                    {"test_set", test_set},
                    {"catalogs", catalogs},
                    {"source_catalogs", source_catalogs},
                    {"tagger_model", tagger_model},
                    {"classifier_model", classifier_model},
                    {"translations_forward", translations_forward},
                    {"translations_backward", translations_backward}};
  j["translation"] = json{{"mode", translation_mode},
                          {"forward", DecoderJson(forward_decoder)},
                          {"backward", DecoderJson(backward_decoder)}};
  j["filter"] = json{{"mode", FilterModeName(filter.mode)},
                     {"confidence_threshold", filter.confidence_threshold},
                     {"score_multiplier", MultiplierJson(filter.score_multiplier)},
                     {"slot_comparison", SlotComparisonName(filter.slot_comparison)},
                     {"use_gold_source_labels", filter.use_gold_source_labels}};
  j["postprocess"] = json{{"resample_slots", postprocess.resample_slots},
                          {"retain_original_slots", postprocess.retain_original_slots},
                          {"mix_probability", postprocess.mix_probability}};
  j["nlu"] = json{{"tagger", TrainingJson(tagger)},
                  {"classifier", TrainingJson(classifier)}};
  return j.dump(2);
}

std::string PipelineConfig::FingerprintHex() const {
  return mtboot::FingerprintHex(CanonicalJson());
}

void PipelineConfig::Validate() const {
  const std::vector<std::string>& all = AllStages();
  size_t cursor = 0;
  if (stages.empty()) throw ConfigError("no stages selected");
  for (const std::string& stage : stages) {
    auto it = std::find(all.begin() + cursor, all.end(), stage);
    if (it == all.end()) {
      throw ConfigError(Contains(all, stage)
                            ? "stage " + stage + " is out of order or repeated"
                            : "unknown stage " + stage);
    }
    cursor = static_cast<size_t>(it - all.begin()) + 1;
  }
  filter.Validate();
  postprocess.Validate();
  if (translation_mode != "file" && translation_mode != "decoder") {
    throw ConfigError("translation.mode must be \"file\" or \"decoder\"");
  }
  for (const TrainingOptions* options : {&tagger, &classifier}) {
    if (!(options->l2 >= 0.0) || options->max_iterations < 0 ||
        !(options->tolerance >= 0.0)) {
      throw ConfigError("NLU hyper-parameters out of range");
    }
  }

  auto require_forward = [&] {
    if (translation_mode == "file") {
      RequireFile(translations_forward, "paths.translations_forward");
    } else {
      RequireFile(forward_decoder.phrase_table, "translation.forward.phrase_table");
      RequireFile(forward_decoder.lm_text, "translation.forward.lm_text");
    }
  };
  const bool from_source = stages.front() == "translate" ||
                           stages.front() == "project" ||
                           (stages.front() == "filter-semantic" && input_corpus.empty());
  if (from_source || input_corpus.empty()) {
    RequireFile(source_corpus, "paths.source_corpus");
  } else {
    RequireFile(input_corpus, "paths.input_corpus");
  }
  if (Contains(stages, "translate") || Contains(stages, "project") ||
      Contains(stages, "filter-score") ||
      (Contains(stages, "filter-semantic") && from_source)) {
    require_forward();
  }
  if (Contains(stages, "filter-semantic")) {
    RequireFile(source_corpus, "paths.source_corpus");
    if (translation_mode == "file") {
      RequireFile(translations_backward, "paths.translations_backward");
    } else {
      RequireFile(backward_decoder.phrase_table, "translation.backward.phrase_table");
      RequireFile(backward_decoder.lm_text, "translation.backward.lm_text");
    }
  }
  if (Contains(stages, "postprocess") && !postprocess.retain_original_slots.empty()) {
    RequireFile(source_corpus, "paths.source_corpus");
  }
  if (Contains(stages, "evaluate")) {
    RequireFile(test_set, "paths.test_set");
    if (!Contains(stages, "train")) {
      RequireFile(tagger_model, "paths.tagger_model");
      RequireFile(classifier_model, "paths.classifier_model");
    }
  }
  for (const std::string& path : catalogs) RequireFile(path, "catalog");
  for (const std::string& path : source_catalogs) RequireFile(path, "source catalog");
}

PipelineConfig ParsePipelineConfig(std::string_view json_text,
                                   const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    PipelineConfig c;
    c.seed = j.value("seed", c.seed);
    if (j.contains("stages")) {
      const json& stages = j.at("stages");
      c.stages = stages.is_string() ? ParseStageList(stages.get<std::string>())
                                    : stages.get<std::vector<std::string>>();
    }
    c.source_language = j.value("source_language", c.source_language);
    c.target_language = j.value("target_language", c.target_language);

    const json paths = j.value("paths", json::object());
    auto path = [&](const char* key) {
      return Resolve(base_dir, paths.value(key, std::string()));
    };
    auto path_list = [&](const char* key) {
      std::vector<std::string> out;
      for (const std::string& p :
           paths.value(key, std::vector<std::string>())) {
        out.push_back(Resolve(base_dir, p));
      }
      return out;
    };
    c.source_corpus = path("source_corpus");
    c.input_corpus = path("input_corpus");
    c.test_set = path("test_set");
    c.catalogs = path_list("catalogs");
    c.source_catalogs = path_list("source_catalogs");
    c.tagger_model = path("tagger_model");
    c.classifier_model = path("classifier_model");
    c.translations_forward = path("translations_forward");
    c.translations_backward = path("translations_backward");

    const json translation = j.value("translation", json::object());
    c.translation_mode = translation.value("mode", c.translation_mode);
    c.forward_decoder =
        ParseDecoder(translation.value("forward", json::object()), base_dir);
    c.backward_decoder =
        ParseDecoder(translation.value("backward", json::object()), base_dir);

    const json filter = j.value("filter", json::object());
    if (filter.contains("mode")) {
      std::optional<FilterMode> mode =
          ParseFilterMode(filter.at("mode").get<std::string>());
      if (!mode) throw ConfigError("unknown filter.mode");
      c.filter.mode = *mode;
    }
    c.filter.confidence_threshold =
        filter.value("confidence_threshold", c.filter.confidence_threshold);
    if (filter.contains("score_multiplier")) {
      c.filter.score_multiplier = ParseMultiplier(filter.at("score_multiplier"));
    }
    if (filter.contains("slot_comparison")) {
      std::optional<SlotComparison> comparison =
          ParseSlotComparison(filter.at("slot_comparison").get<std::string>());
      if (!comparison) throw ConfigError("unknown filter.slot_comparison");
      c.filter.slot_comparison = *comparison;
    }
    c.filter.use_gold_source_labels =
        filter.value("use_gold_source_labels", c.filter.use_gold_source_labels);

    const json post = j.value("postprocess", json::object());
    c.postprocess.resample_slots =
        post.value("resample_slots", std::set<std::string>());
    c.postprocess.retain_original_slots =
        post.value("retain_original_slots", std::set<std::string>());
    c.postprocess.mix_probability =
        post.value("mix_probability", c.postprocess.mix_probability);

    const json nlu = j.value("nlu", json::object());
    c.tagger = ParseTraining(nlu.value("tagger", json::object()), c.tagger);
    c.classifier =
        ParseTraining(nlu.value("classifier", json::object()), c.classifier);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

PipelineConfig LoadPipelineConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParsePipelineConfig(buffer.str(),
                             fs::absolute(path).parent_path().string());
}

long StageReport::removed_total() const {
  long total = 0;
  for (const auto& [reason, count] : removed) total += count;
  return total;
}

void WriteStageReports(std::ostream& out,
                       const std::vector<StageReport>& reports) {
  out << "# mtboot stage report v1\n";
  out << "stage\tstatus\tinput\toutput\tremoved\tdetails\tconfig\n";
  for (const StageReport& r : reports) {
    std::string details;
    for (const auto& [reason, count] : r.removed) {
      details += (details.empty() ? "" : ",") + reason + "=" + std::to_string(count);
    }
    for (const auto& [name, count] : r.counters) {
      details += (details.empty() ? "" : ",") + name + "=" + std::to_string(count);
    }
    if (details.empty()) details = "-";
    out << r.stage << '\t' << (r.failed ? "FAILED" : "ok") << '\t'
        << r.input_count << '\t' << r.output_count << '\t'
        << r.removed_total() << '\t' << details << '\t'
        << r.config_fingerprint << '\n';
    if (r.failed) out << "# error: " << r.error << '\n';
  }
}

void WriteTimings(std::ostream& out, const std::vector<StageReport>& reports) {
  out << "stage\tseconds\n";
  for (const StageReport& r : reports) {
    out << r.stage << '\t' << FormatFixed(r.seconds, 3) << '\n';
  }
}

namespace {

// Mutable state threaded through one pipeline run.
class PipelineRun {
 public:
  PipelineRun(const PipelineConfig& config, std::string out_dir)
      : config_(config), out_dir_(std::move(out_dir)) {}

  PipelineResult Run();

 private:
  std::string OutPath(const std::string& name) const {
    return (fs::path(out_dir_) / name).string();
  }
  const std::vector<Utterance>& Sources();
  const std::map<std::string, const Utterance*>& SourceIndex();
  const TranslationMap& Translations(StageReport* report);
  const Translator& Backward();
  const CatalogMap& TargetCatalogs();

  void Translate(StageReport& report);
  void Project(StageReport& report);
  void FilterSemantic(StageReport& report);
  void FilterScore(StageReport& report);
  void Postprocess(StageReport& report);
  void Train(StageReport& report);
  void Evaluate(StageReport& report);

  void SaveStage(const std::string& stage, const FilterOutcome* outcome);

  const PipelineConfig& config_;
  std::string out_dir_;
  std::string fingerprint_;

  std::vector<Utterance> corpus_;
  bool corpus_is_source_ = true;
  std::optional<std::vector<Utterance>> sources_;
  std::map<std::string, const Utterance*> source_index_;
  std::optional<TranslationMap> translations_;
  std::optional<PhraseTableModel> forward_model_;
  std::optional<PhraseTableModel> backward_model_;
  std::unique_ptr<Translator> backward_;
  std::optional<CatalogMap> target_catalogs_;
  std::optional<NluModels> models_;
  std::optional<SemerReport> semer_;
};

const std::vector<Utterance>& PipelineRun::Sources() {
  if (!sources_) {
    sources_ = LoadCorpus(config_.source_corpus, config_.source_language);
    for (const Utterance& u : *sources_) source_index_.emplace(u.id, &u);
  }
  return *sources_;
}

const std::map<std::string, const Utterance*>& PipelineRun::SourceIndex() {
  Sources();
  return source_index_;
}

const TranslationMap& PipelineRun::Translations(StageReport* report) {
  if (translations_) return *translations_;
  if (config_.translation_mode == "file") {
    TranslationFile file = LoadTranslations(config_.translations_forward);
    if (report != nullptr && file.duplicate_ids > 0) {
      report->counters["duplicate_translation_ids"] = file.duplicate_ids;
    }
    translations_ = std::move(file.translations);
  } else {
    forward_model_ = BuildDecoderModel(config_.forward_decoder);
    TranslationMap map;
    for (const Utterance& u : Sources()) {
      map.emplace(u.id, Decode(u.tokens, *forward_model_, u.id));
    }
    translations_ = std::move(map);
  }
  return *translations_;
}

const Translator& PipelineRun::Backward() {
  if (!backward_) {
    if (config_.translation_mode == "file") {
      backward_ = std::make_unique<FileTranslator>(
          LoadTranslations(config_.translations_backward).translations);
    } else {
      backward_model_ = BuildDecoderModel(config_.backward_decoder);
      backward_ = std::make_unique<DecoderTranslator>(&*backward_model_);
    }
  }
  return *backward_;
}

const CatalogMap& PipelineRun::TargetCatalogs() {
  if (!target_catalogs_) target_catalogs_ = LoadCatalogs(config_.catalogs);
  return *target_catalogs_;
}

void PipelineRun::SaveStage(const std::string& stage,
                            const FilterOutcome* outcome) {
  SaveCorpus(OutPath(stage + ".corpus.tsv"), corpus_);
  if (outcome != nullptr) SaveRemoved(OutPath(stage + ".removed.tsv"), *outcome);
}

void PipelineRun::Translate(StageReport& report) {
  if (!corpus_is_source_) throw ConfigError("translate needs the source corpus");
  const TranslationMap& all = Translations(&report);
  FilterOutcome outcome;
  TranslationMap used;
  for (const Utterance& u : corpus_) {
    auto it = all.find(u.id);
    if (it == all.end()) {
      outcome.removed.emplace_back(u.id, RemovalReason::kNoTranslation);
    } else {
      outcome.kept.push_back(u);
      used.emplace(u.id, it->second);
    }
  }
  SaveTranslations(OutPath("translate.translations.tsv"), used);
  corpus_ = std::move(outcome.kept);
  report.removed = ReasonHistogram(outcome);
  SaveStage("translate", &outcome);
}

void PipelineRun::Project(StageReport& report) {
  if (!corpus_is_source_) throw ConfigError("project needs the source corpus");
  const TranslationMap& translations = Translations(&report);
  FilterOutcome outcome;
  for (const Utterance& u : corpus_) {
    auto it = translations.find(u.id);
    if (it == translations.end()) {
      outcome.removed.emplace_back(u.id, RemovalReason::kNoTranslation);
      continue;
    }
    Projection projection =
        ProjectAnnotations(u, it->second, config_.target_language);
    if (projection.utterance) {
      outcome.kept.push_back(std::move(*projection.utterance));
    } else {
      outcome.removed.emplace_back(u.id, FromProjectionError(projection.error));
    }
  }
  corpus_ = std::move(outcome.kept);
  corpus_is_source_ = false;
  report.removed = ReasonHistogram(outcome);
  SaveStage("project", &outcome);
}

void PipelineRun::FilterSemantic(StageReport& report) {
  const CatalogMap source_catalogs = LoadCatalogs(config_.source_catalogs);
  const NluModels source_nlu = TrainNlu(Sources(), Gazetteer(source_catalogs),
                                        config_.tagger, config_.classifier);
  source_nlu.tagger.SaveToFile(OutPath("filter-semantic.source_tagger.model"));
  source_nlu.classifier.SaveToFile(
      OutPath("filter-semantic.source_classifier.model"));

  FilterOutcome outcome;
  if (corpus_is_source_) {
    FileTranslator forward(Translations(&report));
    outcome = RoundtripFilter(corpus_, forward, Backward(), source_nlu,
                              config_.filter, config_.target_language);
    corpus_is_source_ = false;
  } else {
    config_.filter.Validate();
    const auto& index = SourceIndex();
    for (const Utterance& u : corpus_) {
      auto it = index.find(u.origin_id());
      if (it == index.end()) {
        throw InvariantError("no source utterance for " + u.id);
      }
      std::optional<RemovalReason> reason =
          CheckRoundTrip(*it->second, u, Backward(), source_nlu, config_.filter);
      if (reason) {
        outcome.removed.emplace_back(u.id, *reason);
      } else {
        outcome.kept.push_back(u);
      }
    }
  }
  corpus_ = std::move(outcome.kept);
  report.removed = ReasonHistogram(outcome);
  SaveStage("filter-semantic", &outcome);
}

void PipelineRun::FilterScore(StageReport& report) {
  if (corpus_is_source_) throw ConfigError("filter-score needs translated data");
  const TranslationMap& translations = Translations(&report);
  const auto stats = ComputeDomainStats(corpus_, translations);
  {
    std::ofstream out(OutPath("filter-score.domain_stats.tsv"), std::ios::binary);
    out << "domain\tcount\tmean\tstdev\n";
    for (const auto& [domain, s] : stats) {
      out << domain << '\t' << s.count << '\t' << FormatDouble(s.mean) << '\t'
          << FormatDouble(s.stdev) << '\n';
    }
  }
  FilterOutcome outcome =
      ScoreFilter(corpus_, translations, stats, config_.filter.score_multiplier);
  corpus_ = std::move(outcome.kept);
  report.removed = ReasonHistogram(outcome);
  SaveStage("filter-score", &outcome);
}

void PipelineRun::Postprocess(StageReport& report) {
  PostprocessConfig post = config_.postprocess;
  post.seed = DeriveSeed(config_.seed, "postprocess");
  PostprocessStats stats;
  const std::vector<Utterance> empty;
  const std::vector<Utterance>& sources =
      post.retain_original_slots.empty() ? empty : Sources();
  const CatalogMap empty_catalogs;
  const CatalogMap& catalogs =
      post.resample_slots.empty() ? empty_catalogs : TargetCatalogs();
  corpus_ = CombinedPostprocess(corpus_, sources, catalogs, post, &stats);
  report.counters["resampled_slots"] = stats.resampled;
  report.counters["retained_slots"] = stats.retained;
  report.counters["multiplicity_mismatches"] = stats.multiplicity_mismatches;
  SaveStage("postprocess", nullptr);
}

void PipelineRun::Train(StageReport& /*report*/) {
  models_ = TrainNlu(corpus_, Gazetteer(TargetCatalogs()), config_.tagger,
                     config_.classifier);
  models_->tagger.SaveToFile(OutPath("train.tagger.model"));
  models_->classifier.SaveToFile(OutPath("train.classifier.model"));
}

void PipelineRun::Evaluate(StageReport& report) {
  if (!models_) {
    models_ = NluModels{CrfModel::LoadFromFile(config_.tagger_model),
                        MaxEntModel::LoadFromFile(config_.classifier_model)};
  }
  const std::vector<Utterance> test =
      LoadCorpus(config_.test_set, config_.target_language);
  semer_ = ComputeSemer(test, Recognize(*models_, test));
  SaveSemerReport(OutPath("evaluate.semer.tsv"), *semer_);
  report.counters["test_utterances"] = static_cast<long>(test.size());
}

PipelineResult PipelineRun::Run() {
  config_.Validate();
  fs::create_directories(out_dir_);
  fingerprint_ = config_.FingerprintHex();
  {
    std::ofstream out(OutPath("config.effective.json"), std::ios::binary);
    out << config_.CanonicalJson() << '\n';
  }

  const std::string& first = config_.stages.front();
  const bool from_source =
      first == "translate" || first == "project" ||
      (first == "filter-semantic" && config_.input_corpus.empty());
  if (from_source || config_.input_corpus.empty()) {
    corpus_ = Sources();
    corpus_is_source_ = true;
  } else {
    corpus_ = LoadCorpus(config_.input_corpus, config_.target_language);
    corpus_is_source_ = false;
  }

  const std::map<std::string, std::function<void(StageReport&)>> handlers = {
      {"translate", [this](StageReport& r) { Translate(r); }},
      {"project", [this](StageReport& r) { Project(r); }},
      {"filter-semantic", [this](StageReport& r) { FilterSemantic(r); }},
      {"filter-score", [this](StageReport& r) { FilterScore(r); }},
      {"postprocess", [this](StageReport& r) { Postprocess(r); }},
      {"train", [this](StageReport& r) { Train(r); }},
      {"evaluate", [this](StageReport& r) { Evaluate(r); }},
  };

  PipelineResult result;
  auto write_reports = [&] {
    std::ofstream report_out(OutPath("report.tsv"), std::ios::binary);
    WriteStageReports(report_out, result.reports);
    std::ofstream timing_out(OutPath("timings.tsv"), std::ios::binary);
    WriteTimings(timing_out, result.reports);
  };
  for (const std::string& stage : config_.stages) {
    StageReport report;
    report.stage = stage;
    report.config_fingerprint = fingerprint_;
    report.input_count = static_cast<long>(corpus_.size());
    const auto start = std::chrono::steady_clock::now();
    try {
      handlers.at(stage)(report);
    } catch (const std::exception& e) {
      report.failed = true;
      report.error = e.what();
      report.seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
      result.reports.push_back(report);
      write_reports();
      throw StageFailure(stage, e.what(), result.reports);
    }
    report.output_count = static_cast<long>(corpus_.size());
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    result.reports.push_back(std::move(report));
  }
  write_reports();
  result.corpus = corpus_;
  result.models = models_;
  result.semer = semer_;
  return result;
}

}  // namespace

PipelineResult RunPipeline(const PipelineConfig& config,
                           const std::string& out_dir) {
  return PipelineRun(config, out_dir).Run();
}

double RelativeChange(double baseline, double condition) {
  if (baseline == 0.0) {
    throw InvariantError("relative change against a zero baseline");
  }
  return (condition - baseline) / baseline * 100.0;
}

namespace {

std::string SignedFixed(double value, int digits) {
  std::string text = FormatFixed(value, digits);
  if (text.find_first_not_of("-0.") == std::string::npos) {
    return FormatFixed(0.0, digits);
  }
  return value > 0 ? "+" + text : text;
}

}  // namespace

std::string FormatWithChange(double baseline_percent, double condition_percent) {
  return FormatFixed(condition_percent, 2) + " (" +
         SignedFixed(RelativeChange(baseline_percent, condition_percent), 2) +
         ")";
}

std::vector<ComparisonRow> CompareRuns(const SemerReport& baseline,
                                       const SemerReport& condition) {
  if (baseline.test_set != condition.test_set) {
    throw InvariantError("reports cover different test sets");
  }
  std::vector<ComparisonRow> rows;
  auto add = [&](const std::string& scope, const SemerCounts& a,
                 const SemerCounts& b) {
    ComparisonRow row;
    row.scope = scope;
    row.baseline_percent = a.semer() * 100.0;
    row.condition_percent = b.semer() * 100.0;
    row.relative_change = a.semer() == 0.0
                              ? 0.0
                              : RelativeChange(row.baseline_percent,
                                               row.condition_percent);
    rows.push_back(row);
  };
  add("overall", baseline.overall, condition.overall);
  for (const auto& [domain, counts] : baseline.per_domain) {
    auto it = condition.per_domain.find(domain);
    if (it != condition.per_domain.end()) {
      add("domain:" + domain, counts, it->second);
    }
  }
  return rows;
}

std::string FormatComparison(const std::vector<ComparisonRow>& rows) {
  std::string out = "scope\tbaseline\tcondition\n";
  for (const ComparisonRow& row : rows) {
    out += row.scope + '\t' + FormatFixed(row.baseline_percent, 2) + '\t' +
           FormatFixed(row.condition_percent, 2) + " (" +
           SignedFixed(row.relative_change, 2) + ")\n";
  }
  return out;
}

}  // namespace mtboot
