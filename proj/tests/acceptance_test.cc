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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "mtboot/corpus.h"
#include "mtboot/crf.h"
#include "mtboot/decoder.h"
#include "mtboot/eval.h"
#include "mtboot/features.h"
#include "mtboot/filter.h"
#include "mtboot/maxent.h"
#include "mtboot/nlu.h"
#include "mtboot/pipeline.h"
#include "mtboot/postprocess.h"
#include "mtboot/strings.h"
#include "oracles.h"
#include "synthetic_task.h"

namespace mtboot {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

// 1. SemER against hand-computed values.
Outcome SemerOracleSuite() {
  const auto start = std::chrono::steady_clock::now();
  const auto cases = testing::HandSemerCases();
  int wrong = 0;
  bool has_third = false;
  for (const auto& c : cases) {
    const std::vector<Utterance> refs = {ParseAnnotatedLine(c.reference)};
    const HypothesisMap hyps = {
        {refs[0].id, testing::HypothesisFromMarkup(c.hyp_intent, c.hyp_markup)}};
    const double got = ComputeSemer(refs, hyps).semer();
    if (std::abs(got - c.expected) > 1e-12) {
      ++wrong;
      std::cerr << "  semer case '" << c.name << "': " << got << " != "
                << c.expected << '\n';
    }
    has_third |= std::abs(c.expected - 1.0 / 3.0) < 1e-15;
  }
  const double elapsed = Seconds(start);
  std::ostringstream d;
  d << cases.size() << " cases, " << wrong << " wrong, " << FormatFixed(elapsed, 3)
    << "s";
  return {cases.size() >= 12 && wrong == 0 && has_third && elapsed < 1.0, d.str()};
}

// 2. Viterbi decoding and slot tagging against enumeration.
Outcome ViterbiBruteForce() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  int models = 0, mismatches = 0, ambiguous = 0;
  for (; models < 250; ++models) {
    const CrfModel model =
        testing::RandomCrfModel(rng, static_cast<int>(rng() % 3), 2.0);
    const Tokens tokens = testing::RandomTokens(rng, 1 + static_cast<int>(rng() % 3));
    const EncodedSequence seq = EncodeSequence(model, tokens);
    const auto oracle = testing::EnumerateCrf(model, seq);
    const ViterbiPath path = CrfViterbi(model, seq);
    bool ok = std::abs(path.score - oracle.best_score) <= 1e-12;
    if (oracle.margin > 1e-9) {
      std::vector<std::string> labels;
      for (int y : oracle.best_labels) labels.push_back(model.labels()[y]);
      ok = ok && path.labels == oracle.best_labels &&
           TagSlots(model, tokens) == BioToSlots(tokens, labels);
    } else {
      ++ambiguous;
    }
    mismatches += ok ? 0 : 1;
  }
  const double elapsed = Seconds(start);
  std::ostringstream d;
  d << models << " models, " << mismatches << " mismatches (" << ambiguous
    << " with tied optima, score-checked only), " << FormatFixed(elapsed, 3) << "s";
  return {mismatches == 0 && elapsed < 10.0, d.str()};
}

// 3. Analytic gradients against central differences.
Outcome GradientChecks() {
  std::mt19937_64 rng(99);
  double worst_crf = 0.0, worst_maxent = 0.0;
  const int instances = 25;
  for (int i = 0; i < instances; ++i) {
    const CrfModel base =
        testing::RandomCrfModel(rng, 1 + static_cast<int>(rng() % 2), 1.0);
    CrfModel model(base.labels(), base.features(), base.gazetteer(), 0.5);
    std::copy(base.weights().begin(), base.weights().end(),
              model.mutable_weights().begin());
    std::vector<EncodedSequence> data;
    for (int s = 0; s < 3; ++s) {
      const Tokens t = testing::RandomTokens(rng, 1 + static_cast<int>(rng() % 4));
      EncodedSequence seq = EncodeSequence(model, t);
      for (size_t k = 0; k < t.size(); ++k) {
        seq.labels.push_back(static_cast<int>(rng() % model.num_labels()));
      }
      data.push_back(seq);
    }
    CrfModel scratch = model;
    const auto analytic = CrfObjective(model, data);
    worst_crf = std::max(
        worst_crf,
        testing::MaxRelativeGradientError(
            [&](std::span<const double> x) {
              std::copy(x.begin(), x.end(), scratch.mutable_weights().begin());
              return CrfObjective(scratch, data).value;
            },
            std::vector<double>(model.weights().begin(), model.weights().end()),
            analytic.gradient, 1e-5));
  }
  for (int i = 0; i < instances; ++i) {
    std::vector<Tokens> tokens;
    for (int s = 0; s < 4; ++s) {
      tokens.push_back(testing::RandomTokens(rng, 1 + static_cast<int>(rng() % 4)));
    }
    const int k = 2 + static_cast<int>(rng() % 3);
    const MaxEntModel base = testing::RandomMaxEntModel(rng, k, tokens, 1.0);
    MaxEntModel model(base.intents(), base.features(), base.gazetteer(), 0.5);
    std::copy(base.weights().begin(), base.weights().end(),
              model.mutable_weights().begin());
    std::vector<EncodedExample> data;
    for (const Tokens& t : tokens) {
      EncodedExample e = EncodeExample(model, t);
      e.intent = static_cast<int>(rng() % k);
      data.push_back(e);
    }
    MaxEntModel scratch = model;
    const auto analytic = MaxEntObjective(model, data);
    worst_maxent = std::max(
        worst_maxent,
        testing::MaxRelativeGradientError(
            [&](std::span<const double> x) {
              std::copy(x.begin(), x.end(), scratch.mutable_weights().begin());
              return MaxEntObjective(scratch, data).value;
            },
            std::vector<double>(model.weights().begin(), model.weights().end()),
            analytic.gradient, 1e-5));
  }
  std::ostringstream d;
  d << instances << " CRF + " << instances
    << " MaxEnt instances, max relative error CRF " << worst_crf << ", MaxEnt "
    << worst_maxent;
  return {worst_crf < 1e-4 && worst_maxent < 1e-4, d.str()};
}

// 4. Decoder against exhaustive derivation enumeration.
Outcome DecoderBruteForce() {
  std::mt19937_64 rng(7);
  const std::vector<Tokens> inputs = testing::AllDecoderInputs(3);
  int tables = 0, failures = 0;
  for (; tables < 60; ++tables) {
    const PhraseTableModel model = testing::RandomPhraseModel(rng);
    for (const Tokens& input : inputs) {
      const std::string problem =
          testing::CheckDecoderAgainstEnumeration(input, model);
      if (!problem.empty()) {
        if (failures++ < 3) {
          std::cerr << "  decoder table " << tables << " input '"
                    << Join(input, " ") << "': " << problem << '\n';
        }
      }
    }
  }
  std::ostringstream d;
  d << tables << " tables x " << inputs.size() << " inputs, " << failures
    << " disagreements";
  return {failures == 0, d.str()};
}

// 5. Score-filter threshold algebra.
Outcome ScoreFilterAlgebra() {
  auto scored = [](const std::vector<std::pair<std::string, double>>& rows,
                   std::vector<Utterance>* corpus, TranslationMap* translations) {
    for (size_t i = 0; i < rows.size(); ++i) {
      Utterance u;
      u.id = "u" + std::to_string(i);
      u.domain = rows[i].first;
      u.intent = "I";
      u.tokens = {"t"};
      corpus->push_back(u);
      TranslationResult r;
      r.source_id = u.id;
      r.target_tokens = {"t"};
      r.scores.weighted_total = rows[i].second;
      translations->emplace(u.id, r);
    }
  };
  std::vector<Utterance> corpus;
  TranslationMap translations;
  scored({{"D", -1}, {"D", -2}, {"D", -3}, {"D", -4}}, &corpus, &translations);
  const auto stats = ComputeDomainStats(corpus, translations);
  auto kept_scores = [&](double k) {
    std::multiset<double> out;
    for (const Utterance& u : ScoreFilter(corpus, translations, stats, k).kept) {
      out.insert(translations.at(u.id).scores.weighted_total);
    }
    return out;
  };
  bool ok = stats.at("D").mean == -2.5 &&
            std::abs(stats.at("D").stdev - std::sqrt(1.25)) < 1e-15 &&
            kept_scores(0.0) == std::multiset<double>{-1, -2} &&
            kept_scores(-0.5) == std::multiset<double>{-1, -2, -3};

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> score(-10.0, 0.0);
  std::uniform_real_distribution<double> multiplier(-3.0, 3.0);
  int violations = 0;
  const int trials = 500;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<std::pair<std::string, double>> rows;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      rows.emplace_back(std::string(1, static_cast<char>('A' + rng() % 3)),
                        score(rng));
    }
    std::vector<Utterance> c;
    TranslationMap t;
    scored(rows, &c, &t);
    const auto s = ComputeDomainStats(c, t);
    double k1 = multiplier(rng), k2 = multiplier(rng);
    if (k1 > k2) std::swap(k1, k2);
    std::set<std::string> loose;
    for (const Utterance& u : ScoreFilter(c, t, s, k1).kept) loose.insert(u.id);
    for (const Utterance& u : ScoreFilter(c, t, s, k2).kept) {
      violations += loose.count(u.id) ? 0 : 1;
    }
  }
  std::ostringstream d;
  d << "hand example " << (ok ? "ok" : "WRONG") << ", " << trials
    << " random corpora, " << violations << " nesting violations";
  return {ok && violations == 0, d.str()};
}

// 6. Round-trip filtering on the synthetic corruption task.
Outcome SyntheticCorruption() {
  const auto start = std::chrono::steady_clock::now();
  const testing::SyntheticTask task =
      testing::BuildSyntheticTask(testing::SyntheticOptions{});
  const TrainingOptions tagger{1.0, 60, 1e-4};
  const TrainingOptions classifier{1.0, 100, 1e-4};
  const NluModels source_nlu =
      TrainNlu(task.source_corpus, Gazetteer(task.source_catalogs), tagger,
               classifier);
  const FileTranslator forward(task.forward);
  const FileTranslator backward(task.backward);
  FilterConfig config;
  config.mode = FilterMode::kIntent;
  const FilterOutcome filtered = RoundtripFilter(
      task.source_corpus, forward, backward, source_nlu, config, "tgt");

  size_t corrupted_removed = 0, clean_removed = 0;
  for (const auto& [id, reason] : filtered.removed) {
    (task.corrupted_ids.count(id) ? corrupted_removed : clean_removed) += 1;
  }
  const size_t corrupted = task.corrupted_ids.size();
  const size_t clean = task.source_corpus.size() - corrupted;
  const double corrupted_rate = static_cast<double>(corrupted_removed) / corrupted;
  const double clean_rate = static_cast<double>(clean_removed) / clean;

  std::vector<Utterance> unfiltered;
  for (const Utterance& u : task.source_corpus) {
    Projection p = ProjectAnnotations(u, task.forward.at(u.id), "tgt");
    if (p.utterance) unfiltered.push_back(std::move(*p.utterance));
  }
  const Gazetteer target_gazetteer(task.target_catalogs);
  const NluModels on_unfiltered =
      TrainNlu(unfiltered, target_gazetteer, tagger, classifier);
  const NluModels on_filtered =
      TrainNlu(filtered.kept, target_gazetteer, tagger, classifier);
  const SemerReport unfiltered_report =
      ComputeSemer(task.test_set, Recognize(on_unfiltered, task.test_set));
  const SemerReport filtered_report =
      ComputeSemer(task.test_set, Recognize(on_filtered, task.test_set));
  const double elapsed = Seconds(start);

  std::ostringstream d;
  d << task.source_corpus.size() << " source utterances, " << corrupted
    << " corrupted; removed " << FormatFixed(100 * corrupted_rate, 1)
    << "% of corrupted, " << FormatFixed(100 * clean_rate, 1)
    << "% of clean; test SemER unfiltered "
    << FormatFixed(100 * unfiltered_report.semer(), 2) << "% vs filtered "
    << FormatFixed(100 * filtered_report.semer(), 2) << "%"
    << "; " << FormatFixed(elapsed, 1) << "s";
  return {corrupted_rate >= 0.8 && clean_rate <= 0.2 &&
              filtered_report.semer() <= unfiltered_report.semer() &&
              elapsed < 300.0,
          d.str()};
}

// 7. Post-processing invariants.
Outcome PostprocessInvariants() {
  std::vector<std::string> failures;
  auto bytes = [](std::span<const Utterance> corpus) {
    std::ostringstream out;
    WriteCorpus(out, corpus);
    return out.str();
  };

  // Frequencies.
  std::vector<Utterance> weather;
  for (int i = 0; i < 10000; ++i) {
    weather.push_back(ParseAnnotatedLine(
        "w" + std::to_string(i) + "\tWeather\tGet\thow is the weather in [new york](City)"));
  }
  Catalog cities;
  cities.slot_type = "City";
  cities.entries = {{{"berlin"}, 3.0}, {{"hamburg"}, 1.0}};
  const CatalogMap catalogs = {{"City", cities}};
  PostprocessConfig resample;
  resample.resample_slots = {"City"};
  resample.seed = 11;
  const auto resampled = ResampleSlots(weather, catalogs, resample);
  int berlin = 0;
  for (const Utterance& u : resampled) berlin += u.slots[0].value == "berlin";
  const double fraction = berlin / 10000.0;
  if (std::abs(fraction - 0.75) > 0.02) failures.push_back("frequency");

  // Retention.
  const std::vector<Utterance> source = {ParseAnnotatedLine(
      "u1\tMusic\tPlay\tplay [we are the champions](SongName) by [queen](ArtistName)")};
  Utterance translated = ParseAnnotatedLine(
      "u1\tMusic\tPlay\tspiele [wir sind die champions](SongName) von "
      "[queen](ArtistName)",
      0, "de");
  translated.source_id = "u1";
  PostprocessConfig retain;
  retain.retain_original_slots = {"SongName"};
  const auto retained = RetainOriginalSlots(std::vector<Utterance>{translated},
                                            source, retain);
  if (retained[0].slots[0].value != "we are the champions") {
    failures.push_back("retention");
  }

  // Corpus invariants on every output, combined mode included.
  PostprocessConfig mixed;
  mixed.resample_slots = {"City", "SongName"};
  mixed.retain_original_slots = {"SongName"};
  mixed.seed = 3;
  const CatalogMap more = {
      {"City", cities},
      {"SongName", Catalog{"SongName", {{{"x", "y"}, 1.0}, {{"z"}, 2.0}}}}};
  const auto combined = CombinedPostprocess(std::vector<Utterance>{translated},
                                            source, more, mixed);
  try {
    for (const auto* corpus : {&resampled, &retained, &combined}) {
      for (const Utterance& u : *corpus) u.Validate();
    }
  } catch (const std::exception& e) {
    failures.push_back(std::string("invariants: ") + e.what());
  }

  // Identity configurations.
  const PostprocessConfig identity;
  if (bytes(ResampleSlots(weather, catalogs, identity)) != bytes(weather) ||
      bytes(RetainOriginalSlots(std::vector<Utterance>{translated}, source,
                                identity)) !=
          bytes(std::vector<Utterance>{translated}) ||
      bytes(CombinedPostprocess(weather, {}, catalogs, identity)) != bytes(weather)) {
    failures.push_back("identity");
  }

  std::ostringstream d;
  d << "Berlin fraction " << FormatFixed(fraction, 4) << " (target 0.75), retained '"
    << retained[0].slots[0].value << "'";
  for (const std::string& f : failures) d << "; failed: " << f;
  return {failures.empty(), d.str()};
}

std::map<std::string, std::string> ReadOutputs(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    // Wall-clock durations are deliberately kept out of the other files.
    if (entry.path().filename() == "timings.tsv") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    files[entry.path().filename().string()] = buffer.str();
  }
  return files;
}

// 8. Two full pipeline runs give identical files.
Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() / "mtboot_acceptance_determinism";
  fs::remove_all(root);
  testing::SyntheticOptions options;
  options.source_size = 800;
  options.test_size = 200;
  const std::string config_path =
      testing::WriteSyntheticTask(testing::BuildSyntheticTask(options),
                                  (root / "task").string());
  std::vector<std::string> differences;
  size_t files = 0;
  for (const char* name : {"pipeline.json", "pipeline_decoder.json"}) {
    PipelineConfig config = LoadPipelineConfig((root / "task" / name).string());
    const std::string tag = fs::path(name).stem().string();
    RunPipeline(config, (root / (tag + "_a")).string());
    RunPipeline(config, (root / (tag + "_b")).string());
    const auto a = ReadOutputs(root / (tag + "_a"));
    const auto b = ReadOutputs(root / (tag + "_b"));
    files += a.size();
    if (a.size() != b.size()) differences.push_back(tag + ": file sets differ");
    for (const auto& [file, content] : a) {
      auto it = b.find(file);
      if (it == b.end() || it->second != content) differences.push_back(tag + "/" + file);
    }
    for (const char* required :
         {"train.tagger.model", "train.classifier.model", "evaluate.semer.tsv",
          "report.tsv", "postprocess.corpus.tsv"}) {
      if (!a.count(required)) differences.push_back(tag + ": missing " + required);
    }
  }
  (void)config_path;
  fs::remove_all(root);
  std::ostringstream d;
  d << "2 configs x 2 runs, " << files << " output files compared";
  for (const std::string& f : differences) d << "; differs: " << f;
  return {differences.empty(), d.str()};
}

SemerReport ReportWithSemer(long errors, long references) {
  SemerReport r;
  r.test_set = "table3";
  r.overall.substitutions = errors;
  r.overall.reference_count = references;
  r.overall.utterances = references / 2;
  r.per_domain["all"] = r.overall;
  return r;
}

// 9. Relative change arithmetic.
Outcome RelativeChanges() {
  const SemerReport baseline = ReportWithSemer(2138, 10000);
  struct Row {
    long errors;
    const char* printed;    // published SemER
    double printed_change;  // published relative change
  };
  const Row rows[] = {{2072, "20.72", -3.10}, {2362, "23.62", 10.48},
                      {2060, "20.60", -3.64}, {2032, "20.32", -4.97},
                      {2192, "21.92", 2.50},  {2105, "21.05", -1.54},
                      {2324, "23.24", 8.68},  {2153, "21.53", 0.69},
                      {2382, "23.82", 11.40}, {2018, "20.18", -5.60},
                      {2138, "21.38", 0.0}};
  std::ostringstream d;
  bool ok = true;
  for (const Row& row : rows) {
    const auto table = CompareRuns(baseline, ReportWithSemer(row.errors, 10000));
    const double change = table.at(0).relative_change;
    const bool match = FormatFixed(change, 1) == FormatFixed(row.printed_change, 1) &&
                       FormatFixed(table.at(0).condition_percent, 2) == row.printed;
    ok = ok && match;
    d << row.printed << " -> "
      << FormatWithChange(table.at(0).baseline_percent, table.at(0).condition_percent)
      << (match ? "" : " MISMATCH") << "; ";
  }
  bool rejects = false;
  SemerReport other = baseline;
  other.test_set = "different";
  try {
    CompareRuns(baseline, other);
  } catch (const std::exception&) {
    rejects = true;
  }
  d << "mismatched test sets " << (rejects ? "rejected" : "ACCEPTED");
  return {ok && rejects, d.str()};
}

}  // namespace
}  // namespace mtboot

int main() {
  using mtboot::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"SemER oracle suite", mtboot::SemerOracleSuite},
      {"Viterbi = brute force", mtboot::ViterbiBruteForce},
      {"Gradient checks", mtboot::GradientChecks},
      {"Decoder = brute force", mtboot::DecoderBruteForce},
      {"Score-filter algebra", mtboot::ScoreFilterAlgebra},
      {"Round-trip filter, synthetic corruption", mtboot::SyntheticCorruption},
      {"Post-processing invariants", mtboot::PostprocessInvariants},
      {"Determinism", mtboot::Determinism},
      {"Relative-change arithmetic", mtboot::RelativeChanges},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %zu: %s -- %s\n", outcome.pass ? "PASS" : "FAIL",
                i + 1, criteria[i].first, outcome.detail.c_str());
    std::fflush(stdout);
    failed += outcome.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
