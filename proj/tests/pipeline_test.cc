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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mtboot/error.h"
#include "synthetic_task.h"

namespace mtboot {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = new fs::path(fs::temp_directory_path() / "mtboot_pipeline_test");
    fs::remove_all(*root_);
    testing::SyntheticOptions options;
    options.source_size = 300;
    options.test_size = 60;
    config_path_ = new std::string(testing::WriteSyntheticTask(
        testing::BuildSyntheticTask(options), (*root_ / "task").string()));
  }
  static void TearDownTestSuite() {
    fs::remove_all(*root_);
    delete root_;
    delete config_path_;
  }

  PipelineConfig Load() const { return LoadPipelineConfig(*config_path_); }
  std::string Out(const std::string& name) const { return (*root_ / name).string(); }

  static fs::path* root_;
  static std::string* config_path_;
};

fs::path* PipelineTest::root_ = nullptr;
std::string* PipelineTest::config_path_ = nullptr;

TEST_F(PipelineTest, FullRunAccountsForEveryRemoval) {
  const PipelineResult result = RunPipeline(Load(), Out("full"));
  ASSERT_EQ(result.reports.size(), AllStages().size());
  ASSERT_TRUE(result.semer.has_value());
  long removed = 0;
  for (const StageReport& r : result.reports) {
    EXPECT_FALSE(r.failed);
    EXPECT_EQ(r.input_count - r.output_count, r.removed_total()) << r.stage;
    if (r.stage != "evaluate") removed += r.removed_total();
  }
  // The evaluate stage reports on the test set, not the training corpus.
  const StageReport& train = result.reports[AllStages().size() - 2];
  EXPECT_EQ(train.stage, "train");
  EXPECT_EQ(result.reports.front().input_count - train.output_count, removed);

  for (const char* file : {"report.tsv", "timings.tsv", "config.effective.json",
                           "translate.corpus.tsv", "filter-semantic.removed.tsv",
                           "evaluate.semer.tsv"}) {
    EXPECT_TRUE(fs::exists(fs::path(Out("full")) / file)) << file;
  }
  EXPECT_EQ(ReadFile(fs::path(Out("full")) / "report.tsv").rfind("# mtboot stage report v1\n", 0), 0u);
}

TEST_F(PipelineTest, TrainEvaluateSubsequence) {
  PipelineConfig config = Load();
  config.stages = {"train", "evaluate"};
  config.input_corpus = (*root_ / "task" / "test.tsv").string();
  config.Validate();
  const PipelineResult result = RunPipeline(config, Out("train_eval"));
  ASSERT_EQ(result.reports.size(), 2u);
  ASSERT_TRUE(result.models.has_value());
  // Trained and evaluated on the same clean data.
  EXPECT_LT(result.semer->semer(), 0.05);
}

TEST_F(PipelineTest, EvaluateOnlyLoadsSavedModels) {
  PipelineConfig train = Load();
  train.stages = {"train"};
  train.input_corpus = (*root_ / "task" / "test.tsv").string();
  RunPipeline(train, Out("train_only"));

  PipelineConfig eval = Load();
  eval.stages = {"evaluate"};
  eval.tagger_model = Out("train_only") + "/train.tagger.model";
  eval.classifier_model = Out("train_only") + "/train.classifier.model";
  const PipelineResult result = RunPipeline(eval, Out("eval_only"));
  ASSERT_TRUE(result.semer.has_value());
}

TEST_F(PipelineTest, ValidationRejectsBadStageLists) {
  PipelineConfig config = Load();
  config.stages = {"train", "translate"};
  EXPECT_THROW(config.Validate(), ConfigError);
  config.stages = {"translate", "translate"};
  EXPECT_THROW(config.Validate(), ConfigError);
  config.stages = {"translate", "bogus"};
  EXPECT_THROW(config.Validate(), ConfigError);
  config.stages = {};
  EXPECT_THROW(config.Validate(), ConfigError);
}

TEST_F(PipelineTest, ValidationRejectsMissingFiles) {
  PipelineConfig config = Load();
  config.translations_forward = Out("does_not_exist.tsv");
  EXPECT_THROW(config.Validate(), ConfigError);
  // Not needed when translate is skipped.
  config.stages = {"train", "evaluate"};
  config.input_corpus = (*root_ / "task" / "test.tsv").string();
  EXPECT_NO_THROW(config.Validate());
  // Without an input corpus the source corpus is the starting point.
  config.input_corpus.clear();
  EXPECT_NO_THROW(config.Validate());
  config.source_corpus.clear();
  EXPECT_THROW(config.Validate(), ConfigError);
}

TEST_F(PipelineTest, ValidationRejectsBadValues) {
  PipelineConfig config = Load();
  config.postprocess.mix_probability = 1.5;
  EXPECT_THROW(config.Validate(), ConfigError);
  config = Load();
  config.translation_mode = "oracle";
  EXPECT_THROW(config.Validate(), ConfigError);
}

TEST_F(PipelineTest, ParseErrorsBecomeConfigErrors) {
  EXPECT_THROW(ParsePipelineConfig("{not json", "."), ConfigError);
  EXPECT_THROW(ParsePipelineConfig(R"({"filter": {"mode": "MAYBE"}})", "."),
               ConfigError);
  EXPECT_THROW(ParsePipelineConfig(R"({"filter": {"score_multiplier": "lots"}})", "."),
               ConfigError);
  const PipelineConfig none =
      ParsePipelineConfig(R"({"filter": {"score_multiplier": "none"}})", ".");
  EXPECT_TRUE(std::isinf(none.filter.score_multiplier));
  EXPECT_LT(none.filter.score_multiplier, 0);
}

TEST_F(PipelineTest, FingerprintTracksEffectiveConfig) {
  const PipelineConfig a = Load();
  PipelineConfig b = Load();
  EXPECT_EQ(a.FingerprintHex(), b.FingerprintHex());
  EXPECT_EQ(a.CanonicalJson(), b.CanonicalJson());
  b.seed += 1;
  EXPECT_NE(a.FingerprintHex(), b.FingerprintHex());
  b = Load();
  b.filter.confidence_threshold = 0.2;
  EXPECT_NE(a.FingerprintHex(), b.FingerprintHex());
  // Reloading the canonical form reproduces it.
  const PipelineConfig c = ParsePipelineConfig(a.CanonicalJson(), "/");
  EXPECT_EQ(c.CanonicalJson(), a.CanonicalJson());
}

TEST_F(PipelineTest, FailedStageLeavesPartialReport) {
  const fs::path broken = *root_ / "broken_test.tsv";
  std::ofstream(broken) << "t0\tD\tI\tunclosed [bracket\n";
  PipelineConfig config = Load();
  config.stages = {"train", "evaluate"};
  config.input_corpus = (*root_ / "task" / "test.tsv").string();
  config.test_set = broken.string();
  try {
    RunPipeline(config, Out("failing"));
    FAIL() << "expected StageFailure";
  } catch (const StageFailure& e) {
    EXPECT_EQ(e.stage(), "evaluate");
    ASSERT_EQ(e.reports().size(), 2u);
    EXPECT_FALSE(e.reports()[0].failed);
    EXPECT_TRUE(e.reports()[1].failed);
  }
  const std::string report = ReadFile(fs::path(Out("failing")) / "report.tsv");
  EXPECT_NE(report.find("# error:"), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(Out("failing")) / "train.tagger.model"));
}

TEST(StageList, Parses) {
  EXPECT_EQ(ParseStageList("train, evaluate"),
            (std::vector<std::string>{"train", "evaluate"}));
  EXPECT_EQ(ParseStageList("filter-semantic"),
            (std::vector<std::string>{"filter-semantic"}));
}

SemerReport Report(long errors, const std::string& test_set = "t") {
  SemerReport r;
  r.test_set = test_set;
  r.overall.substitutions = errors;
  r.overall.reference_count = 10000;
  r.per_domain["Music"] = r.overall;
  return r;
}

TEST(Compare, RelativeChanges) {
  EXPECT_NEAR(RelativeChange(21.38, 20.72), -3.087, 1e-3);
  EXPECT_NEAR(RelativeChange(21.38, 23.62), 10.477, 1e-3);
  EXPECT_THROW(RelativeChange(0.0, 1.0), Error);
  EXPECT_EQ(FormatWithChange(21.38, 20.72), "20.72 (-3.09)");
  EXPECT_EQ(FormatWithChange(21.38, 23.62), "23.62 (+10.48)");
  EXPECT_EQ(FormatWithChange(21.38, 21.38), "21.38 (0.00)");
}

TEST(Compare, RowsAndMismatch) {
  const auto rows = CompareRuns(Report(2138), Report(2072));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].scope, "overall");
  EXPECT_EQ(rows[1].scope, "domain:Music");
  EXPECT_NEAR(rows[0].relative_change, -3.087, 1e-3);
  const auto same = CompareRuns(Report(2138), Report(2138));
  EXPECT_EQ(same[0].relative_change, 0.0);
  EXPECT_THROW(CompareRuns(Report(2138), Report(2138, "other")), InvariantError);
  EXPECT_NE(FormatComparison(rows).find("overall\t21.38\t20.72 (-3.09)"),
            std::string::npos);
}

}  // namespace
}  // namespace mtboot
