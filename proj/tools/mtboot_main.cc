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

// mtboot: command-line driver for the bootstrapping pipeline.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtboot/corpus.h"
#include "mtboot/error.h"
#include "mtboot/eval.h"
#include "mtboot/pipeline.h"
#include "mtboot/strings.h"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitStageFailure = 2;

struct CommonFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::string stages;
  std::string out = "mtboot_out";
};

void AddCommonFlags(CLI::App* app, CommonFlags* flags, bool stages_flag) {
  app->add_option("--config", flags->config, "pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--seed", flags->seed, "override the config seed");
  if (stages_flag) {
    app->add_option("--stages", flags->stages,
                    "comma-separated stage subsequence");
  }
  app->add_option("--out", flags->out, "output directory");
}

int RunStages(const CommonFlags& flags,
              const std::vector<std::string>& default_stages) {
  mtboot::PipelineConfig config;
  try {
    config = mtboot::LoadPipelineConfig(flags.config);
    if (flags.seed) config.seed = *flags.seed;
    if (!flags.stages.empty()) {
      config.stages = mtboot::ParseStageList(flags.stages);
    } else if (!default_stages.empty()) {
      config.stages = default_stages;
    }
    config.Validate();
  } catch (const mtboot::Error& e) {
    std::cerr << "mtboot: invalid configuration: " << e.what() << '\n';
    return kExitValidation;
  }
  try {
    mtboot::PipelineResult result = mtboot::RunPipeline(config, flags.out);
    mtboot::WriteStageReports(std::cout, result.reports);
    if (result.semer) {
      std::cout << "SemER\t"
                << mtboot::FormatFixed(result.semer->semer() * 100.0, 2)
                << "%\n";
    }
  } catch (const mtboot::StageFailure& e) {
    std::cerr << "mtboot: " << e.what() << '\n';
    mtboot::WriteStageReports(std::cerr, e.reports());
    return kExitStageFailure;
  } catch (const std::exception& e) {
    std::cerr << "mtboot: " << e.what() << '\n';
    return kExitStageFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtboot: cross-lingual NLU data bootstrapping"};
  app.require_subcommand(1);

  struct StageCommand {
    const char* name;
    const char* help;
    std::vector<std::string> stages;
  };
  const std::vector<StageCommand> stage_commands = {
      {"translate", "translate the source corpus", {"translate"}},
      {"project", "project annotations through alignments", {"project"}},
      {"filter", "round-trip and score filtering",
       {"filter-semantic", "filter-score"}},
      {"postprocess", "slot resampling / retention", {"postprocess"}},
      {"train", "train the slot tagger and intent classifier", {"train"}},
      {"evaluate", "SemER on the test set", {"evaluate"}},
      {"pipeline", "run the configured stage list", {}},
  };
  std::vector<CommonFlags> flags(stage_commands.size());
  std::vector<CLI::App*> stage_apps;
  for (size_t i = 0; i < stage_commands.size(); ++i) {
    CLI::App* sub =
        app.add_subcommand(stage_commands[i].name, stage_commands[i].help);
    const bool free_stages = stage_commands[i].stages.empty() ||
                             std::string(stage_commands[i].name) == "filter";
    AddCommonFlags(sub, &flags[i], free_stages);
    stage_apps.push_back(sub);
  }

  std::string baseline_path, condition_path;
  CLI::App* compare =
      app.add_subcommand("compare", "relative SemER change between two runs");
  compare->add_option("baseline", baseline_path, "baseline semer report")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("condition", condition_path, "condition semer report")
      ->required()
      ->check(CLI::ExistingFile);

  std::string grammar_path, out_path, language = "src", id_prefix = "g";
  std::vector<std::string> catalog_paths;
  size_t count = 1000;
  uint64_t seed = 0;
  CLI::App* sample =
      app.add_subcommand("sample-grammar", "sample annotated utterances");
  sample->add_option("--grammar", grammar_path)->required()->check(CLI::ExistingFile);
  sample->add_option("--catalog", catalog_paths)->check(CLI::ExistingFile);
  sample->add_option("--n", count, "number of utterances");
  sample->add_option("--seed", seed);
  sample->add_option("--out", out_path, "output corpus (stdout if omitted)");
  sample->add_option("--language", language);
  sample->add_option("--id-prefix", id_prefix);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  for (size_t i = 0; i < stage_apps.size(); ++i) {
    if (stage_apps[i]->parsed()) {
      return RunStages(flags[i], stage_commands[i].stages);
    }
  }

  if (compare->parsed()) {
    try {
      const mtboot::SemerReport a = mtboot::LoadSemerReport(baseline_path);
      const mtboot::SemerReport b = mtboot::LoadSemerReport(condition_path);
      std::cout << mtboot::FormatComparison(mtboot::CompareRuns(a, b));
    } catch (const std::exception& e) {
      std::cerr << "mtboot: " << e.what() << '\n';
      return kExitValidation;
    }
    return 0;
  }

  if (sample->parsed()) {
    try {
      const auto templates = mtboot::LoadGrammar(grammar_path);
      const auto catalogs = mtboot::LoadCatalogs(catalog_paths);
      const auto corpus = mtboot::SampleGrammar(templates, catalogs, count,
                                                seed, language, id_prefix);
      if (out_path.empty()) {
        mtboot::WriteCorpus(std::cout, corpus);
      } else {
        mtboot::SaveCorpus(out_path, corpus);
      }
    } catch (const std::exception& e) {
      std::cerr << "mtboot: " << e.what() << '\n';
      return kExitValidation;
    }
    return 0;
  }
  return kExitValidation;
}
