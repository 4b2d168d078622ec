#include <cstdint>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdr/pipeline.hpp"

namespace {

const std::map<std::string, mdr::Stage> kStageByName = {
    {"pools", mdr::Stage::kPools},
    {"warmup", mdr::Stage::kWarmup},
    {"retrieve", mdr::Stage::kRetrieve},
    {"train-ranker", mdr::Stage::kTrainRanker},
    {"rerank", mdr::Stage::kRerank},
    {"distill", mdr::Stage::kDistill},
    {"retrieve-distilled", mdr::Stage::kRetrieveDistilled},
    {"export", mdr::Stage::kExport},
    {"eval", mdr::Stage::kEval},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metric-guided distillation retrieval pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::int64_t seed_override = -1;
  std::vector<std::string> stage_overrides;
  app.add_option("--config", config_path, "Pipeline config file (JSON)")
      ->required();
  app.add_option("--seed", seed_override, "Override the config seed");
  app.add_option("--stage", stage_overrides,
                 "Restrict run-all to the named stages (repeatable)");

  std::string command;
  for (const auto& [name, stage] : kStageByName) {
    app.add_subcommand(name)->callback([&command, name = name] {
      command = name;
    });
  }
  app.add_subcommand("run-all")->callback([&command] { command = "run-all"; });
  app.add_subcommand("ablate-negatives")->callback([&command] {
    command = "ablate-negatives";
  });

  CLI11_PARSE(app, argc, argv);

  try {
    mdr::PipelineConfig config = mdr::load_pipeline_config(config_path);
    if (seed_override >= 0) {
      config.training.seed = static_cast<std::uint64_t>(seed_override);
    }

    if (command == "ablate-negatives") {
      std::cout << mdr::ablation_hard_negatives(config) << '\n';
      return 0;
    }

    std::set<mdr::Stage> stages;
    if (command == "run-all") {
      if (stage_overrides.empty()) {
        stages = mdr::all_stages();
      } else {
        for (const auto& name : stage_overrides) {
          auto it = kStageByName.find(name);
          if (it == kStageByName.end()) {
            std::cerr << "unknown stage: " << name << '\n';
            return 2;
          }
          stages.insert(it->second);
        }
      }
    } else {
      stages.insert(kStageByName.at(command));
    }
    mdr::run_pipeline(config, stages);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
