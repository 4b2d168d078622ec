#pragma once

#include <set>
#include <string>
#include <vector>

#include "mdr/corpus.hpp"
#include "mdr/encoder.hpp"
#include "mdr/index.hpp"
#include "mdr/metrics.hpp"
#include "mdr/pool.hpp"
#include "mdr/sparse.hpp"
#include "mdr/train.hpp"

namespace mdr {

enum class HardNegativeSource { kConceptMatch, kTfIdf };

enum class Stage {
  kPools,
  kWarmup,
  kRetrieve,
  kTrainRanker,
  kRerank,
  kDistill,
  kRetrieveDistilled,
  kExport,
  kEval,
};

struct PipelineConfig {
  std::string corpus_path;
  std::string dataset_train;
  std::string dataset_valid;  // empty -> validate on the training split
  std::string output_dir;
  HardNegativeSource hard_negative_source = HardNegativeSource::kConceptMatch;
  TrainingConfig training;
};

PipelineConfig load_pipeline_config(const std::string& path);

// FNV-1a over the canonical JSON dump of the config.
std::string config_hash(const PipelineConfig& config);

// JSONL header line carried by every stage artifact.
std::string artifact_header(const PipelineConfig& config);

struct EvalReport {
  double mean_top1 = 0.0;   // mean metric(top-1, S)
  double mean_topk = 0.0;   // mean metric over the top k entries
  double mean_tau = 0.0;    // Kendall tau of pool order vs metric order
  double recall_at_1 = 0.0; // top-1 equals the metric-argmax entry
};

EvalReport evaluate_pools(const std::vector<CandidatePool>& pools,
                          const std::vector<DatasetExample>& dataset,
                          const Corpus& corpus, Metric metric, int k);

// One line per (concept set, reference) pair:
//   "<S> c1 ... cm </S> <S> s1 </S> ... <S> sk </S>" \t "<S> reference </S>"
void export_generator_file(const std::vector<CandidatePool>& pools,
                           const std::vector<DatasetExample>& dataset,
                           const Corpus& corpus, int k,
                           const std::string& path);

struct GeneratorLine {
  std::vector<std::string> source_segments;  // concept segment first
  std::string target;
};

std::vector<GeneratorLine> parse_generator_file(const std::string& path);

// Runs the requested stages in pipeline order, loading inputs produced by
// earlier runs from the output directory. Throws naming the stage whose
// upstream artifact is missing.
void run_pipeline(const PipelineConfig& config, const std::set<Stage>& stages);

inline std::set<Stage> all_stages() {
  return {Stage::kPools,   Stage::kWarmup,  Stage::kRetrieve,
          Stage::kTrainRanker, Stage::kRerank, Stage::kDistill,
          Stage::kRetrieveDistilled, Stage::kExport, Stage::kEval};
}

// Warm-up comparison between the two hard-negative sources; returns the
// JSON report text and writes it under the output directory.
std::string ablation_hard_negatives(const PipelineConfig& config);

// Encode every corpus sentence with the retriever's sentence encoder and
// build the exact index over the rows.
FlatIPIndex build_corpus_index(const DualEncoderModel& model,
                               const Corpus& corpus);

std::vector<CandidatePool> retrieve_pools(const DualEncoderModel& model,
                                          const FlatIPIndex& index,
                                          const std::vector<DatasetExample>& ds,
                                          int k);

}  // namespace mdr
