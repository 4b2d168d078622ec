#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mdr/corpus.hpp"
#include "mdr/encoder.hpp"
#include "mdr/losses.hpp"
#include "mdr/metrics.hpp"
#include "mdr/pool.hpp"
#include "mdr/sparse.hpp"

namespace mdr {

struct TrainingConfig {
  double learning_rate = 1e-2;
  int batch_size = 32;  // doubles as N (in-batch negatives + 1)
  int epochs = 0;
  int patience = 2;
  std::uint64_t seed = 0;
  int k_retrieve = 100;  // K, candidate pool size
  int pool_size = 11;    // N1 and N2: 1 positive + (pool_size - 1) negatives
  int top_k_export = 2;
  Metric distill_metric = Metric::kBleu4;
  int embed_dim = 64;
  int out_dim = 64;
  int hidden_dim = 128;
};

// How the ranker is supervised: listwise against the metric ordering, or the
// positive-vs-all baseline that treats all negatives equally.
enum class RankerObjective { kListMle, kBinaryContrastive };

class AdamOptimizer {
 public:
  AdamOptimizer(Eigen::Index param_count, double learning_rate);
  void step(Vector& theta, const Vector& grad);

 private:
  double lr_;
  Vector m_, v_;
  int t_ = 0;
};

// One scored multiple-choice question: candidates plus the correct index.
struct EvalItem {
  ConceptSet concept_set;
  std::vector<TokenSeq> candidates;
  std::size_t correct = 0;
};

using ScoreFn =
    std::function<double(const ConceptSet&, const TokenSeq&)>;

// Fraction of items whose argmax candidate (ties to the lowest index) is the
// correct one.
double recall_at_1(const ScoreFn& score_fn, const std::vector<EvalItem>& items);

// Validation items for warm-up: positive first, pool negatives after,
// correct = 0.
std::vector<EvalItem> warmup_eval_items(
    const std::vector<DatasetExample>& examples,
    const std::vector<HardNegativePool>& pools, const Corpus& corpus,
    const TrainingConfig& config);

// Negative-only validation items for the ranker/distillation stages:
// correct = metric-argmax over the candidates.
std::vector<EvalItem> metric_eval_items(
    const std::vector<DatasetExample>& examples,
    const std::vector<HardNegativePool>& pools, const Corpus& corpus,
    Metric metric, const TrainingConfig& config);

DualEncoderModel warmup_retriever(const std::vector<DatasetExample>& dataset,
                                  const Corpus& corpus,
                                  const std::vector<HardNegativePool>& pools,
                                  const std::vector<EvalItem>& val_items,
                                  const TrainingConfig& config);

CrossEncoderModel train_ranker(const std::vector<DatasetExample>& dataset,
                               const Corpus& corpus,
                               const std::vector<HardNegativePool>& pools_p0,
                               const std::vector<EvalItem>& val_items,
                               Metric metric, const TrainingConfig& config,
                               RankerObjective objective =
                                   RankerObjective::kListMle);

DualEncoderModel distill_retriever(const DualEncoderModel& warm_retriever,
                                   const CrossEncoderModel& ranker,
                                   const std::vector<DatasetExample>& dataset,
                                   const Corpus& corpus,
                                   const std::vector<HardNegativePool>& pools_p0,
                                   const std::vector<EvalItem>& val_items,
                                   const TrainingConfig& config);

DualEncoderModel distill_retriever_direct(
    const DualEncoderModel& warm_retriever,
    const std::vector<DatasetExample>& dataset, const Corpus& corpus,
    const std::vector<HardNegativePool>& pools_p0,
    const std::vector<EvalItem>& val_items, Metric metric,
    const TrainingConfig& config);

// Re-rank a candidate pool by descending cross_score, ties keep the original
// pool position.
CandidatePool rerank(const CrossEncoderModel& model, const ConceptSet& cs,
                     const CandidatePool& pool, const Corpus& corpus);

// Checkpoints: JSON parameter dumps with config echo; round-trip exact.
void save_dual_encoder(const DualEncoderModel& model, const TrainingConfig& cfg,
                       const std::string& path);
DualEncoderModel load_dual_encoder(const std::string& path);
void save_cross_encoder(const CrossEncoderModel& model,
                        const TrainingConfig& cfg, const std::string& path);
CrossEncoderModel load_cross_encoder(const std::string& path);

}  // namespace mdr
