// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fixture.hpp"
#include "gradcheck.hpp"
#include "mdr/corpus.hpp"
#include "mdr/index.hpp"
#include "mdr/losses.hpp"
#include "mdr/metrics.hpp"
#include "mdr/pipeline.hpp"
#include "mdr/sparse.hpp"
#include "mdr/train.hpp"

using namespace mdr;
using namespace mdr::testing;

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool within(double value, double expected, double tol) {
  return std::abs(value - expected) <= tol;
}

std::vector<HardNegativePool> pools_for(const std::vector<DatasetExample>& ds,
                                        const Corpus& corpus, std::size_t k) {
  std::vector<HardNegativePool> pools;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto pool = concept_match_retrieve(corpus, ds[i].concept_set, k);
    pool.concept_set_id = static_cast<std::int64_t>(i);
    pools.push_back(std::move(pool));
  }
  return pools;
}

double mean_tau(const CrossEncoderModel& model,
                const std::vector<EvalItem>& items,
                const std::vector<DatasetExample>& ds, Metric metric) {
  double total = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    if (item.candidates.size() < 2) continue;
    std::vector<double> scores(item.candidates.size());
    for (std::size_t c = 0; c < item.candidates.size(); ++c) {
      scores[c] = cross_score(model, item.concept_set, item.candidates[c]);
    }
    total += kendall_tau(ordering_from_scores(scores).order,
                         quality_order(item.candidates, ds[i].references,
                                       metric).order);
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

// ---------------------------------------------------------------------------

bool criterion1_metric_oracles(std::string& detail) {
  const double bleu =
      bleu_sentence({"the", "cat", "sat"}, {{"the", "cat", "sat", "down"}}, 3);
  const double r2 = rouge2({"a", "b", "c"}, {{"a", "b", "d"}});
  const double rl = rouge_l({"a", "c", "e"}, {{"a", "b", "c", "d", "e"}});
  std::ostringstream out;
  out << "bleu3=" << bleu << " rouge2=" << r2 << " rougeL=" << rl;
  detail = out.str();
  return within(bleu, std::exp(-1.0 / 3.0), 1e-9) && within(r2, 0.5, 1e-9) &&
         within(rl, 0.75, 1e-9);
}

bool criterion2_loss_oracles(std::string& detail) {
  Vector z(3);
  z << 2, 1, 0;
  const double listmle = list_mle_loss(z, {0, 1, 2}).loss;
  const double uniform = list_mle_loss(Vector::Zero(3), {1, 2, 0}).loss;
  Vector t(2), s(2);
  t << std::log(2.0), 0.0;
  s.setZero();
  const double kl = kl_distill_loss(t, s).loss;
  const double contrastive = contrastive_loss(1.0, {1.0, 1.0, 1.0}).loss;
  std::ostringstream out;
  out << "listmle=" << listmle << " uniform=" << uniform << " kl=" << kl
      << " contrastive=" << contrastive;
  detail = out.str();
  return within(listmle, 0.7208676519626029, 1e-6) &&
         within(uniform, std::log(6.0), 1e-9) &&
         within(kl, 0.056633012265132426, 1e-6) &&
         within(contrastive, std::log(4.0), 1e-9);
}

bool criterion3_gradient_checks(std::string& detail) {
  const auto start = Clock::now();
  Rng rng(404);
  const Vocabulary vocab = gradcheck_vocab();
  DualEncoderModel dual = DualEncoderModel::init(vocab, 6, 5, rng);
  CrossEncoderModel cross = CrossEncoderModel::init(vocab, 6, 7, rng);

  // The |mean_c - mean_s| feature is nondifferentiable where a component is
  // zero; central differences are invalid within one step of that kink, so
  // instances whose means come that close are redrawn. The subgradient there
  // is still exercised by the training tests.
  const auto well_separated = [&](const GradInstance& inst) {
    for (const auto& sentence : inst.sentences) {
      CrossScoreCache cache;
      cross_score(cross, inst.concept_set, sentence, &cache);
      if ((cache.mean_c - cache.mean_s).cwiseAbs().minCoeff() < 1e-3) {
        return false;
      }
    }
    return true;
  };

  double worst = 0.0;
  for (const LossKind kind :
       {LossKind::kContrastive, LossKind::kListMle, LossKind::kKl}) {
    for (int trial = 0; trial < 100; ++trial) {
      GradInstance inst = random_instance(rng);
      while (!well_separated(inst)) inst = random_instance(rng);
      worst = std::max(worst, gradcheck_dual(dual, inst, kind));
      worst = std::max(worst, gradcheck_cross(cross, inst, kind));
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream out;
  out << "worst rel err=" << worst << " over 600 checks, " << elapsed << "s";
  detail = out.str();
  return worst < 1e-4 && elapsed < 30.0;
}

bool criterion4_index_exactness(std::string& detail) {
  const auto start = Clock::now();
  Rng rng(1234);
  const int n = 1000, d = 32, queries = 100;
  const std::size_t k = 10;
  Matrix vectors(n, d);
  std::vector<std::int64_t> ids(n);
  for (int i = 0; i < n; ++i) {
    ids[i] = i;
    for (int j = 0; j < d; ++j) vectors(i, j) = rng.next_normal();
  }
  const FlatIPIndex index = FlatIPIndex::build(vectors, ids);

  bool exact = true;
  for (int qi = 0; qi < queries && exact; ++qi) {
    Vector q(d);
    for (int j = 0; j < d; ++j) q[j] = rng.next_normal();
    const auto hits = index.search(q, k);

    std::vector<std::pair<double, std::int64_t>> brute;
    brute.reserve(n);
    for (int i = 0; i < n; ++i) brute.emplace_back(vectors.row(i).dot(q), i);
    std::sort(brute.begin(), brute.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    if (hits.size() != k) exact = false;
    for (std::size_t i = 0; i < k && exact; ++i) {
      if (hits[i].id != brute[i].second || hits[i].score != brute[i].first) {
        exact = false;
      }
    }
  }
  const double elapsed = seconds_since(start);
  std::ostringstream out;
  out << (exact ? "identical" : "mismatch") << " vs brute force, " << elapsed
      << "s";
  detail = out.str();
  return exact && elapsed < 5.0;
}

bool criterion5_ranker_overfits(std::string& detail) {
  const auto start = Clock::now();
  const Fixture fx = make_fixture(7, 10, 30, 0);
  TrainingConfig cfg;
  cfg.embed_dim = 16;
  cfg.out_dim = 16;
  cfg.hidden_dim = 32;
  cfg.batch_size = 10;
  cfg.pool_size = 6;
  cfg.k_retrieve = 5;
  cfg.learning_rate = 2e-2;
  cfg.seed = 71;
  cfg.epochs = 300;
  // K = 5 keeps the pools inside the graded sentences, which have pairwise
  // distinct metric scores by construction
  const auto pools = pools_for(fx.train, fx.corpus, 5);
  const auto items =
      metric_eval_items(fx.train, pools, fx.corpus, Metric::kBleu4, cfg);

  // the target permutation must be unambiguous for exact agreement
  for (std::size_t i = 0; i < items.size(); ++i) {
    std::vector<double> scores;
    for (const auto& cand : items[i].candidates) {
      scores.push_back(metric_score(Metric::kBleu4, cand,
                                    fx.train[i].references));
    }
    std::sort(scores.begin(), scores.end());
    if (std::adjacent_find(scores.begin(), scores.end()) != scores.end()) {
      detail = "fixture has tied metric scores; ordering target ambiguous";
      return false;
    }
  }

  const CrossEncoderModel ranker = train_ranker(fx.train, fx.corpus, pools, {},
                                                Metric::kBleu4, cfg);
  const double tau = mean_tau(ranker, items, fx.train, Metric::kBleu4);
  const double elapsed = seconds_since(start);
  std::ostringstream out;
  out << "mean tau=" << tau << " over " << items.size() << " examples, "
      << elapsed << "s";
  detail = out.str();
  return tau >= 1.0 - 1e-12 && elapsed < 60.0;
}

bool criterion6_fixture_trends(std::string& detail) {
  const auto start = Clock::now();
  const Fixture fx = make_fixture(7, 200, 800, 40);

  TrainingConfig cfg;
  cfg.embed_dim = 128;
  cfg.out_dim = 128;
  cfg.hidden_dim = 48;
  cfg.batch_size = 32;
  cfg.pool_size = 11;
  cfg.k_retrieve = 30;
  cfg.learning_rate = 1e-2;
  cfg.seed = 5;
  cfg.top_k_export = 2;

  const auto hn_train = pools_for(fx.train, fx.corpus, cfg.k_retrieve);

  cfg.epochs = 40;
  const DualEncoderModel retriever0 =
      warmup_retriever(fx.train, fx.corpus, hn_train, {}, cfg);
  const FlatIPIndex index0 = build_corpus_index(retriever0, fx.corpus);
  const auto p0_held =
      retrieve_pools(retriever0, index0, fx.heldout, cfg.k_retrieve);

  const auto rerank_top1 = [&](const CrossEncoderModel& ranker,
                               Metric metric) {
    std::vector<CandidatePool> reranked;
    for (std::size_t i = 0; i < p0_held.size(); ++i) {
      reranked.push_back(rerank(ranker, fx.heldout[i].concept_set, p0_held[i],
                                fx.corpus));
    }
    return evaluate_pools(reranked, fx.heldout, fx.corpus, metric,
                          cfg.top_k_export)
        .mean_top1;
  };

  TrainingConfig rcfg = cfg;
  rcfg.epochs = 12;
  rcfg.learning_rate = 2e-2;
  rcfg.hidden_dim = 96;
  const CrossEncoderModel binary_ranker =
      train_ranker(fx.train, fx.corpus, hn_train, {}, Metric::kBleu4, rcfg,
                   RankerObjective::kBinaryContrastive);

  std::ostringstream out;
  bool ok = true;

  // 6a + 6c: ListMLE distillation beats the positive-vs-all baseline under
  // each candidate metric
  CrossEncoderModel bleu4_ranker;
  for (const Metric metric :
       {Metric::kBleu4, Metric::kRouge2, Metric::kRougeL}) {
    const CrossEncoderModel ranker = train_ranker(
        fx.train, fx.corpus, hn_train, {}, metric, rcfg);
    const double listmle_top1 = rerank_top1(ranker, metric);
    const double binary_top1 = rerank_top1(binary_ranker, metric);
    out << metric_name(metric) << ": listmle=" << listmle_top1
        << " binary=" << binary_top1 << "; ";
    if (!(listmle_top1 > binary_top1)) ok = false;
    if (metric == Metric::kBleu4) bleu4_ranker = ranker;
  }

  // 6b: distilled retrievers against the warm-up retriever
  const auto retrieve_top1 = [&](const DualEncoderModel& model) {
    const FlatIPIndex index = build_corpus_index(model, fx.corpus);
    const auto pools = retrieve_pools(model, index, fx.heldout,
                                      cfg.k_retrieve);
    return evaluate_pools(pools, fx.heldout, fx.corpus, Metric::kBleu4,
                          cfg.top_k_export)
        .mean_top1;
  };

  cfg.epochs = 10;
  cfg.learning_rate = 2e-3;
  const DualEncoderModel retriever1_prog =
      distill_retriever(retriever0, bleu4_ranker, fx.train, fx.corpus,
                        hn_train, {}, cfg);
  const DualEncoderModel retriever1_direct = distill_retriever_direct(
      retriever0, fx.train, fx.corpus, hn_train, {}, Metric::kBleu4, cfg);

  const double top1_r0 = retrieve_top1(retriever0);
  const double top1_direct = retrieve_top1(retriever1_direct);
  const double top1_prog = retrieve_top1(retriever1_prog);
  out << "retriever top-1: prog=" << top1_prog << " direct=" << top1_direct
      << " warm=" << top1_r0;
  if (!(top1_direct > top1_r0)) ok = false;
  if (top1_prog < top1_direct) {
    out << " [note: progressive below direct]";  // soft check, reported only
  }

  const double elapsed = seconds_since(start);
  out << "; " << elapsed << "s";
  detail = out.str();
  return ok && elapsed < 300.0;
}

bool criterion7_determinism(std::string& detail) {
  const Fixture fx = make_fixture(21, 12, 40, 4);
  const std::string base = "/tmp/mdr_acceptance_det";
  fs::remove_all(base);
  const FixtureFiles files = write_fixture_files(fx, base + "/data");

  PipelineConfig cfg;
  cfg.corpus_path = files.corpus_path;
  cfg.dataset_train = files.train_path;
  cfg.dataset_valid = files.valid_path;
  cfg.output_dir = base + "/out";
  cfg.training.epochs = 2;
  cfg.training.seed = 99;
  cfg.training.k_retrieve = 8;
  cfg.training.pool_size = 4;
  cfg.training.top_k_export = 2;
  cfg.training.batch_size = 8;
  cfg.training.embed_dim = 8;
  cfg.training.out_dim = 8;
  cfg.training.hidden_dim = 12;

  run_pipeline(cfg, all_stages());

  std::map<std::string, std::string> first;
  for (const auto& entry : fs::directory_iterator(cfg.output_dir)) {
    std::ifstream in(entry.path(), std::ios::binary);
    first[entry.path().filename().string()] = std::string(
        std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  fs::remove_all(cfg.output_dir);

  run_pipeline(cfg, all_stages());

  std::size_t compared = 0;
  for (const auto& [name, bytes] : first) {
    std::ifstream in(cfg.output_dir + "/" + name, std::ios::binary);
    const std::string again{std::istreambuf_iterator<char>(in),
                            std::istreambuf_iterator<char>()};
    if (again != bytes) {
      detail = "artifact differs between runs: " + name;
      return false;
    }
    ++compared;
  }
  detail = std::to_string(compared) + " artifacts byte-identical";
  return compared >= 16;
}

bool criterion8_export_golden(std::string& detail) {
  Corpus corpus;
  for (const char* raw :
       {"a dog runs", "the park is big", "a cat sleeps"}) {
    SentenceRecord rec;
    rec.id = static_cast<std::int64_t>(corpus.records.size());
    rec.raw = raw;
    rec.tokens = tokenize(raw);
    corpus.records.push_back(std::move(rec));
  }

  const auto example = [](const std::vector<std::string>& concepts,
                          const std::string& raw_ref) {
    DatasetExample ex;
    ex.concept_set = make_concept_set(concepts);
    ex.raw_references.push_back(raw_ref);
    ex.references.push_back(tokenize(raw_ref));
    return ex;
  };
  const std::vector<DatasetExample> ds = {
      example({"dog", "run"}, "a dog runs fast"),
      example({"park"}, "the park is big and green"),
      example({"cat", "sleep"}, "a cat sleeps all day")};

  const auto pool = [](std::int64_t qid, std::vector<std::int64_t> ids) {
    CandidatePool p;
    p.concept_set_id = qid;
    for (std::int64_t id : ids) p.entries.emplace_back(id, 0.0);
    return p;
  };
  const std::vector<CandidatePool> pools = {
      pool(0, {0, 1}), pool(1, {1, 2}), pool(2, {2, 0})};

  const std::string path = "/tmp/mdr_acceptance_export.tsv";
  export_generator_file(pools, ds, corpus, 2, path);
  std::ifstream in(path);
  const std::string got{std::istreambuf_iterator<char>(in),
                        std::istreambuf_iterator<char>()};
  std::remove(path.c_str());

  const std::string expected =
      "<S> dog run </S> <S> a dog runs </S> <S> the park is big </S>"
      "\t<S> a dog runs fast </S>\n"
      "<S> park </S> <S> the park is big </S> <S> a cat sleeps </S>"
      "\t<S> the park is big and green </S>\n"
      "<S> cat sleep </S> <S> a cat sleeps </S> <S> a dog runs </S>"
      "\t<S> a cat sleeps all day </S>\n";
  detail = got == expected ? "matches golden output"
                           : "output differs from golden file";
  return got == expected;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "metric oracles", criterion1_metric_oracles},
      {2, "loss oracles", criterion2_loss_oracles},
      {3, "gradient checks", criterion3_gradient_checks},
      {4, "index exactness", criterion4_index_exactness},
      {5, "ranker overfits to the metric ordering", criterion5_ranker_overfits},
      {6, "synthetic fixture trends", criterion6_fixture_trends},
      {7, "pipeline determinism", criterion7_determinism},
      {8, "export golden file", criterion8_export_golden},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::string detail;
    bool passed = false;
    try {
      passed = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!passed) ++failures;
    std::cout << (passed ? "PASS" : "FAIL") << " criterion " << criterion.id
              << " (" << criterion.name << "): " << detail << "\n";
  }
  return failures == 0 ? 0 : 1;
}
