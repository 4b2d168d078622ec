#include "mdr/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace mdr {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-8;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(seed ^ splitmix64(a)) ^ splitmix64(b));
}

// (example index, reference index) pairs; one training instance per pair.
std::vector<std::pair<std::size_t, std::size_t>> make_instances(
    const std::vector<DatasetExample>& dataset) {
  std::vector<std::pair<std::size_t, std::size_t>> instances;
  for (std::size_t e = 0; e < dataset.size(); ++e) {
    for (std::size_t r = 0; r < dataset[e].references.size(); ++r) {
      instances.emplace_back(e, r);
    }
  }
  return instances;
}

// Sample `count` distinct pool entries whose raw text differs from the
// positive, preserving descending pool order of the eligible set before the
// shuffle so the draw is uniform.
std::vector<std::int64_t> sample_pool_negatives(const HardNegativePool& pool,
                                                const Corpus& corpus,
                                                const std::string& positive_raw,
                                                std::size_t count, Rng& rng) {
  const std::string positive = lowercase_copy(positive_raw);
  std::vector<std::int64_t> eligible;
  eligible.reserve(pool.sentence_ids.size());
  for (std::int64_t id : pool.sentence_ids) {
    if (lowercase_copy(corpus[static_cast<std::size_t>(id)].raw) != positive) {
      eligible.push_back(id);
    }
  }
  if (eligible.size() < count) {
    throw std::runtime_error("hard negative pool smaller than pool_size - 1");
  }
  // Partial Fisher-Yates for the first `count` slots.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.next_index(eligible.size() - i);
    std::swap(eligible[i], eligible[j]);
  }
  eligible.resize(count);
  return eligible;
}

struct EarlyStopper {
  double best_score = -1.0;
  int best_epoch = 0;
  int patience;

  explicit EarlyStopper(int patience) : patience(patience) {}

  // Returns true if this epoch is a new best.
  bool observe(int epoch, double score) {
    if (score > best_score) {
      best_score = score;
      best_epoch = epoch;
      return true;
    }
    return false;
  }
  bool should_stop(int epoch) const { return epoch - best_epoch >= patience; }
};

}  // namespace

AdamOptimizer::AdamOptimizer(Eigen::Index param_count, double learning_rate)
    : lr_(learning_rate),
      m_(Vector::Zero(param_count)),
      v_(Vector::Zero(param_count)) {}

void AdamOptimizer::step(Vector& theta, const Vector& grad) {
  ++t_;
  m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
  v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseProduct(grad);
  const double correction1 = 1.0 - std::pow(kBeta1, t_);
  const double correction2 = 1.0 - std::pow(kBeta2, t_);
  theta.array() -= lr_ * (m_.array() / correction1) /
                   ((v_.array() / correction2).sqrt() + kEpsilon);
}

double recall_at_1(const ScoreFn& score_fn,
                   const std::vector<EvalItem>& items) {
  if (items.empty()) throw std::invalid_argument("no evaluation items");
  std::size_t correct = 0;
  for (const auto& item : items) {
    if (item.candidates.empty()) {
      throw std::invalid_argument("empty candidate list");
    }
    std::size_t argmax = 0;
    double best = score_fn(item.concept_set, item.candidates[0]);
    for (std::size_t i = 1; i < item.candidates.size(); ++i) {
      const double s = score_fn(item.concept_set, item.candidates[i]);
      if (s > best) {
        best = s;
        argmax = i;
      }
    }
    if (argmax == item.correct) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

std::vector<EvalItem> warmup_eval_items(
    const std::vector<DatasetExample>& examples,
    const std::vector<HardNegativePool>& pools, const Corpus& corpus,
    const TrainingConfig& config) {
  std::vector<EvalItem> items;
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const auto& ex = examples[e];
    const auto& pool = pools[e];
    for (std::size_t r = 0; r < ex.references.size(); ++r) {
      EvalItem item;
      item.concept_set = ex.concept_set;
      item.correct = 0;
      item.candidates.push_back(ex.references[r]);
      const std::string positive = lowercase_copy(ex.raw_references[r]);
      for (std::int64_t id : pool.sentence_ids) {
        if (static_cast<int>(item.candidates.size()) >= config.pool_size) break;
        const auto& rec = corpus[static_cast<std::size_t>(id)];
        if (lowercase_copy(rec.raw) == positive) continue;
        item.candidates.push_back(rec.tokens);
      }
      items.push_back(std::move(item));
    }
  }
  return items;
}

std::vector<EvalItem> metric_eval_items(
    const std::vector<DatasetExample>& examples,
    const std::vector<HardNegativePool>& pools, const Corpus& corpus,
    Metric metric, const TrainingConfig& config) {
  std::vector<EvalItem> items;
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const auto& ex = examples[e];
    EvalItem item;
    item.concept_set = ex.concept_set;
    for (std::int64_t id : pools[e].sentence_ids) {
      if (static_cast<int>(item.candidates.size()) >= config.pool_size - 1) {
        break;
      }
      const auto& rec = corpus[static_cast<std::size_t>(id)];
      bool is_reference = false;
      for (const auto& raw_ref : ex.raw_references) {
        if (lowercase_copy(rec.raw) == lowercase_copy(raw_ref)) {
          is_reference = true;
          break;
        }
      }
      if (!is_reference) item.candidates.push_back(rec.tokens);
    }
    if (item.candidates.empty()) continue;
    double best = -1.0;
    for (std::size_t i = 0; i < item.candidates.size(); ++i) {
      const double s = metric_score(metric, item.candidates[i], ex.references);
      if (s > best) {
        best = s;
        item.correct = i;
      }
    }
    items.push_back(std::move(item));
  }
  return items;
}

DualEncoderModel warmup_retriever(const std::vector<DatasetExample>& dataset,
                                  const Corpus& corpus,
                                  const std::vector<HardNegativePool>& pools,
                                  const std::vector<EvalItem>& val_items,
                                  const TrainingConfig& config) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  if (pools.size() != dataset.size()) {
    throw std::invalid_argument("pools not aligned with dataset");
  }

  Rng init_rng(config.seed);
  Vocabulary vocab = build_vocabulary(corpus, dataset);
  DualEncoderModel model = DualEncoderModel::init(vocab, config.embed_dim,
                                                  config.out_dim, init_rng);
  if (config.epochs == 0) return model;

  auto instances = make_instances(dataset);
  AdamOptimizer adam_c(model.concept_encoder.param_count(),
                       config.learning_rate);
  AdamOptimizer adam_s(model.sentence_encoder.param_count(),
                       config.learning_rate);

  DualEncoderModel best = model;
  EarlyStopper stopper(config.patience);

  const auto validate = [&](const DualEncoderModel& m) {
    if (val_items.empty()) return 0.0;
    return recall_at_1(
        [&](const ConceptSet& cs, const TokenSeq& tokens) {
          return dot_sim(m.encode_concepts(cs), m.encode_sentence(tokens));
        },
        val_items);
  };

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng order_rng(mix(config.seed, 0x0DDE5, epoch));
    order_rng.shuffle(instances);

    for (std::size_t start = 0; start < instances.size();
         start += config.batch_size) {
      const std::size_t batch =
          std::min<std::size_t>(config.batch_size, instances.size() - start);

      std::vector<EncodeCache> q_cache(batch), p_cache(batch), h_cache(batch);
      std::vector<Vector> q(batch), p(batch), h(batch);
      for (std::size_t b = 0; b < batch; ++b) {
        const auto [e, r] = instances[start + b];
        const auto& ex = dataset[e];
        q[b] = model.encode_concepts(ex.concept_set, &q_cache[b]);
        p[b] = encode(model.sentence_encoder, vocab.ids(ex.references[r]),
                      &p_cache[b]);
        Rng hn_rng(mix(config.seed, epoch, start + b));
        const std::int64_t hn_id = sample_hard_negative(
            pools[e], corpus, ex.raw_references[r], hn_rng);
        h[b] = encode(model.sentence_encoder,
                      vocab.ids(corpus[static_cast<std::size_t>(hn_id)].tokens),
                      &h_cache[b]);
      }

      std::vector<Vector> dq(batch, Vector::Zero(config.out_dim));
      std::vector<Vector> dp(batch, Vector::Zero(config.out_dim));
      std::vector<Vector> dh(batch, Vector::Zero(config.out_dim));

      for (std::size_t i = 0; i < batch; ++i) {
        std::vector<double> negs;
        std::vector<std::size_t> neg_src;  // in-batch positive index, or self
        for (std::size_t j = 0; j < batch; ++j) {
          if (j == i) continue;
          negs.push_back(dot_sim(q[i], p[j]));
          neg_src.push_back(j);
        }
        negs.push_back(dot_sim(q[i], h[i]));

        const LossResult lr = contrastive_loss(dot_sim(q[i], p[i]), negs);
        const double scale = 1.0 / static_cast<double>(batch);

        dq[i] += scale * lr.grad[0] * p[i];
        dp[i] += scale * lr.grad[0] * q[i];
        for (std::size_t g = 0; g < neg_src.size(); ++g) {
          const std::size_t j = neg_src[g];
          dq[i] += scale * lr.grad[g + 1] * p[j];
          dp[j] += scale * lr.grad[g + 1] * q[i];
        }
        const double gh = scale * lr.grad[lr.grad.size() - 1];
        dq[i] += gh * h[i];
        dh[i] += gh * q[i];
      }

      Vector grad_c = Vector::Zero(model.concept_encoder.param_count());
      Vector grad_s = Vector::Zero(model.sentence_encoder.param_count());
      for (std::size_t b = 0; b < batch; ++b) {
        encode_backward(model.concept_encoder, q_cache[b], dq[b], grad_c);
        encode_backward(model.sentence_encoder, p_cache[b], dp[b], grad_s);
        encode_backward(model.sentence_encoder, h_cache[b], dh[b], grad_s);
      }
      adam_c.step(model.concept_encoder.theta, grad_c);
      adam_s.step(model.sentence_encoder.theta, grad_s);
    }

    if (!val_items.empty()) {
      if (stopper.observe(epoch, validate(model))) best = model;
      if (stopper.should_stop(epoch)) break;
    }
  }
  return val_items.empty() ? model : best;
}

CrossEncoderModel train_ranker(const std::vector<DatasetExample>& dataset,
                               const Corpus& corpus,
                               const std::vector<HardNegativePool>& pools_p0,
                               const std::vector<EvalItem>& val_items,
                               Metric metric, const TrainingConfig& config,
                               RankerObjective objective) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  if (pools_p0.size() != dataset.size()) {
    throw std::invalid_argument("pools not aligned with dataset");
  }

  Rng init_rng(config.seed);
  Vocabulary vocab = build_vocabulary(corpus, dataset);
  CrossEncoderModel model = CrossEncoderModel::init(
      vocab, config.embed_dim, config.hidden_dim, init_rng);
  if (config.epochs == 0) return model;

  auto instances = make_instances(dataset);
  AdamOptimizer adam(model.param_count(), config.learning_rate);

  CrossEncoderModel best = model;
  EarlyStopper stopper(config.patience);

  const auto validate = [&](const CrossEncoderModel& m) {
    if (val_items.empty()) return 0.0;
    return recall_at_1(
        [&](const ConceptSet& cs, const TokenSeq& tokens) {
          return cross_score(m, cs, tokens);
        },
        val_items);
  };

  const std::size_t neg_count = static_cast<std::size_t>(config.pool_size - 1);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng order_rng(mix(config.seed, 0x5A11E, epoch));
    order_rng.shuffle(instances);

    for (std::size_t start = 0; start < instances.size();
         start += config.batch_size) {
      const std::size_t batch =
          std::min<std::size_t>(config.batch_size, instances.size() - start);
      Vector grad = Vector::Zero(model.param_count());

      for (std::size_t b = 0; b < batch; ++b) {
        const auto [e, r] = instances[start + b];
        const auto& ex = dataset[e];
        Rng neg_rng(mix(config.seed, epoch, start + b));
        const auto neg_ids = sample_pool_negatives(
            pools_p0[e], corpus, ex.raw_references[r], neg_count, neg_rng);

        std::vector<const TokenSeq*> candidates;
        candidates.push_back(&ex.references[r]);
        for (std::int64_t id : neg_ids) {
          candidates.push_back(&corpus[static_cast<std::size_t>(id)].tokens);
        }
        const std::size_t n = candidates.size();

        std::vector<CrossScoreCache> caches(n);
        Vector z(n);
        for (std::size_t i = 0; i < n; ++i) {
          z[i] = cross_score(model, ex.concept_set, *candidates[i], &caches[i]);
        }

        LossResult lr;
        if (objective == RankerObjective::kListMle) {
          // Positive scores 1.0 by identity; negatives are metric-scored.
          std::vector<double> quality(n);
          quality[0] = 1.0;
          for (std::size_t i = 1; i < n; ++i) {
            quality[i] =
                metric_score(metric, *candidates[i], ex.references);
          }
          lr = list_mle_loss(z, ordering_from_scores(quality).order);
        } else {
          std::vector<double> negs(z.data() + 1, z.data() + n);
          lr = contrastive_loss(z[0], negs);
        }

        const double scale = 1.0 / static_cast<double>(batch);
        for (std::size_t i = 0; i < n; ++i) {
          cross_score_backward(model, caches[i], scale * lr.grad[i], grad);
        }
      }
      adam.step(model.theta, grad);
    }

    if (!val_items.empty()) {
      if (stopper.observe(epoch, validate(model))) best = model;
      if (stopper.should_stop(epoch)) break;
    }
  }
  return val_items.empty() ? model : best;
}

namespace {

// Shared driver for the two distillation paths; `make_loss` maps the student
// score vector for one instance to a LossResult.
template <typename LossMaker>
DualEncoderModel distill_retriever_impl(
    const DualEncoderModel& warm_retriever,
    const std::vector<DatasetExample>& dataset, const Corpus& corpus,
    const std::vector<HardNegativePool>& pools,
    const std::vector<EvalItem>& val_items, const TrainingConfig& config,
    LossMaker&& make_loss) {
  if (dataset.empty()) throw std::invalid_argument("empty dataset");
  if (pools.size() != dataset.size()) {
    throw std::invalid_argument("pools not aligned with dataset");
  }

  DualEncoderModel model = warm_retriever;
  if (config.epochs == 0) return model;

  auto instances = make_instances(dataset);
  AdamOptimizer adam_c(model.concept_encoder.param_count(),
                       config.learning_rate);
  AdamOptimizer adam_s(model.sentence_encoder.param_count(),
                       config.learning_rate);

  DualEncoderModel best = model;
  EarlyStopper stopper(config.patience);

  const auto validate = [&](const DualEncoderModel& m) {
    if (val_items.empty()) return 0.0;
    return recall_at_1(
        [&](const ConceptSet& cs, const TokenSeq& tokens) {
          return dot_sim(m.encode_concepts(cs), m.encode_sentence(tokens));
        },
        val_items);
  };

  const std::size_t neg_count = static_cast<std::size_t>(config.pool_size - 1);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng order_rng(mix(config.seed, 0xD15717, epoch));
    order_rng.shuffle(instances);

    for (std::size_t start = 0; start < instances.size();
         start += config.batch_size) {
      const std::size_t batch =
          std::min<std::size_t>(config.batch_size, instances.size() - start);
      Vector grad_c = Vector::Zero(model.concept_encoder.param_count());
      Vector grad_s = Vector::Zero(model.sentence_encoder.param_count());

      for (std::size_t b = 0; b < batch; ++b) {
        const auto [e, r] = instances[start + b];
        const auto& ex = dataset[e];
        Rng neg_rng(mix(config.seed, epoch, start + b));
        const auto neg_ids = sample_pool_negatives(
            pools[e], corpus, ex.raw_references[r], neg_count, neg_rng);

        std::vector<const TokenSeq*> candidates;
        candidates.push_back(&ex.references[r]);
        for (std::int64_t id : neg_ids) {
          candidates.push_back(&corpus[static_cast<std::size_t>(id)].tokens);
        }
        const std::size_t n = candidates.size();

        EncodeCache q_cache;
        const Vector q = model.encode_concepts(ex.concept_set, &q_cache);
        std::vector<EncodeCache> s_cache(n);
        std::vector<Vector> s(n);
        Vector z(n);
        for (std::size_t i = 0; i < n; ++i) {
          s[i] = model.encode_sentence(*candidates[i], &s_cache[i]);
          z[i] = dot_sim(q, s[i]);
        }

        const LossResult lr = make_loss(ex, r, candidates, z);
        const double scale = 1.0 / static_cast<double>(batch);

        Vector dq = Vector::Zero(config.out_dim);
        for (std::size_t i = 0; i < n; ++i) {
          const double g = scale * lr.grad[i];
          dq += g * s[i];
          encode_backward(model.sentence_encoder, s_cache[i], (g * q).eval(),
                          grad_s);
        }
        encode_backward(model.concept_encoder, q_cache, dq, grad_c);
      }
      adam_c.step(model.concept_encoder.theta, grad_c);
      adam_s.step(model.sentence_encoder.theta, grad_s);
    }

    if (!val_items.empty()) {
      if (stopper.observe(epoch, validate(model))) best = model;
      if (stopper.should_stop(epoch)) break;
    }
  }
  return val_items.empty() ? model : best;
}

}  // namespace

DualEncoderModel distill_retriever(const DualEncoderModel& warm_retriever,
                                   const CrossEncoderModel& ranker,
                                   const std::vector<DatasetExample>& dataset,
                                   const Corpus& corpus,
                                   const std::vector<HardNegativePool>& pools_p0,
                                   const std::vector<EvalItem>& val_items,
                                   const TrainingConfig& config) {
  return distill_retriever_impl(
      warm_retriever, dataset, corpus, pools_p0, val_items, config,
      [&](const DatasetExample& ex, std::size_t /*ref*/,
          const std::vector<const TokenSeq*>& candidates, const Vector& z) {
        Vector teacher(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          teacher[i] = cross_score(ranker, ex.concept_set, *candidates[i]);
        }
        return kl_distill_loss(teacher, z);
      });
}

DualEncoderModel distill_retriever_direct(
    const DualEncoderModel& warm_retriever,
    const std::vector<DatasetExample>& dataset, const Corpus& corpus,
    const std::vector<HardNegativePool>& pools_p0,
    const std::vector<EvalItem>& val_items, Metric metric,
    const TrainingConfig& config) {
  return distill_retriever_impl(
      warm_retriever, dataset, corpus, pools_p0, val_items, config,
      [&](const DatasetExample& ex, std::size_t /*ref*/,
          const std::vector<const TokenSeq*>& candidates, const Vector& z) {
        std::vector<double> quality(candidates.size());
        quality[0] = 1.0;
        for (std::size_t i = 1; i < candidates.size(); ++i) {
          quality[i] = metric_score(metric, *candidates[i], ex.references);
        }
        return list_mle_loss(z, ordering_from_scores(quality).order);
      });
}

CandidatePool rerank(const CrossEncoderModel& model, const ConceptSet& cs,
                     const CandidatePool& pool, const Corpus& corpus) {
  if (pool.entries.empty()) return pool;
  std::vector<double> scores(pool.entries.size());
  for (std::size_t i = 0; i < pool.entries.size(); ++i) {
    const auto& rec = corpus[static_cast<std::size_t>(pool.entries[i].first)];
    scores[i] = cross_score(model, cs, rec.tokens);
  }
  std::vector<std::size_t> idx(pool.entries.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  CandidatePool out;
  out.concept_set_id = pool.concept_set_id;
  out.entries.reserve(pool.entries.size());
  for (std::size_t i : idx) {
    out.entries.emplace_back(pool.entries[i].first, scores[i]);
  }
  return out;
}

namespace {

nlohmann::json config_to_json(const TrainingConfig& cfg) {
  return {{"learning_rate", cfg.learning_rate},
          {"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"patience", cfg.patience},
          {"seed", cfg.seed},
          {"k_retrieve", cfg.k_retrieve},
          {"pool_size", cfg.pool_size},
          {"top_k_export", cfg.top_k_export},
          {"distill_metric", metric_name(cfg.distill_metric)},
          {"embed_dim", cfg.embed_dim},
          {"out_dim", cfg.out_dim},
          {"hidden_dim", cfg.hidden_dim}};
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const nlohmann::json& arr) {
  Vector v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

nlohmann::json vocab_to_json(const Vocabulary& vocab) {
  nlohmann::json obj = nlohmann::json::object();
  for (const auto& [token, id] : vocab.table()) obj[token] = id;
  return obj;
}

Vocabulary vocab_from_json(const nlohmann::json& obj) {
  std::unordered_map<std::string, int> table;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    table[it.key()] = it.value().get<int>();
  }
  Vocabulary vocab;
  vocab.set_table(std::move(table));
  return vocab;
}

void write_json(const nlohmann::json& obj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << obj.dump() << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  nlohmann::json obj;
  in >> obj;
  return obj;
}

}  // namespace

void save_dual_encoder(const DualEncoderModel& model, const TrainingConfig& cfg,
                       const std::string& path) {
  nlohmann::json obj;
  obj["kind"] = "dual_encoder";
  obj["config"] = config_to_json(cfg);
  obj["vocab"] = vocab_to_json(model.vocab);
  obj["embed_dim"] = model.concept_encoder.embed_dim;
  obj["out_dim"] = model.concept_encoder.out_dim;
  obj["concept_theta"] = vector_to_json(model.concept_encoder.theta);
  obj["sentence_theta"] = vector_to_json(model.sentence_encoder.theta);
  write_json(obj, path);
}

DualEncoderModel load_dual_encoder(const std::string& path) {
  const nlohmann::json obj = read_json(path);
  if (obj.value("kind", "") != "dual_encoder") {
    throw std::runtime_error("not a dual encoder checkpoint: " + path);
  }
  DualEncoderModel model;
  model.vocab = vocab_from_json(obj["vocab"]);
  const int embed_dim = obj["embed_dim"].get<int>();
  const int out_dim = obj["out_dim"].get<int>();
  for (auto* enc : {&model.concept_encoder, &model.sentence_encoder}) {
    enc->vocab_size = model.vocab.size();
    enc->embed_dim = embed_dim;
    enc->out_dim = out_dim;
  }
  model.concept_encoder.theta = vector_from_json(obj["concept_theta"]);
  model.sentence_encoder.theta = vector_from_json(obj["sentence_theta"]);
  return model;
}

void save_cross_encoder(const CrossEncoderModel& model,
                        const TrainingConfig& cfg, const std::string& path) {
  nlohmann::json obj;
  obj["kind"] = "cross_encoder";
  obj["config"] = config_to_json(cfg);
  obj["vocab"] = vocab_to_json(model.vocab);
  obj["embed_dim"] = model.embed_dim;
  obj["hidden_dim"] = model.hidden_dim;
  obj["theta"] = vector_to_json(model.theta);
  write_json(obj, path);
}

CrossEncoderModel load_cross_encoder(const std::string& path) {
  const nlohmann::json obj = read_json(path);
  if (obj.value("kind", "") != "cross_encoder") {
    throw std::runtime_error("not a cross encoder checkpoint: " + path);
  }
  CrossEncoderModel model;
  model.vocab = vocab_from_json(obj["vocab"]);
  model.embed_dim = obj["embed_dim"].get<int>();
  model.hidden_dim = obj["hidden_dim"].get<int>();
  model.theta = vector_from_json(obj["theta"]);
  return model;
}

}  // namespace mdr
