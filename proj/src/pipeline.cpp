#include "mdr/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mdr {

namespace fs = std::filesystem;

namespace {

nlohmann::json config_to_json(const PipelineConfig& c) {
  return {{"corpus", c.corpus_path},
          {"dataset_train", c.dataset_train},
          {"dataset_valid", c.dataset_valid},
          {"output_dir", c.output_dir},
          {"hard_negative_source",
           c.hard_negative_source == HardNegativeSource::kConceptMatch
               ? "concept_match"
               : "tfidf"},
          {"learning_rate", c.training.learning_rate},
          {"batch_size", c.training.batch_size},
          {"epochs", c.training.epochs},
          {"patience", c.training.patience},
          {"seed", c.training.seed},
          {"k_retrieve", c.training.k_retrieve},
          {"pool_size", c.training.pool_size},
          {"top_k_export", c.training.top_k_export},
          {"distill_metric", metric_name(c.training.distill_metric)},
          {"embed_dim", c.training.embed_dim},
          {"out_dim", c.training.out_dim},
          {"hidden_dim", c.training.hidden_dim}};
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::kPools: return "pools";
    case Stage::kWarmup: return "warmup";
    case Stage::kRetrieve: return "retrieve";
    case Stage::kTrainRanker: return "train-ranker";
    case Stage::kRerank: return "rerank";
    case Stage::kDistill: return "distill";
    case Stage::kRetrieveDistilled: return "retrieve-distilled";
    case Stage::kExport: return "export";
    case Stage::kEval: return "eval";
  }
  return "?";
}

void require_artifact(const std::string& path, Stage stage) {
  if (!fs::exists(path)) {
    throw std::runtime_error("stage " + stage_name(stage) +
                             ": missing upstream artifact " + path);
  }
}

std::vector<HardNegativePool> to_id_pools(
    const std::vector<CandidatePool>& pools) {
  std::vector<HardNegativePool> out;
  out.reserve(pools.size());
  for (const auto& p : pools) {
    HardNegativePool hp;
    hp.concept_set_id = p.concept_set_id;
    for (const auto& [id, score] : p.entries) hp.sentence_ids.push_back(id);
    out.push_back(std::move(hp));
  }
  return out;
}

nlohmann::json report_to_json(const EvalReport& r) {
  return {{"mean_top1", r.mean_top1},
          {"mean_topk", r.mean_topk},
          {"mean_tau", r.mean_tau},
          {"recall_at_1", r.recall_at_1}};
}

struct PipelinePaths {
  std::string hn_train, hn_valid;
  std::string retriever0, ranker0, retriever1;
  std::string index0_vectors, index0_ids, index1_vectors, index1_ids;
  std::string p0_train, p0_valid;
  std::string p0r_train, p0r_valid;
  std::string p1_train, p1_valid;
  std::string export_ranker, export_retriever;
  std::string eval_report;

  explicit PipelinePaths(const std::string& dir) {
    const auto in = [&](const char* name) { return dir + "/" + name; };
    hn_train = in("hn_pools_train.jsonl");
    hn_valid = in("hn_pools_valid.jsonl");
    retriever0 = in("retriever0.json");
    ranker0 = in("ranker0.json");
    retriever1 = in("retriever1.json");
    index0_vectors = in("index_retriever0.bin");
    index0_ids = in("index_retriever0_ids.jsonl");
    index1_vectors = in("index_retriever1.bin");
    index1_ids = in("index_retriever1_ids.jsonl");
    p0_train = in("p0_train.jsonl");
    p0_valid = in("p0_valid.jsonl");
    p0r_train = in("p0_reranked_train.jsonl");
    p0r_valid = in("p0_reranked_valid.jsonl");
    p1_train = in("p1_train.jsonl");
    p1_valid = in("p1_valid.jsonl");
    export_ranker = in("generator_ranker.tsv");
    export_retriever = in("generator_retriever.tsv");
    eval_report = in("eval_report.json");
  }
};

std::vector<HardNegativePool> build_hard_negative_pools(
    const PipelineConfig& config, const Corpus& corpus,
    const std::vector<DatasetExample>& dataset, const TfIdfModel* tfidf) {
  std::vector<HardNegativePool> pools;
  pools.reserve(dataset.size());
  const std::size_t k = static_cast<std::size_t>(config.training.k_retrieve);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    HardNegativePool pool =
        config.hard_negative_source == HardNegativeSource::kConceptMatch
            ? concept_match_retrieve(corpus, dataset[i].concept_set, k)
            : tfidf_retrieve(*tfidf, dataset[i].concept_set, k);
    pool.concept_set_id = static_cast<std::int64_t>(i);
    pools.push_back(std::move(pool));
  }
  return pools;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json obj;
  in >> obj;

  PipelineConfig c;
  c.corpus_path = obj.value("corpus", "");
  c.dataset_train = obj.value("dataset_train", "");
  c.dataset_valid = obj.value("dataset_valid", "");
  c.output_dir = obj.value("output_dir", "out");
  const std::string source = obj.value("hard_negative_source", "concept_match");
  if (source == "concept_match") {
    c.hard_negative_source = HardNegativeSource::kConceptMatch;
  } else if (source == "tfidf") {
    c.hard_negative_source = HardNegativeSource::kTfIdf;
  } else {
    throw std::runtime_error("unknown hard_negative_source: " + source);
  }
  auto& t = c.training;
  t.learning_rate = obj.value("learning_rate", t.learning_rate);
  t.batch_size = obj.value("batch_size", t.batch_size);
  t.epochs = obj.value("epochs", t.epochs);
  t.patience = obj.value("patience", t.patience);
  t.seed = obj.value("seed", t.seed);
  t.k_retrieve = obj.value("k_retrieve", t.k_retrieve);
  t.pool_size = obj.value("pool_size", t.pool_size);
  t.top_k_export = obj.value("top_k_export", t.top_k_export);
  if (obj.contains("distill_metric")) {
    t.distill_metric = metric_from_string(obj["distill_metric"].get<std::string>());
  }
  t.embed_dim = obj.value("embed_dim", t.embed_dim);
  t.out_dim = obj.value("out_dim", t.out_dim);
  t.hidden_dim = obj.value("hidden_dim", t.hidden_dim);
  return c;
}

std::string config_hash(const PipelineConfig& config) {
  const std::string dump = config_to_json(config).dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << hash;
  return out.str();
}

std::string artifact_header(const PipelineConfig& config) {
  nlohmann::json header;
  header["config_hash"] = config_hash(config);
  header["seed"] = config.training.seed;
  return header.dump();
}

EvalReport evaluate_pools(const std::vector<CandidatePool>& pools,
                          const std::vector<DatasetExample>& dataset,
                          const Corpus& corpus, Metric metric, int k) {
  if (pools.size() != dataset.size()) {
    throw std::invalid_argument("pools not aligned with dataset");
  }
  if (pools.empty()) throw std::invalid_argument("no pools");

  EvalReport report;
  double tau_sum = 0.0;
  std::size_t tau_count = 0;
  for (std::size_t i = 0; i < pools.size(); ++i) {
    const auto& pool = pools[i];
    const auto& refs = dataset[i].references;
    if (pool.entries.empty()) throw std::invalid_argument("empty pool");

    std::vector<TokenSeq> candidates;
    candidates.reserve(pool.entries.size());
    for (const auto& [id, score] : pool.entries) {
      candidates.push_back(corpus[static_cast<std::size_t>(id)].tokens);
    }

    report.mean_top1 += metric_score(metric, candidates[0], refs);

    const std::size_t topk =
        std::min<std::size_t>(static_cast<std::size_t>(k), candidates.size());
    double topk_sum = 0.0;
    for (std::size_t j = 0; j < topk; ++j) {
      topk_sum += metric_score(metric, candidates[j], refs);
    }
    report.mean_topk += topk_sum / static_cast<double>(topk);

    const QualityOrdering ordering = quality_order(candidates, refs, metric);
    if (candidates.size() >= 2) {
      std::vector<std::size_t> pool_order(candidates.size());
      for (std::size_t j = 0; j < pool_order.size(); ++j) pool_order[j] = j;
      tau_sum += kendall_tau(pool_order, ordering.order);
      ++tau_count;
    }
    if (ordering.order[0] == 0) report.recall_at_1 += 1.0;
  }
  const double n = static_cast<double>(pools.size());
  report.mean_top1 /= n;
  report.mean_topk /= n;
  report.recall_at_1 /= n;
  report.mean_tau = tau_count ? tau_sum / static_cast<double>(tau_count) : 0.0;
  return report;
}

void export_generator_file(const std::vector<CandidatePool>& pools,
                           const std::vector<DatasetExample>& dataset,
                           const Corpus& corpus, int k,
                           const std::string& path) {
  if (pools.size() != dataset.size()) {
    throw std::invalid_argument("pools not aligned with dataset");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write export file: " + path);

  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& pool = pools[i];
    if (static_cast<int>(pool.entries.size()) < k) {
      throw std::runtime_error("pool " + std::to_string(i) +
                               " smaller than k=" + std::to_string(k));
    }
    std::string source = "<S>";
    for (const auto& c : dataset[i].concept_set.concepts) source += " " + c;
    source += " </S>";
    for (int j = 0; j < k; ++j) {
      const auto& rec =
          corpus[static_cast<std::size_t>(pool.entries[j].first)];
      source += " <S> " + rec.raw + " </S>";
    }
    for (const auto& raw_ref : dataset[i].raw_references) {
      out << source << '\t' << "<S> " << raw_ref << " </S>" << '\n';
    }
  }
}

std::vector<GeneratorLine> parse_generator_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open export file: " + path);

  const auto parse_segments = [](const std::string& text) {
    std::vector<std::string> segments;
    std::size_t pos = 0;
    while (true) {
      const std::size_t open = text.find("<S> ", pos);
      if (open == std::string::npos) break;
      const std::size_t close = text.find(" </S>", open);
      if (close == std::string::npos) {
        throw std::runtime_error("unterminated segment in export file");
      }
      segments.push_back(text.substr(open + 4, close - open - 4));
      pos = close + 5;
    }
    return segments;
  };

  std::vector<GeneratorLine> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("export line missing tab separator");
    }
    GeneratorLine gl;
    gl.source_segments = parse_segments(line.substr(0, tab));
    const auto target_segments = parse_segments(line.substr(tab + 1));
    if (target_segments.size() != 1) {
      throw std::runtime_error("export target must be one segment");
    }
    gl.target = target_segments[0];
    lines.push_back(std::move(gl));
  }
  return lines;
}

FlatIPIndex build_corpus_index(const DualEncoderModel& model,
                               const Corpus& corpus) {
  Matrix vectors(corpus.size(), model.sentence_encoder.out_dim);
  std::vector<std::int64_t> ids(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    vectors.row(i) = model.encode_sentence(corpus[i].tokens).transpose();
    ids[i] = corpus[i].id;
  }
  return FlatIPIndex::build(vectors, ids);
}

std::vector<CandidatePool> retrieve_pools(const DualEncoderModel& model,
                                          const FlatIPIndex& index,
                                          const std::vector<DatasetExample>& ds,
                                          int k) {
  std::vector<CandidatePool> pools;
  pools.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Vector query = model.encode_concepts(ds[i].concept_set);
    CandidatePool pool;
    pool.concept_set_id = static_cast<std::int64_t>(i);
    for (const auto& hit : index.search(query, static_cast<std::size_t>(k))) {
      pool.entries.emplace_back(hit.id, hit.score);
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

void run_pipeline(const PipelineConfig& config, const std::set<Stage>& stages) {
  fs::create_directories(config.output_dir);
  const PipelinePaths paths(config.output_dir);
  const std::string header = artifact_header(config);

  const std::vector<DatasetExample> train = load_dataset(config.dataset_train);
  const std::vector<DatasetExample> valid =
      config.dataset_valid.empty() ? train : load_dataset(config.dataset_valid);

  std::unordered_set<std::string> exclusion;
  for (const auto* ds : {&train, &valid}) {
    for (const auto& ex : *ds) {
      for (const auto& raw : ex.raw_references) exclusion.insert(raw);
    }
  }
  const Corpus corpus =
      filter_corpus(read_sentence_file(config.corpus_path), exclusion);
  const Metric metric = config.training.distill_metric;

  if (stages.count(Stage::kPools)) {
    TfIdfModel tfidf;
    if (config.hard_negative_source == HardNegativeSource::kTfIdf) {
      tfidf = tfidf_build(corpus);
    }
    save_pools_jsonl(build_hard_negative_pools(config, corpus, train, &tfidf),
                     paths.hn_train, header);
    save_pools_jsonl(build_hard_negative_pools(config, corpus, valid, &tfidf),
                     paths.hn_valid, header);
  }

  if (stages.count(Stage::kWarmup)) {
    require_artifact(paths.hn_train, Stage::kWarmup);
    require_artifact(paths.hn_valid, Stage::kWarmup);
    const auto hn_train = load_pools_jsonl(paths.hn_train);
    const auto hn_valid = load_pools_jsonl(paths.hn_valid);
    const auto val_items =
        warmup_eval_items(valid, hn_valid, corpus, config.training);
    const DualEncoderModel retriever0 =
        warmup_retriever(train, corpus, hn_train, val_items, config.training);
    save_dual_encoder(retriever0, config.training, paths.retriever0);
  }

  if (stages.count(Stage::kRetrieve)) {
    require_artifact(paths.retriever0, Stage::kRetrieve);
    const DualEncoderModel retriever0 = load_dual_encoder(paths.retriever0);
    const FlatIPIndex index = build_corpus_index(retriever0, corpus);
    index.save(paths.index0_vectors, paths.index0_ids);
    save_candidate_pools(
        retrieve_pools(retriever0, index, train, config.training.k_retrieve),
        paths.p0_train, header);
    save_candidate_pools(
        retrieve_pools(retriever0, index, valid, config.training.k_retrieve),
        paths.p0_valid, header);
  }

  if (stages.count(Stage::kTrainRanker)) {
    require_artifact(paths.p0_train, Stage::kTrainRanker);
    require_artifact(paths.p0_valid, Stage::kTrainRanker);
    const auto p0_train = to_id_pools(load_candidate_pools(paths.p0_train));
    const auto p0_valid = to_id_pools(load_candidate_pools(paths.p0_valid));
    const auto val_items =
        metric_eval_items(valid, p0_valid, corpus, metric, config.training);
    const CrossEncoderModel ranker0 = train_ranker(
        train, corpus, p0_train, val_items, metric, config.training);
    save_cross_encoder(ranker0, config.training, paths.ranker0);
  }

  if (stages.count(Stage::kRerank)) {
    require_artifact(paths.ranker0, Stage::kRerank);
    require_artifact(paths.p0_train, Stage::kRerank);
    require_artifact(paths.p0_valid, Stage::kRerank);
    const CrossEncoderModel ranker0 = load_cross_encoder(paths.ranker0);
    const auto do_rerank = [&](const std::vector<DatasetExample>& ds,
                               const std::string& in_path,
                               const std::string& out_path) {
      const auto pools = load_candidate_pools(in_path);
      std::vector<CandidatePool> reranked;
      reranked.reserve(pools.size());
      for (std::size_t i = 0; i < pools.size(); ++i) {
        reranked.push_back(
            rerank(ranker0, ds[i].concept_set, pools[i], corpus));
      }
      save_candidate_pools(reranked, out_path, header);
    };
    do_rerank(train, paths.p0_train, paths.p0r_train);
    do_rerank(valid, paths.p0_valid, paths.p0r_valid);
  }

  if (stages.count(Stage::kDistill)) {
    require_artifact(paths.retriever0, Stage::kDistill);
    require_artifact(paths.ranker0, Stage::kDistill);
    require_artifact(paths.hn_train, Stage::kDistill);
    require_artifact(paths.p0_valid, Stage::kDistill);
    const DualEncoderModel retriever0 = load_dual_encoder(paths.retriever0);
    const CrossEncoderModel ranker0 = load_cross_encoder(paths.ranker0);
    // Hard negatives come from the same pool as the warm-up stage.
    const auto hn_train = load_pools_jsonl(paths.hn_train);
    const auto p0_valid = to_id_pools(load_candidate_pools(paths.p0_valid));
    const auto val_items =
        metric_eval_items(valid, p0_valid, corpus, metric, config.training);
    const DualEncoderModel retriever1 = distill_retriever(
        retriever0, ranker0, train, corpus, hn_train, val_items,
        config.training);
    save_dual_encoder(retriever1, config.training, paths.retriever1);
  }

  if (stages.count(Stage::kRetrieveDistilled)) {
    require_artifact(paths.retriever1, Stage::kRetrieveDistilled);
    const DualEncoderModel retriever1 = load_dual_encoder(paths.retriever1);
    const FlatIPIndex index = build_corpus_index(retriever1, corpus);
    index.save(paths.index1_vectors, paths.index1_ids);
    save_candidate_pools(
        retrieve_pools(retriever1, index, train, config.training.k_retrieve),
        paths.p1_train, header);
    save_candidate_pools(
        retrieve_pools(retriever1, index, valid, config.training.k_retrieve),
        paths.p1_valid, header);
  }

  if (stages.count(Stage::kExport)) {
    require_artifact(paths.p0r_valid, Stage::kExport);
    require_artifact(paths.p1_valid, Stage::kExport);
    export_generator_file(load_candidate_pools(paths.p0r_valid), valid, corpus,
                          config.training.top_k_export, paths.export_ranker);
    export_generator_file(load_candidate_pools(paths.p1_valid), valid, corpus,
                          config.training.top_k_export, paths.export_retriever);
  }

  if (stages.count(Stage::kEval)) {
    require_artifact(paths.p0_valid, Stage::kEval);
    require_artifact(paths.p0r_valid, Stage::kEval);
    require_artifact(paths.p1_valid, Stage::kEval);
    nlohmann::json report;
    report["config_hash"] = config_hash(config);
    report["seed"] = config.training.seed;
    report["metric"] = metric_name(metric);
    const int k = config.training.top_k_export;
    report["retriever0"] = report_to_json(evaluate_pools(
        load_candidate_pools(paths.p0_valid), valid, corpus, metric, k));
    report["ranker0_reranked"] = report_to_json(evaluate_pools(
        load_candidate_pools(paths.p0r_valid), valid, corpus, metric, k));
    report["retriever1"] = report_to_json(evaluate_pools(
        load_candidate_pools(paths.p1_valid), valid, corpus, metric, k));
    std::ofstream out(paths.eval_report);
    out << report.dump(2) << '\n';
  }
}

std::string ablation_hard_negatives(const PipelineConfig& config) {
  fs::create_directories(config.output_dir);

  const std::vector<DatasetExample> train = load_dataset(config.dataset_train);
  const std::vector<DatasetExample> valid =
      config.dataset_valid.empty() ? train : load_dataset(config.dataset_valid);
  std::unordered_set<std::string> exclusion;
  for (const auto* ds : {&train, &valid}) {
    for (const auto& ex : *ds) {
      for (const auto& raw : ex.raw_references) exclusion.insert(raw);
    }
  }
  const Corpus corpus =
      filter_corpus(read_sentence_file(config.corpus_path), exclusion);

  nlohmann::json report;
  for (const auto source :
       {HardNegativeSource::kConceptMatch, HardNegativeSource::kTfIdf}) {
    PipelineConfig variant = config;
    variant.hard_negative_source = source;
    TfIdfModel tfidf;
    if (source == HardNegativeSource::kTfIdf) tfidf = tfidf_build(corpus);

    const auto hn_train =
        build_hard_negative_pools(variant, corpus, train, &tfidf);
    const auto hn_valid =
        build_hard_negative_pools(variant, corpus, valid, &tfidf);
    const auto val_items =
        warmup_eval_items(valid, hn_valid, corpus, variant.training);
    const DualEncoderModel retriever =
        warmup_retriever(train, corpus, hn_train, val_items, variant.training);
    const FlatIPIndex index = build_corpus_index(retriever, corpus);
    const auto p0 = retrieve_pools(retriever, index, valid,
                                   variant.training.k_retrieve);
    const EvalReport eval =
        evaluate_pools(p0, valid, corpus, variant.training.distill_metric,
                       variant.training.top_k_export);
    const char* row =
        source == HardNegativeSource::kConceptMatch ? "concept_match" : "tfidf";
    report[row] = report_to_json(eval);
  }

  const std::string text = report.dump(2);
  std::ofstream out(config.output_dir + "/ablation_hard_negatives.json");
  out << text << '\n';
  return text;
}

}  // namespace mdr
