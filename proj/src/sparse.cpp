#include "mdr/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace mdr {

namespace {

const char* const kSuffixes[] = {"s", "es", "ed", "d", "ing"};

bool strips_to(const std::string& longer, const std::string& shorter) {
  for (const char* suffix : kSuffixes) {
    const std::size_t len = std::char_traits<char>::length(suffix);
    if (longer.size() == shorter.size() + len &&
        longer.compare(0, shorter.size(), shorter) == 0 &&
        longer.compare(shorter.size(), len, suffix) == 0) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool token_matches_concept(const std::string& token,
                           const std::string& concept_token) {
  return token == concept_token || strips_to(token, concept_token) ||
         strips_to(concept_token, token);
}

TfIdfModel tfidf_build(const Corpus& corpus) {
  if (corpus.size() == 0) throw std::invalid_argument("empty corpus");

  TfIdfModel model;
  std::vector<std::size_t> df;
  std::vector<std::unordered_map<std::size_t, int>> term_counts(corpus.size());

  for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
    for (const auto& token : corpus[doc].tokens) {
      auto [it, inserted] =
          model.vocabulary.emplace(token, model.vocabulary.size());
      if (inserted) df.push_back(0);
      auto& count = term_counts[doc][it->second];
      if (count == 0) ++df[it->second];
      ++count;
    }
  }

  const double n = static_cast<double>(corpus.size());
  model.idf.resize(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) {
    model.idf[t] = std::log(n / static_cast<double>(df[t]));
  }

  model.doc_vectors.resize(corpus.size());
  for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
    auto& vec = model.doc_vectors[doc];
    double norm_sq = 0.0;
    for (const auto& [col, tf] : term_counts[doc]) {
      const double w = tf * model.idf[col];
      if (w == 0.0) continue;
      vec.emplace_back(col, w);
      norm_sq += w * w;
    }
    std::sort(vec.begin(), vec.end());
    if (norm_sq > 0.0) {
      const double inv = 1.0 / std::sqrt(norm_sq);
      for (auto& [col, w] : vec) w *= inv;
    }
  }
  return model;
}

HardNegativePool tfidf_retrieve(const TfIdfModel& model,
                                const ConceptSet& concept_set, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  std::unordered_map<std::size_t, double> query;
  for (const auto& concept_token : concept_set.concepts) {
    auto it = model.vocabulary.find(concept_token);
    if (it != model.vocabulary.end()) query[it->second] += model.idf[it->second];
  }
  double norm_sq = 0.0;
  for (const auto& [col, w] : query) norm_sq += w * w;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [col, w] : query) w *= inv;
  }

  const std::size_t n = model.doc_vectors.size();
  std::vector<double> scores(n, 0.0);
  for (std::size_t doc = 0; doc < n; ++doc) {
    double s = 0.0;
    for (const auto& [col, w] : model.doc_vectors[doc]) {
      auto it = query.find(col);
      if (it != query.end()) s += w * it->second;
    }
    scores[doc] = s;
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  HardNegativePool pool;
  const std::size_t take = std::min(k, n);
  pool.sentence_ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    pool.sentence_ids.push_back(static_cast<std::int64_t>(idx[i]));
  }
  return pool;
}

HardNegativePool concept_match_retrieve(const Corpus& corpus,
                                        const ConceptSet& concept_set,
                                        std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");

  const std::size_t n = corpus.size();
  std::vector<int> counts(n, 0);
  for (std::size_t doc = 0; doc < n; ++doc) {
    for (const auto& concept_token : concept_set.concepts) {
      for (const auto& token : corpus[doc].tokens) {
        if (token_matches_concept(token, concept_token)) {
          ++counts[doc];
          break;
        }
      }
    }
  }

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    return corpus[a].tokens.size() < corpus[b].tokens.size();
  });

  HardNegativePool pool;
  const std::size_t take = std::min(k, n);
  pool.sentence_ids.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    pool.sentence_ids.push_back(static_cast<std::int64_t>(idx[i]));
  }
  return pool;
}

std::int64_t sample_hard_negative(const HardNegativePool& pool,
                                  const Corpus& corpus,
                                  const std::string& positive_raw, Rng& rng) {
  if (pool.sentence_ids.empty()) throw std::invalid_argument("empty pool");
  const std::string positive = lowercase_copy(positive_raw);
  std::vector<std::int64_t> eligible;
  eligible.reserve(pool.sentence_ids.size());
  for (std::int64_t id : pool.sentence_ids) {
    if (lowercase_copy(corpus[static_cast<std::size_t>(id)].raw) != positive) {
      eligible.push_back(id);
    }
  }
  if (eligible.empty()) {
    throw std::runtime_error("pool contains only the positive sentence");
  }
  return eligible[rng.next_index(eligible.size())];
}

void save_pools_jsonl(const std::vector<HardNegativePool>& pools,
                      const std::string& path, const std::string& header) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pool file: " + path);
  if (!header.empty()) out << header << '\n';
  for (const auto& pool : pools) {
    nlohmann::json obj;
    obj["qid"] = pool.concept_set_id;
    obj["ids"] = pool.sentence_ids;
    out << obj.dump() << '\n';
  }
}

std::vector<HardNegativePool> load_pools_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool file: " + path);
  std::vector<HardNegativePool> pools;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(line);
    if (!obj.contains("qid")) continue;  // header line
    HardNegativePool pool;
    pool.concept_set_id = obj["qid"].get<std::int64_t>();
    pool.sentence_ids = obj["ids"].get<std::vector<std::int64_t>>();
    pools.push_back(std::move(pool));
  }
  return pools;
}

}  // namespace mdr
