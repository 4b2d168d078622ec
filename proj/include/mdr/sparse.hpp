#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdr/corpus.hpp"
#include "mdr/rng.hpp"

namespace mdr {

struct HardNegativePool {
  std::int64_t concept_set_id = 0;
  std::vector<std::int64_t> sentence_ids;  // descending by score, no dups
};

struct TfIdfModel {
  std::unordered_map<std::string, std::size_t> vocabulary;
  std::vector<double> idf;  // ln(N / df), per vocabulary column
  // One L2-normalized sparse vector per sentence: (column, weight) pairs.
  std::vector<std::vector<std::pair<std::size_t, double>>> doc_vectors;
};

// tf = raw term count, weight = tf * idf, document vectors L2-normalized.
TfIdfModel tfidf_build(const Corpus& corpus);

// Cosine scores between the idf-weighted query vector and document vectors;
// top-K by descending score, ties by ascending sentence id.
HardNegativePool tfidf_retrieve(const TfIdfModel& model,
                                const ConceptSet& concept_set, std::size_t k);

// Sort sentences by the number of matched concepts descending, ties by
// ascending token count then ascending id. A token matches a concept if
// equal, or equal after stripping one inflection suffix
// {s, es, ed, d, ing} from either side.
HardNegativePool concept_match_retrieve(const Corpus& corpus,
                                        const ConceptSet& concept_set,
                                        std::size_t k);

bool token_matches_concept(const std::string& token,
                           const std::string& concept_token);

// Uniform sample over pool entries whose raw text differs from positive_raw
// (case-insensitive). Throws if every entry matches the positive.
std::int64_t sample_hard_negative(const HardNegativePool& pool,
                                  const Corpus& corpus,
                                  const std::string& positive_raw, Rng& rng);

void save_pools_jsonl(const std::vector<HardNegativePool>& pools,
                      const std::string& path, const std::string& header);
std::vector<HardNegativePool> load_pools_jsonl(const std::string& path);

}  // namespace mdr
