#pragma once

#include <string>
#include <vector>

#include "mdr/corpus.hpp"

namespace mdr {

enum class Metric { kBleu3, kBleu4, kRouge2, kRougeL };

Metric metric_from_string(const std::string& name);
std::string metric_name(Metric m);

// Permutation of candidate indices, descending by score, ties by ascending
// original index. scores is parallel to the candidate list.
struct QualityOrdering {
  std::vector<std::size_t> order;
  std::vector<double> scores;
};

// Sentence BLEU: clipped modified n-gram precisions up to max_n, geometric
// mean, brevity penalty exp(1 - r/c) for c < r with r the reference length
// closest to c (ties -> shorter). Zero precisions for n >= 2 are smoothed
// to 1/(2c); a zero unigram precision forces score 0.
double bleu_sentence(const TokenSeq& candidate,
                     const std::vector<TokenSeq>& references, int max_n);

// Bigram-overlap F1 against each reference, max over references.
double rouge2(const TokenSeq& candidate,
              const std::vector<TokenSeq>& references);

// LCS-based F1 against each reference, max over references.
double rouge_l(const TokenSeq& candidate,
               const std::vector<TokenSeq>& references);

double metric_score(Metric m, const TokenSeq& candidate,
                    const std::vector<TokenSeq>& references);

QualityOrdering quality_order(const std::vector<TokenSeq>& candidates,
                              const std::vector<TokenSeq>& references,
                              Metric metric);

// Builds the descending-by-score ordering for precomputed scores.
QualityOrdering ordering_from_scores(const std::vector<double>& scores);

// (concordant - discordant) / (N(N-1)/2) over all index pairs.
double kendall_tau(const std::vector<std::size_t>& order_a,
                   const std::vector<std::size_t>& order_b);

}  // namespace mdr
