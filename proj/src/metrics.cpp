#include "mdr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace mdr {

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const TokenSeq& tokens, int n) {
  NgramCounts counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int j = 1; j < n; ++j) {
      key += '\x1f';
      key += tokens[i + j];
    }
    ++counts[key];
  }
  return counts;
}

void require_nonempty(const TokenSeq& candidate,
                      const std::vector<TokenSeq>& references) {
  if (candidate.empty()) throw std::invalid_argument("empty candidate");
  if (references.empty()) throw std::invalid_argument("empty reference list");
  for (const auto& r : references) {
    if (r.empty()) throw std::invalid_argument("empty reference");
  }
}

double f1(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::size_t> prev(m + 1, 0), cur(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

}  // namespace

Metric metric_from_string(const std::string& name) {
  if (name == "bleu3") return Metric::kBleu3;
  if (name == "bleu4") return Metric::kBleu4;
  if (name == "rouge2") return Metric::kRouge2;
  if (name == "rougeL" || name == "rougel") return Metric::kRougeL;
  throw std::invalid_argument("unknown metric: " + name);
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::kBleu3: return "bleu3";
    case Metric::kBleu4: return "bleu4";
    case Metric::kRouge2: return "rouge2";
    case Metric::kRougeL: return "rougeL";
  }
  std::abort();
}

double bleu_sentence(const TokenSeq& candidate,
                     const std::vector<TokenSeq>& references, int max_n) {
  require_nonempty(candidate, references);
  if (max_n < 1) throw std::invalid_argument("max_n must be >= 1");

  const double c = static_cast<double>(candidate.size());

  // Reference length closest to the candidate length, ties to the shorter.
  std::size_t r = references.front().size();
  for (const auto& ref : references) {
    const double cur = std::abs(static_cast<double>(ref.size()) - c);
    const double best = std::abs(static_cast<double>(r) - c);
    if (cur < best || (cur == best && ref.size() < r)) r = ref.size();
  }

  double log_precision_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const NgramCounts cand_counts = count_ngrams(candidate, n);
    NgramCounts max_ref_counts;
    for (const auto& ref : references) {
      for (const auto& [gram, count] : count_ngrams(ref, n)) {
        auto& slot = max_ref_counts[gram];
        slot = std::max(slot, count);
      }
    }
    int total = 0, clipped = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = max_ref_counts.find(gram);
      if (it != max_ref_counts.end()) clipped += std::min(count, it->second);
    }
    double p = total > 0 ? static_cast<double>(clipped) / total : 0.0;
    if (p == 0.0) {
      if (n == 1) return 0.0;
      p = 1.0 / (2.0 * c);
    }
    log_precision_sum += std::log(p);
  }

  const double bp =
      c < static_cast<double>(r) ? std::exp(1.0 - static_cast<double>(r) / c)
                                 : 1.0;
  return bp * std::exp(log_precision_sum / max_n);
}

double rouge2(const TokenSeq& candidate,
              const std::vector<TokenSeq>& references) {
  require_nonempty(candidate, references);
  if (candidate.size() < 2) return 0.0;
  const NgramCounts cand = count_ngrams(candidate, 2);
  const double cand_total = static_cast<double>(candidate.size() - 1);

  double best = 0.0;
  for (const auto& ref : references) {
    if (ref.size() < 2) continue;
    const NgramCounts refc = count_ngrams(ref, 2);
    int overlap = 0;
    for (const auto& [gram, count] : cand) {
      auto it = refc.find(gram);
      if (it != refc.end()) overlap += std::min(count, it->second);
    }
    const double p = overlap / cand_total;
    const double rec = overlap / static_cast<double>(ref.size() - 1);
    best = std::max(best, f1(p, rec));
  }
  return best;
}

double rouge_l(const TokenSeq& candidate,
               const std::vector<TokenSeq>& references) {
  require_nonempty(candidate, references);
  double best = 0.0;
  for (const auto& ref : references) {
    const double lcs = static_cast<double>(lcs_length(candidate, ref));
    if (lcs == 0.0) continue;
    const double p = lcs / static_cast<double>(candidate.size());
    const double rec = lcs / static_cast<double>(ref.size());
    best = std::max(best, f1(p, rec));
  }
  return best;
}

double metric_score(Metric m, const TokenSeq& candidate,
                    const std::vector<TokenSeq>& references) {
  switch (m) {
    case Metric::kBleu3: return bleu_sentence(candidate, references, 3);
    case Metric::kBleu4: return bleu_sentence(candidate, references, 4);
    case Metric::kRouge2: return rouge2(candidate, references);
    case Metric::kRougeL: return rouge_l(candidate, references);
  }
  std::abort();
}

QualityOrdering ordering_from_scores(const std::vector<double>& scores) {
  QualityOrdering out;
  out.scores = scores;
  out.order.resize(scores.size());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return scores[a] > scores[b];
                   });
  return out;
}

QualityOrdering quality_order(const std::vector<TokenSeq>& candidates,
                              const std::vector<TokenSeq>& references,
                              Metric metric) {
  if (candidates.empty()) throw std::invalid_argument("no candidates");
  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const auto& cand : candidates) {
    scores.push_back(metric_score(metric, cand, references));
  }
  return ordering_from_scores(scores);
}

double kendall_tau(const std::vector<std::size_t>& order_a,
                   const std::vector<std::size_t>& order_b) {
  const std::size_t n = order_a.size();
  if (n != order_b.size()) throw std::invalid_argument("length mismatch");
  if (n < 2) throw std::invalid_argument("need at least two items");

  std::vector<std::size_t> rank_a(n), rank_b(n);
  for (std::size_t pos = 0; pos < n; ++pos) {
    rank_a[order_a[pos]] = pos;
    rank_b[order_b[pos]] = pos;
  }
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool a_less = rank_a[i] < rank_a[j];
      const bool b_less = rank_b[i] < rank_b[j];
      if (a_less == b_less) ++concordant; else ++discordant;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n) * (n - 1);
  return static_cast<double>(concordant - discordant) / pairs;
}

}  // namespace mdr
