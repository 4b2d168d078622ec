#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

namespace mdr {

using TokenSeq = std::vector<std::string>;

struct SentenceRecord {
  std::int64_t id = 0;  // position in corpus
  std::string raw;
  TokenSeq tokens;
};

struct Corpus {
  std::vector<SentenceRecord> records;

  std::size_t size() const { return records.size(); }
  const SentenceRecord& operator[](std::size_t i) const { return records[i]; }
};

struct ConceptSet {
  TokenSeq concepts;  // sorted, deduplicated, lowercase

  std::size_t count() const { return concepts.size(); }
};

struct DatasetExample {
  ConceptSet concept_set;
  std::vector<TokenSeq> references;
  std::vector<std::string> raw_references;
};

// Lowercase, whitespace-split, strip leading/trailing punctuation per token,
// keep internal apostrophes. Tokens that strip to nothing are dropped.
TokenSeq tokenize(const std::string& text);

// Keeps sentences with 4..20 tokens (inclusive) whose raw text is not in
// the exclusion set (compared case-insensitively). Ids assigned 0..n-1 in
// input order.
Corpus filter_corpus(const std::vector<std::string>& raw_sentences,
                     const std::unordered_set<std::string>& exclusion_set);

// One raw sentence per line, UTF-8.
std::vector<std::string> read_sentence_file(const std::string& path);

// JSONL, one object per line: {"concepts": [...], "references": [...]}.
// Throws std::runtime_error naming the offending line on malformed input.
std::vector<DatasetExample> load_dataset(const std::string& path);

ConceptSet make_concept_set(const std::vector<std::string>& concepts);

std::string lowercase_copy(const std::string& s);
std::string join_tokens(const TokenSeq& tokens);

}  // namespace mdr
