#include "fixture.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "mdr/rng.hpp"

namespace mdr::testing {

namespace {

constexpr std::size_t kFillerStart = 150;
constexpr std::size_t kStopwords = 30;
constexpr std::size_t kVocab = 500;

std::string word(std::size_t i) { return "w" + std::to_string(i); }

// References and graded candidates pad with a small shared stopword pool so
// filler tokens carry no example-specific signal; backgrounds roam the whole
// filler range to keep the vocabulary broad.
std::string filler(Rng& rng) {
  return word(kFillerStart + rng.next_index(kStopwords));
}

std::string background_filler(Rng& rng) {
  return word(kFillerStart + rng.next_index(kVocab - kFillerStart));
}

// Concepts in a fixed order followed by filler padding. Keeping the concepts
// adjacent and in a shared order gives candidates with more concepts strictly
// more matching n-grams, so the grades are monotone under every metric.
TokenSeq compose(const TokenSeq& concepts, Rng& rng, std::size_t target_len) {
  TokenSeq out = concepts;
  while (out.size() < target_len) out.push_back(filler(rng));
  return out;
}

TokenSeq background_sentence(Rng& rng) {
  TokenSeq out;
  const std::size_t n = 5 + rng.next_index(8);
  for (std::size_t i = 0; i < n; ++i) out.push_back(background_filler(rng));
  return out;
}

}  // namespace

Fixture make_fixture(std::uint64_t seed, std::size_t n_examples,
                     std::size_t n_background, std::size_t heldout_count,
                     std::size_t concept_vocab) {
  Rng rng(seed);
  Fixture fixture;
  std::vector<DatasetExample> examples;
  std::unordered_set<std::string> seen;

  for (std::size_t e = 0; e < n_examples; ++e) {
    const std::size_t m = 3 + rng.next_index(3);
    TokenSeq concepts;
    std::unordered_set<std::size_t> used;
    while (concepts.size() < m) {
      const std::size_t c = rng.next_index(concept_vocab);
      if (used.insert(c).second) concepts.push_back(word(c));
    }

    DatasetExample example;
    example.concept_set = make_concept_set(concepts);
    for (int r = 0; r < 2; ++r) {
      TokenSeq ref = compose(concepts, rng, 2 * m + 2);
      example.references.push_back(ref);
      example.raw_references.push_back(join_tokens(ref));
    }
    seen.insert(example.raw_references.begin(), example.raw_references.end());

    // graded candidates, best to worst
    std::vector<TokenSeq> graded;
    TokenSeq near = example.references[0];
    for (std::size_t i = near.size(); i-- > 0;) {
      if (std::find(concepts.begin(), concepts.end(), near[i]) ==
          concepts.end()) {
        near[i] = filler(rng);
        break;
      }
    }
    graded.push_back(near);
    graded.push_back(compose(concepts, rng, 2 * m + 2));
    // lengths differ per grade so equal match counts cannot tie exactly
    TokenSeq fewer(concepts.begin(), concepts.end() - 1);
    graded.push_back(compose(fewer, rng, 2 * m + 1));
    graded.push_back(compose({concepts[0], concepts[1]}, rng, 2 * m));
    graded.push_back(compose({concepts[0]}, rng, 2 * m - 1));
    graded.push_back(background_sentence(rng));

    for (const TokenSeq& cand : graded) {
      const std::string raw = join_tokens(cand);
      if (seen.insert(raw).second) fixture.corpus_raw.push_back(raw);
    }
    examples.push_back(std::move(example));
  }

  for (std::size_t i = 0; i < n_background; ++i) {
    const std::string raw = join_tokens(background_sentence(rng));
    if (seen.insert(raw).second) fixture.corpus_raw.push_back(raw);
  }

  std::unordered_set<std::string> exclusion;
  for (const auto& ex : examples) {
    exclusion.insert(ex.raw_references.begin(), ex.raw_references.end());
  }
  fixture.corpus = filter_corpus(fixture.corpus_raw, exclusion);

  heldout_count = std::min(heldout_count, examples.size());
  fixture.heldout.assign(examples.end() - heldout_count, examples.end());
  fixture.train.assign(examples.begin(), examples.end() - heldout_count);
  return fixture;
}

FixtureFiles write_fixture_files(const Fixture& fixture,
                                 const std::string& dir) {
  std::filesystem::create_directories(dir);
  FixtureFiles files;
  files.corpus_path = dir + "/corpus.txt";
  files.train_path = dir + "/train.jsonl";
  files.valid_path = dir + "/valid.jsonl";

  std::ofstream corpus_out(files.corpus_path);
  for (const auto& line : fixture.corpus_raw) corpus_out << line << "\n";

  const auto write_split = [](const std::vector<DatasetExample>& split,
                              const std::string& path) {
    std::ofstream out(path);
    for (const auto& ex : split) {
      nlohmann::json obj;
      obj["concepts"] = ex.concept_set.concepts;
      obj["references"] = ex.raw_references;
      out << obj.dump() << "\n";
    }
  };
  write_split(fixture.train, files.train_path);
  write_split(fixture.heldout, files.valid_path);
  return files;
}

}  // namespace mdr::testing
