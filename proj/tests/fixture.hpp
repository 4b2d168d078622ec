#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdr/corpus.hpp"

namespace mdr::testing {

// Synthetic retrieval world: concept tokens are drawn from w0..w149, filler
// from w150..w499. Each example gets two references built from its concepts
// plus filler, and the corpus holds graded near-matches for every example
// (same concepts and order, fewer concepts, filler-only) plus background
// noise. References never appear in the corpus.
struct Fixture {
  Corpus corpus;
  std::vector<std::string> corpus_raw;  // pre-filter lines, reference-free
  std::vector<DatasetExample> train;
  std::vector<DatasetExample> heldout;
};

// concept_vocab controls how many tokens can serve as concepts; fewer means
// each concept recurs across more examples, which eases generalization to
// held-out concept combinations.
Fixture make_fixture(std::uint64_t seed = 7, std::size_t n_examples = 200,
                     std::size_t n_background = 800,
                     std::size_t heldout_count = 40,
                     std::size_t concept_vocab = 150);

struct FixtureFiles {
  std::string corpus_path;
  std::string train_path;
  std::string valid_path;
};

// Writes the corpus (one sentence per line) and both dataset splits as JSONL
// under dir, creating it if needed.
FixtureFiles write_fixture_files(const Fixture& fixture,
                                 const std::string& dir);

}  // namespace mdr::testing
