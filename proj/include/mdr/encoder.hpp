#pragma once

#include <Eigen/Dense>
#include <string>
#include <unordered_map>
#include <vector>

#include "mdr/corpus.hpp"
#include "mdr/rng.hpp"

namespace mdr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Token -> id map. Id 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  Vocabulary() = default;

  int add(const std::string& token);
  int id(const std::string& token) const;
  std::vector<int> ids(const TokenSeq& tokens) const;
  int size() const { return static_cast<int>(ids_.size()) + 1; }

  const std::unordered_map<std::string, int>& table() const { return ids_; }
  void set_table(std::unordered_map<std::string, int> table) {
    ids_ = std::move(table);
  }

 private:
  std::unordered_map<std::string, int> ids_;
};

Vocabulary build_vocabulary(const Corpus& corpus,
                            const std::vector<DatasetExample>& dataset);

// Mean-pooled token embeddings -> affine projection -> tanh.
// Parameters live in one flat vector: [embedding | projection | bias].
struct EncoderParams {
  int vocab_size = 0;
  int embed_dim = 0;
  int out_dim = 0;
  Vector theta;

  static EncoderParams init(int vocab_size, int embed_dim, int out_dim,
                            Rng& rng, double scale = 0.1);

  Eigen::Index param_count() const {
    return static_cast<Eigen::Index>(vocab_size) * embed_dim +
           static_cast<Eigen::Index>(embed_dim) * out_dim + out_dim;
  }

  Eigen::Map<Matrix> embedding_of(Vector& v) const {
    return {v.data(), vocab_size, embed_dim};
  }
  Eigen::Map<const Matrix> embedding_of(const Vector& v) const {
    return {v.data(), vocab_size, embed_dim};
  }
  Eigen::Map<Matrix> projection_of(Vector& v) const {
    return {v.data() + vocab_size * embed_dim, embed_dim, out_dim};
  }
  Eigen::Map<const Matrix> projection_of(const Vector& v) const {
    return {v.data() + vocab_size * embed_dim, embed_dim, out_dim};
  }
  Eigen::Map<Vector> bias_of(Vector& v) const {
    return {v.data() + vocab_size * embed_dim + embed_dim * out_dim, out_dim};
  }
  Eigen::Map<const Vector> bias_of(const Vector& v) const {
    return {v.data() + vocab_size * embed_dim + embed_dim * out_dim, out_dim};
  }
};

struct EncodeCache {
  std::vector<int> token_ids;
  Vector mean;  // pooled embedding
  Vector out;   // tanh activation
};

Vector encode(const EncoderParams& params, const std::vector<int>& token_ids,
              EncodeCache* cache = nullptr);

// Accumulates d(loss)/d(theta) into grad given d(loss)/d(output).
void encode_backward(const EncoderParams& params, const EncodeCache& cache,
                     const Vector& d_out, Vector& grad);

struct DualEncoderModel {
  Vocabulary vocab;
  EncoderParams concept_encoder;
  EncoderParams sentence_encoder;

  static DualEncoderModel init(const Vocabulary& vocab, int embed_dim,
                               int out_dim, Rng& rng);

  Vector encode_concepts(const ConceptSet& cs, EncodeCache* c = nullptr) const;
  Vector encode_sentence(const TokenSeq& tokens,
                         EncodeCache* c = nullptr) const;
};

double dot_sim(const Vector& u, const Vector& v);

// Joint scorer over interaction features
// [mean_c; mean_s; mean_c*mean_s; |mean_c - mean_s|] -> tanh hidden -> scalar.
// Flat layout: [embedding | W1 | b1 | w2 | b2].
struct CrossEncoderModel {
  Vocabulary vocab;
  int embed_dim = 0;
  int hidden_dim = 0;
  Vector theta;

  static CrossEncoderModel init(const Vocabulary& vocab, int embed_dim,
                                int hidden_dim, Rng& rng, double scale = 0.1);

  int vocab_size() const { return vocab.size(); }
  Eigen::Index param_count() const;

  Eigen::Map<Matrix> embedding_of(Vector& v) const;
  Eigen::Map<const Matrix> embedding_of(const Vector& v) const;
  Eigen::Map<Matrix> w1_of(Vector& v) const;
  Eigen::Map<const Matrix> w1_of(const Vector& v) const;
  Eigen::Map<Vector> b1_of(Vector& v) const;
  Eigen::Map<const Vector> b1_of(const Vector& v) const;
  Eigen::Map<Vector> w2_of(Vector& v) const;
  Eigen::Map<const Vector> w2_of(const Vector& v) const;
  double& b2_of(Vector& v) const;
  double b2_of(const Vector& v) const;
};

struct CrossScoreCache {
  std::vector<int> concept_ids;
  std::vector<int> sentence_ids;
  Vector mean_c, mean_s;
  Vector features;  // 4 * embed_dim
  Vector hidden;    // tanh activation
};

double cross_score(const CrossEncoderModel& model, const ConceptSet& cs,
                   const TokenSeq& sentence_tokens,
                   CrossScoreCache* cache = nullptr);

void cross_score_backward(const CrossEncoderModel& model,
                          const CrossScoreCache& cache, double d_score,
                          Vector& grad);

}  // namespace mdr
