#include "mdr/encoder.hpp"

#include <stdexcept>

namespace mdr {

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, size());
  return it->second;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? 0 : it->second;
}

std::vector<int> Vocabulary::ids(const TokenSeq& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

Vocabulary build_vocabulary(const Corpus& corpus,
                            const std::vector<DatasetExample>& dataset) {
  Vocabulary vocab;
  for (const auto& rec : corpus.records) {
    for (const auto& t : rec.tokens) vocab.add(t);
  }
  for (const auto& ex : dataset) {
    for (const auto& c : ex.concept_set.concepts) vocab.add(c);
    for (const auto& ref : ex.references) {
      for (const auto& t : ref) vocab.add(t);
    }
  }
  return vocab;
}

EncoderParams EncoderParams::init(int vocab_size, int embed_dim, int out_dim,
                                  Rng& rng, double scale) {
  EncoderParams p;
  p.vocab_size = vocab_size;
  p.embed_dim = embed_dim;
  p.out_dim = out_dim;
  p.theta.resize(p.param_count());
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) {
    p.theta[i] = scale * rng.next_normal();
  }
  p.bias_of(p.theta).setZero();
  return p;
}

Vector encode(const EncoderParams& params, const std::vector<int>& token_ids,
              EncodeCache* cache) {
  if (token_ids.empty()) throw std::invalid_argument("empty token sequence");

  const auto embed = params.embedding_of(params.theta);
  Vector mean = Vector::Zero(params.embed_dim);
  for (int id : token_ids) mean += embed.row(id).transpose();
  mean /= static_cast<double>(token_ids.size());

  Vector out = (params.projection_of(params.theta).transpose() * mean +
                params.bias_of(params.theta))
                   .array()
                   .tanh()
                   .matrix();
  if (cache) {
    cache->token_ids = token_ids;
    cache->mean = mean;
    cache->out = out;
  }
  return out;
}

void encode_backward(const EncoderParams& params, const EncodeCache& cache,
                     const Vector& d_out, Vector& grad) {
  // d tanh
  const Vector d_pre =
      (d_out.array() * (1.0 - cache.out.array().square())).matrix();

  auto d_proj = params.projection_of(grad);
  auto d_bias = params.bias_of(grad);
  auto d_embed = params.embedding_of(grad);

  d_proj.noalias() += cache.mean * d_pre.transpose();
  d_bias += d_pre;

  const Vector d_mean =
      params.projection_of(params.theta) * d_pre /
      static_cast<double>(cache.token_ids.size());
  for (int id : cache.token_ids) {
    d_embed.row(id) += d_mean.transpose();
  }
}

DualEncoderModel DualEncoderModel::init(const Vocabulary& vocab, int embed_dim,
                                        int out_dim, Rng& rng) {
  DualEncoderModel m;
  m.vocab = vocab;
  m.concept_encoder = EncoderParams::init(vocab.size(), embed_dim, out_dim, rng);
  m.sentence_encoder =
      EncoderParams::init(vocab.size(), embed_dim, out_dim, rng);
  return m;
}

Vector DualEncoderModel::encode_concepts(const ConceptSet& cs,
                                         EncodeCache* c) const {
  return encode(concept_encoder, vocab.ids(cs.concepts), c);
}

Vector DualEncoderModel::encode_sentence(const TokenSeq& tokens,
                                         EncodeCache* c) const {
  return encode(sentence_encoder, vocab.ids(tokens), c);
}

double dot_sim(const Vector& u, const Vector& v) {
  if (u.size() != v.size()) throw std::invalid_argument("dimension mismatch");
  return u.dot(v);
}

Eigen::Index CrossEncoderModel::param_count() const {
  const Eigen::Index v = vocab_size();
  return v * embed_dim + 4 * embed_dim * hidden_dim + hidden_dim + hidden_dim +
         1;
}

Eigen::Map<Matrix> CrossEncoderModel::embedding_of(Vector& v) const {
  return {v.data(), vocab_size(), embed_dim};
}
Eigen::Map<const Matrix> CrossEncoderModel::embedding_of(
    const Vector& v) const {
  return {v.data(), vocab_size(), embed_dim};
}
Eigen::Map<Matrix> CrossEncoderModel::w1_of(Vector& v) const {
  return {v.data() + vocab_size() * embed_dim, 4 * embed_dim, hidden_dim};
}
Eigen::Map<const Matrix> CrossEncoderModel::w1_of(const Vector& v) const {
  return {v.data() + vocab_size() * embed_dim, 4 * embed_dim, hidden_dim};
}
Eigen::Map<Vector> CrossEncoderModel::b1_of(Vector& v) const {
  return {v.data() + vocab_size() * embed_dim + 4 * embed_dim * hidden_dim,
          hidden_dim};
}
Eigen::Map<const Vector> CrossEncoderModel::b1_of(const Vector& v) const {
  return {v.data() + vocab_size() * embed_dim + 4 * embed_dim * hidden_dim,
          hidden_dim};
}
Eigen::Map<Vector> CrossEncoderModel::w2_of(Vector& v) const {
  return {v.data() + vocab_size() * embed_dim + 4 * embed_dim * hidden_dim +
              hidden_dim,
          hidden_dim};
}
Eigen::Map<const Vector> CrossEncoderModel::w2_of(const Vector& v) const {
  return {v.data() + vocab_size() * embed_dim + 4 * embed_dim * hidden_dim +
              hidden_dim,
          hidden_dim};
}
double& CrossEncoderModel::b2_of(Vector& v) const {
  return v[v.size() - 1];
}
double CrossEncoderModel::b2_of(const Vector& v) const {
  return v[v.size() - 1];
}

CrossEncoderModel CrossEncoderModel::init(const Vocabulary& vocab,
                                          int embed_dim, int hidden_dim,
                                          Rng& rng, double scale) {
  CrossEncoderModel m;
  m.vocab = vocab;
  m.embed_dim = embed_dim;
  m.hidden_dim = hidden_dim;
  m.theta.resize(m.param_count());
  for (Eigen::Index i = 0; i < m.theta.size(); ++i) {
    m.theta[i] = scale * rng.next_normal();
  }
  m.b1_of(m.theta).setZero();
  m.b2_of(m.theta) = 0.0;
  return m;
}

namespace {

Vector mean_embed(const Eigen::Map<const Matrix>& embed,
                  const std::vector<int>& ids) {
  Vector mean = Vector::Zero(embed.cols());
  for (int id : ids) mean += embed.row(id).transpose();
  return mean / static_cast<double>(ids.size());
}

}  // namespace

double cross_score(const CrossEncoderModel& model, const ConceptSet& cs,
                   const TokenSeq& sentence_tokens, CrossScoreCache* cache) {
  if (cs.count() == 0 || sentence_tokens.empty()) {
    throw std::invalid_argument("empty input");
  }
  const auto embed = model.embedding_of(model.theta);
  const std::vector<int> cids = model.vocab.ids(cs.concepts);
  const std::vector<int> sids = model.vocab.ids(sentence_tokens);

  const Vector mc = mean_embed(embed, cids);
  const Vector ms = mean_embed(embed, sids);

  const int d = model.embed_dim;
  Vector features(4 * d);
  features.segment(0, d) = mc;
  features.segment(d, d) = ms;
  features.segment(2 * d, d) = mc.cwiseProduct(ms);
  features.segment(3 * d, d) = (mc - ms).cwiseAbs();

  const Vector hidden =
      (model.w1_of(model.theta).transpose() * features + model.b1_of(model.theta))
          .array()
          .tanh()
          .matrix();
  const double score =
      model.w2_of(model.theta).dot(hidden) + model.b2_of(model.theta);

  if (cache) {
    cache->concept_ids = cids;
    cache->sentence_ids = sids;
    cache->mean_c = mc;
    cache->mean_s = ms;
    cache->features = features;
    cache->hidden = hidden;
  }
  return score;
}

void cross_score_backward(const CrossEncoderModel& model,
                          const CrossScoreCache& cache, double d_score,
                          Vector& grad) {
  const int d = model.embed_dim;

  model.b2_of(grad) += d_score;
  model.w2_of(grad) += d_score * cache.hidden;

  const Vector d_hidden_pre =
      (d_score * model.w2_of(model.theta).array() *
       (1.0 - cache.hidden.array().square()))
          .matrix();
  model.w1_of(grad).noalias() += cache.features * d_hidden_pre.transpose();
  model.b1_of(grad) += d_hidden_pre;

  const Vector d_features = model.w1_of(model.theta) * d_hidden_pre;

  const Vector diff = cache.mean_c - cache.mean_s;
  const Vector sign =
      diff.unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });

  const Vector d_mc = d_features.segment(0, d) +
                      d_features.segment(2 * d, d).cwiseProduct(cache.mean_s) +
                      d_features.segment(3 * d, d).cwiseProduct(sign);
  const Vector d_ms = d_features.segment(d, d) +
                      d_features.segment(2 * d, d).cwiseProduct(cache.mean_c) -
                      d_features.segment(3 * d, d).cwiseProduct(sign);

  auto d_embed = model.embedding_of(grad);
  const Vector d_mc_tok = d_mc / static_cast<double>(cache.concept_ids.size());
  for (int id : cache.concept_ids) d_embed.row(id) += d_mc_tok.transpose();
  const Vector d_ms_tok = d_ms / static_cast<double>(cache.sentence_ids.size());
  for (int id : cache.sentence_ids) d_embed.row(id) += d_ms_tok.transpose();
}

}  // namespace mdr
