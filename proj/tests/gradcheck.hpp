#pragma once

// Central finite-difference oracle for the losses composed with the two
// reference scorers. Lives in test code only; independent of the training
// loops it checks.

#include <string>
#include <vector>

#include "mdr/encoder.hpp"
#include "mdr/losses.hpp"
#include "mdr/rng.hpp"

namespace mdr::testing {

enum class LossKind { kContrastive, kListMle, kKl };

struct GradInstance {
  ConceptSet concept_set;
  std::vector<TokenSeq> sentences;
  std::vector<std::size_t> order;  // ListMLE target
  Vector teacher;                  // KL teacher scores
};

inline std::vector<std::string> gradcheck_words() {
  std::vector<std::string> words;
  for (int i = 0; i < 12; ++i) words.push_back("t" + std::to_string(i));
  return words;
}

inline Vocabulary gradcheck_vocab() {
  Vocabulary vocab;
  for (const auto& w : gradcheck_words()) vocab.add(w);
  return vocab;
}

inline GradInstance random_instance(Rng& rng) {
  const auto words = gradcheck_words();
  GradInstance inst;
  std::vector<std::string> concepts;
  const std::size_t m = 2 + rng.next_index(3);
  for (std::size_t i = 0; i < m; ++i) {
    concepts.push_back(words[rng.next_index(words.size())]);
  }
  inst.concept_set = make_concept_set(concepts);

  const std::size_t n = 3 + rng.next_index(2);
  for (std::size_t i = 0; i < n; ++i) {
    TokenSeq sent;
    const std::size_t len = 2 + rng.next_index(4);
    for (std::size_t j = 0; j < len; ++j) {
      sent.push_back(words[rng.next_index(words.size())]);
    }
    inst.sentences.push_back(std::move(sent));
  }

  inst.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.order[i] = i;
  rng.shuffle(inst.order);

  inst.teacher.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) inst.teacher[i] = rng.next_normal();
  return inst;
}

inline LossResult apply_loss(LossKind kind, const GradInstance& inst,
                             const Vector& scores) {
  switch (kind) {
    case LossKind::kContrastive: {
      std::vector<double> negs(scores.data() + 1,
                               scores.data() + scores.size());
      return contrastive_loss(scores[0], negs);
    }
    case LossKind::kListMle:
      return list_mle_loss(scores, inst.order);
    case LossKind::kKl:
      return kl_distill_loss(inst.teacher, scores);
  }
  return {};
}

// Loss through the dual encoder; optionally accumulates analytic gradients.
inline double dual_loss(const DualEncoderModel& model, const GradInstance& inst,
                        LossKind kind, Vector* grad_c = nullptr,
                        Vector* grad_s = nullptr) {
  EncodeCache q_cache;
  const Vector q = model.encode_concepts(inst.concept_set, &q_cache);
  const std::size_t n = inst.sentences.size();
  std::vector<EncodeCache> s_cache(n);
  std::vector<Vector> s(n);
  Vector z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = model.encode_sentence(inst.sentences[i], &s_cache[i]);
    z[static_cast<Eigen::Index>(i)] = dot_sim(q, s[i]);
  }
  const LossResult lr = apply_loss(kind, inst, z);
  if (grad_c && grad_s) {
    Vector dq = Vector::Zero(q.size());
    for (std::size_t i = 0; i < n; ++i) {
      const double g = lr.grad[static_cast<Eigen::Index>(i)];
      dq += g * s[i];
      encode_backward(model.sentence_encoder, s_cache[i], (g * q).eval(),
                      *grad_s);
    }
    encode_backward(model.concept_encoder, q_cache, dq, *grad_c);
  }
  return lr.loss;
}

// Loss through the cross encoder.
inline double cross_loss(const CrossEncoderModel& model,
                         const GradInstance& inst, LossKind kind,
                         Vector* grad = nullptr) {
  const std::size_t n = inst.sentences.size();
  std::vector<CrossScoreCache> caches(n);
  Vector z(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    z[static_cast<Eigen::Index>(i)] =
        cross_score(model, inst.concept_set, inst.sentences[i], &caches[i]);
  }
  const LossResult lr = apply_loss(kind, inst, z);
  if (grad) {
    for (std::size_t i = 0; i < n; ++i) {
      cross_score_backward(model, caches[i],
                           lr.grad[static_cast<Eigen::Index>(i)], *grad);
    }
  }
  return lr.loss;
}

inline double relative_error(const Vector& analytic, const Vector& numeric) {
  const double denom =
      std::max({analytic.norm(), numeric.norm(), 1e-12});
  return (analytic - numeric).norm() / denom;
}

// Max relative error between analytic and central-difference gradients over
// all parameters of both dual-encoder halves.
inline double gradcheck_dual(DualEncoderModel& model, const GradInstance& inst,
                             LossKind kind, double step = 1e-4) {
  Vector grad_c = Vector::Zero(model.concept_encoder.param_count());
  Vector grad_s = Vector::Zero(model.sentence_encoder.param_count());
  dual_loss(model, inst, kind, &grad_c, &grad_s);

  double worst = 0.0;
  for (auto* enc : {&model.concept_encoder, &model.sentence_encoder}) {
    Vector numeric = Vector::Zero(enc->theta.size());
    for (Eigen::Index i = 0; i < enc->theta.size(); ++i) {
      const double saved = enc->theta[i];
      enc->theta[i] = saved + step;
      const double plus = dual_loss(model, inst, kind);
      enc->theta[i] = saved - step;
      const double minus = dual_loss(model, inst, kind);
      enc->theta[i] = saved;
      numeric[i] = (plus - minus) / (2.0 * step);
    }
    const Vector& analytic =
        enc == &model.concept_encoder ? grad_c : grad_s;
    worst = std::max(worst, relative_error(analytic, numeric));
  }
  return worst;
}

inline double gradcheck_cross(CrossEncoderModel& model,
                              const GradInstance& inst, LossKind kind,
                              double step = 1e-4) {
  Vector grad = Vector::Zero(model.param_count());
  cross_loss(model, inst, kind, &grad);

  Vector numeric = Vector::Zero(model.theta.size());
  for (Eigen::Index i = 0; i < model.theta.size(); ++i) {
    const double saved = model.theta[i];
    model.theta[i] = saved + step;
    const double plus = cross_loss(model, inst, kind);
    model.theta[i] = saved - step;
    const double minus = cross_loss(model, inst, kind);
    model.theta[i] = saved;
    numeric[i] = (plus - minus) / (2.0 * step);
  }
  return relative_error(grad, numeric);
}

}  // namespace mdr::testing
