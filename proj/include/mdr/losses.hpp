#pragma once

#include <vector>

#include "mdr/encoder.hpp"
#include "mdr/metrics.hpp"

namespace mdr {

struct LossResult {
  double loss = 0.0;
  Vector grad;  // d(loss)/d(scores)
};

// -log( e^pos / (e^pos + sum e^neg_i) ), stabilized by max subtraction.
// grad[0] is w.r.t. pos_sim, grad[1..] w.r.t. neg_sims.
LossResult contrastive_loss(double pos_sim, const std::vector<double>& neg_sims);

// Plackett-Luce negative log-likelihood of the target permutation:
// -sum_k log( e^{z_{o_k}} / sum_{i>=k} e^{z_{o_i}} ).
LossResult list_mle_loss(const Vector& z,
                         const std::vector<std::size_t>& order);

// KL(softmax(teacher) || softmax(student)); gradient w.r.t. student is
// softmax(student) - softmax(teacher). Teacher is constant.
LossResult kl_distill_loss(const Vector& teacher, const Vector& student);

Vector softmax(const Vector& z);

}  // namespace mdr
