#include "mdr/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace mdr {

Vector softmax(const Vector& z) {
  const double m = z.maxCoeff();
  Vector e = (z.array() - m).exp().matrix();
  return e / e.sum();
}

LossResult contrastive_loss(double pos_sim,
                            const std::vector<double>& neg_sims) {
  const std::size_t n = neg_sims.size() + 1;
  Vector scores(n);
  scores[0] = pos_sim;
  for (std::size_t i = 0; i < neg_sims.size(); ++i) scores[i + 1] = neg_sims[i];

  LossResult result;
  if (neg_sims.empty()) {
    result.grad = Vector::Zero(1);
    return result;
  }
  const double m = scores.maxCoeff();
  const double lse = m + std::log((scores.array() - m).exp().sum());
  result.loss = lse - pos_sim;
  result.grad = softmax(scores);
  result.grad[0] -= 1.0;
  return result;
}

LossResult list_mle_loss(const Vector& z,
                         const std::vector<std::size_t>& order) {
  const std::size_t n = order.size();
  if (static_cast<std::size_t>(z.size()) != n) {
    throw std::invalid_argument("scores/order length mismatch");
  }
  if (n == 0) throw std::invalid_argument("empty list");

  LossResult result;
  result.grad = Vector::Zero(z.size());
  for (std::size_t k = 0; k < n; ++k) {
    double m = z[order[k]];
    for (std::size_t i = k; i < n; ++i) m = std::max(m, z[order[i]]);
    double sum = 0.0;
    for (std::size_t i = k; i < n; ++i) sum += std::exp(z[order[i]] - m);
    const double lse = m + std::log(sum);
    result.loss += lse - z[order[k]];
    for (std::size_t i = k; i < n; ++i) {
      result.grad[order[i]] += std::exp(z[order[i]] - lse);
    }
    result.grad[order[k]] -= 1.0;
  }
  return result;
}

LossResult kl_distill_loss(const Vector& teacher, const Vector& student) {
  if (teacher.size() != student.size()) {
    throw std::invalid_argument("teacher/student length mismatch");
  }
  if (teacher.size() == 0) throw std::invalid_argument("empty score vectors");

  const Vector p = softmax(teacher);
  const Vector q = softmax(student);
  LossResult result;
  result.loss = (p.array() * (p.array() / q.array()).log()).sum();
  result.grad = q - p;
  return result;
}

}  // namespace mdr
