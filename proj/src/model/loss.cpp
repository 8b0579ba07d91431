#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pommer/model.hpp"

namespace pommer {

double loss(std::span<const float> p, double v, std::span<const float> pi, double z, double alpha) {
  if (p.size() != pi.size()) throw std::invalid_argument("loss: policy size mismatch");
  double cross_entropy = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    cross_entropy -= static_cast<double>(pi[a]) * std::log(std::max(static_cast<double>(p[a]), kProbabilityFloor));
  }
  return alpha * (z - v) * (z - v) + (1.0 - alpha) * cross_entropy;
}

LossGradient loss_gradient(std::span<const float> logits, double value_preactivation, std::span<const float> pi,
                           double z, double alpha) {
  if (logits.size() != kNumActions || pi.size() != kNumActions) {
    throw std::invalid_argument("loss_gradient: expected six logits and targets");
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  std::array<double, kNumActions> p{};
  double sum = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    p[a] = std::exp(logits[a] - m);
    sum += p[a];
  }
  double pi_mass = 0.0;
  for (float t : pi) pi_mass += t;

  LossGradient g;
  // d/dl_a of -sum_b pi_b log softmax_b = p_a * sum(pi) - pi_a (no clamping active)
  for (int a = 0; a < kNumActions; ++a) g.logits[a] = (1.0 - alpha) * (p[a] / sum * pi_mass - pi[a]);
  const double v = std::tanh(value_preactivation);
  g.value_preactivation = -2.0 * alpha * (z - v) * (1.0 - v * v);
  return g;
}

}  // namespace pommer
