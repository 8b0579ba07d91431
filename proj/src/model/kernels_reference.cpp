#include <algorithm>
#include <cmath>
#include <vector>

#include "pommer/model.hpp"

namespace pommer::reference {

namespace {

constexpr int B = kBoardSize;

// out[o][r][c] = bias[o] + sum_{i,ky,kx} w[o][i][ky][kx] * in[i][r+ky-pad][c+kx-pad]
std::vector<double> conv2d(const std::vector<double>& in, int in_ch, std::span<const float> w,
                           std::span<const float> bias, int out_ch, int k) {
  const int pad = k / 2;
  std::vector<double> out(static_cast<std::size_t>(out_ch) * B * B, 0.0);
  for (int o = 0; o < out_ch; ++o) {
    for (int r = 0; r < B; ++r) {
      for (int c = 0; c < B; ++c) {
        double acc = bias[o];
        for (int i = 0; i < in_ch; ++i) {
          for (int ky = 0; ky < k; ++ky) {
            for (int kx = 0; kx < k; ++kx) {
              const int rr = r + ky - pad;
              const int cc = c + kx - pad;
              if (rr < 0 || rr >= B || cc < 0 || cc >= B) continue;
              acc += static_cast<double>(w[((o * in_ch + i) * k + ky) * k + kx]) * in[(i * B + rr) * B + cc];
            }
          }
        }
        out[(o * B + r) * B + c] = acc;
      }
    }
  }
  return out;
}

std::vector<double> affine(const std::vector<double>& in, std::span<const float> w, std::span<const float> bias) {
  const std::size_t n_out = bias.size();
  std::vector<double> out(n_out);
  for (std::size_t o = 0; o < n_out; ++o) {
    double acc = bias[o];
    for (std::size_t i = 0; i < in.size(); ++i) acc += static_cast<double>(w[o * in.size() + i]) * in[i];
    out[o] = acc;
  }
  return out;
}

void relu(std::vector<double>& v) {
  for (double& x : v) x = std::max(0.0, x);
}

}  // namespace

ModelOutput forward(const ModelWeights& weights, const ObservationPlanes& obs) {
  std::vector<double> x(obs.data.begin(), obs.data.end());
  int channels = NetConfig::kInputPlanes;
  for (int layer = 0; layer < NetConfig::kTrunkLayers; ++layer) {
    x = conv2d(x, channels, weights.data(2 * layer), weights.data(2 * layer + 1), NetConfig::kFilters, 3);
    relu(x);
    channels = NetConfig::kFilters;
  }

  const auto ph = conv2d(x, channels, weights.data(tensor_id::kPolicyConvWeight),
                         weights.data(tensor_id::kPolicyConvBias), NetConfig::kPolicyPlanes, 1);
  const auto logits = affine(ph, weights.data(tensor_id::kPolicyFcWeight), weights.data(tensor_id::kPolicyFcBias));

  const auto vh = conv2d(x, channels, weights.data(tensor_id::kValueConvWeight),
                         weights.data(tensor_id::kValueConvBias), NetConfig::kValuePlanes, 1);
  auto hidden = affine(vh, weights.data(tensor_id::kValueFc1Weight), weights.data(tensor_id::kValueFc1Bias));
  relu(hidden);
  const auto v = affine(hidden, weights.data(tensor_id::kValueFc2Weight), weights.data(tensor_id::kValueFc2Bias));

  ModelOutput out;
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  for (int a = 0; a < kNumActions; ++a) {
    out.logits[a] = static_cast<float>(logits[a]);
    out.policy[a] = static_cast<float>(std::exp(logits[a] - m) / z);
  }
  out.value_preactivation = static_cast<float>(v[0]);
  out.value = static_cast<float>(std::tanh(v[0]));
  return out;
}

}  // namespace pommer::reference
