// Optimized forward pass.
//
// Activations live in zero-bordered 13x13 planes. A 3x3 convolution then
// becomes nine shifted multiply-adds over one contiguous run of 11*13
// floats per channel pair; the two padding columns inside the run are
// computed too and masked to zero on the way out.

#include <algorithm>
#include <cmath>
#include <stdexcept>

#if defined(POMMER_HAVE_OPENMP)
#include <omp.h>
#endif

#include "pommer/model.hpp"

namespace pommer {

namespace {

constexpr int B = kBoardSize;
constexpr int P = B + 2;            // padded width
constexpr int kPlane = 176;         // >= 13*13 + slack for the last shifted read, multiple of 16
constexpr int kRun = 144;           // >= 11*13, multiple of 16
constexpr int kMaxChannels = std::max(NetConfig::kInputPlanes, NetConfig::kFilters);

struct alignas(64) Activations {
  float v[kMaxChannels][kPlane];
};

void load_input(const ObservationPlanes& obs, Activations& a) {
  for (int c = 0; c < NetConfig::kInputPlanes; ++c) {
    std::fill(std::begin(a.v[c]), std::end(a.v[c]), 0.0f);
    for (int r = 0; r < B; ++r) {
      std::copy_n(&obs.data[c * kNumCells + r * B], B, &a.v[c][(r + 1) * P + 1]);
    }
  }
}

// 16-lane vector; lowers to one AVX-512 register or several narrower ones.
typedef float v16 __attribute__((vector_size(64)));
constexpr int kLanes = 16;
constexpr int kRunVectors = kRun / kLanes;  // 9
constexpr int kTileVectors = 3;             // pixels per tile: 48
constexpr int kOutBlock = 8;                // output channels per tile
static_assert(NetConfig::kFilters % kOutBlock == 0 && kRunVectors % kTileVectors == 0);

inline v16 load(const float* p) {
  v16 v;
  __builtin_memcpy(&v, p, sizeof(v));
  return v;
}
inline void store(float* p, v16 v) { __builtin_memcpy(p, &v, sizeof(v)); }

// 1 where a run position maps to a board cell, 0 on the padding columns.
struct RunMask {
  alignas(64) float m[kRun];
  RunMask() {
    for (int p = 0; p < kRun; ++p) m[p] = (p % P) < B && p / P < B ? 1.0f : 0.0f;
  }
};
const RunMask kMask;

// Run position p covers padded cell p + P + 1, i.e. board cell (p / P, p % P).
// Each tile keeps 8 output channels x 48 pixels in 24 vector accumulators.
void conv3x3_relu(const Activations& in, int in_ch, const float* __restrict w, const float* __restrict bias,
                  int out_ch, Activations& out) {
  for (int ob = 0; ob < out_ch; ob += kOutBlock) {
    for (int t = 0; t < kRunVectors; t += kTileVectors) {
      v16 acc[kOutBlock][kTileVectors];
      for (int o = 0; o < kOutBlock; ++o) {
        for (int k = 0; k < kTileVectors; ++k) acc[o][k] = v16{} + bias[ob + o];
      }
      for (int i = 0; i < in_ch; ++i) {
        const float* src = in.v[i] + t * kLanes;
        const float* wi = w + (ob * in_ch + i) * 9;
        for (int tap = 0; tap < 9; ++tap) {
          const float* s = src + (tap / 3) * P + tap % 3;
          v16 x[kTileVectors];
          for (int k = 0; k < kTileVectors; ++k) x[k] = load(s + k * kLanes);
          for (int o = 0; o < kOutBlock; ++o) {
            const float wk = wi[o * in_ch * 9 + tap];
            for (int k = 0; k < kTileVectors; ++k) acc[o][k] += wk * x[k];
          }
        }
      }
      for (int o = 0; o < kOutBlock; ++o) {
        float* dst = out.v[ob + o] + P + 1 + t * kLanes;
        for (int k = 0; k < kTileVectors; ++k) {
          const v16 mask = load(kMask.m + (t + k) * kLanes);
          const v16 a = acc[o][k];
          store(dst + k * kLanes, (a > 0.0f ? a : v16{}) * mask);
        }
      }
    }
  }
  for (int o = 0; o < out_ch; ++o) {
    std::fill(out.v[o], out.v[o] + P + 1, 0.0f);
    std::fill(out.v[o] + P + 1 + kRun, out.v[o] + kPlane, 0.0f);
  }
}

// 1x1 convolution from the padded trunk output into dense 11x11 planes.
void conv1x1(const Activations& in, int in_ch, const float* w, const float* bias, int out_ch, float* out) {
  for (int o = 0; o < out_ch; ++o) {
    alignas(64) float acc[kRun];
    std::fill(std::begin(acc), std::end(acc), bias[o]);
    for (int i = 0; i < in_ch; ++i) {
      const float k = w[o * in_ch + i];
      const float* s = in.v[i] + P + 1;
#pragma omp simd
      for (int p = 0; p < kRun; ++p) acc[p] += k * s[p];
    }
    float* dst = out + o * kNumCells;
    for (int r = 0; r < B; ++r) std::copy_n(acc + r * P, B, dst + r * B);
  }
}

void affine(const float* in, int n_in, const float* w, const float* bias, int n_out, float* out) {
  for (int o = 0; o < n_out; ++o) {
    float acc = 0.0f;
    const float* row = w + o * n_in;
#pragma omp simd reduction(+ : acc)
    for (int i = 0; i < n_in; ++i) acc += row[i] * in[i];
    out[o] = acc + bias[o];
  }
}

ModelOutput forward_one(const ModelWeights& weights, const ObservationPlanes& obs, Activations& a,
                        Activations& b) {
  load_input(obs, a);
  conv3x3_relu(a, NetConfig::kInputPlanes, weights.data(0).data(), weights.data(1).data(), NetConfig::kFilters, b);
  conv3x3_relu(b, NetConfig::kFilters, weights.data(2).data(), weights.data(3).data(), NetConfig::kFilters, a);
  conv3x3_relu(a, NetConfig::kFilters, weights.data(4).data(), weights.data(5).data(), NetConfig::kFilters, b);

  ModelOutput out;
  float policy_planes[NetConfig::kPolicyPlanes * kNumCells];
  conv1x1(b, NetConfig::kFilters, weights.data(tensor_id::kPolicyConvWeight).data(),
          weights.data(tensor_id::kPolicyConvBias).data(), NetConfig::kPolicyPlanes, policy_planes);
  affine(policy_planes, NetConfig::kPolicyPlanes * kNumCells, weights.data(tensor_id::kPolicyFcWeight).data(),
         weights.data(tensor_id::kPolicyFcBias).data(), kNumActions, out.logits.data());

  float value_plane[NetConfig::kValuePlanes * kNumCells];
  conv1x1(b, NetConfig::kFilters, weights.data(tensor_id::kValueConvWeight).data(),
          weights.data(tensor_id::kValueConvBias).data(), NetConfig::kValuePlanes, value_plane);
  float hidden[NetConfig::kValueHidden];
  affine(value_plane, NetConfig::kValuePlanes * kNumCells, weights.data(tensor_id::kValueFc1Weight).data(),
         weights.data(tensor_id::kValueFc1Bias).data(), NetConfig::kValueHidden, hidden);
  for (float& h : hidden) h = std::max(0.0f, h);
  affine(hidden, NetConfig::kValueHidden, weights.data(tensor_id::kValueFc2Weight).data(),
         weights.data(tensor_id::kValueFc2Bias).data(), 1, &out.value_preactivation);
  out.value = std::tanh(out.value_preactivation);

  const float m = *std::max_element(out.logits.begin(), out.logits.end());
  float z = 0.0f;
  for (int k = 0; k < kNumActions; ++k) {
    out.policy[k] = std::exp(out.logits[k] - m);
    z += out.policy[k];
  }
  for (float& p : out.policy) p /= z;
  return out;
}

}  // namespace

ModelOutput forward(const ModelWeights& weights, const ObservationPlanes& obs) {
  Activations a;
  Activations b;
  return forward_one(weights, obs, a, b);
}

std::vector<ModelOutput> forward_batch(const ModelWeights& weights, std::span<const ObservationPlanes> batch) {
  if (batch.empty()) throw std::invalid_argument("forward_batch: empty batch");
  std::vector<ModelOutput> out(batch.size());
  const auto n = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel
  {
    Activations a;
    Activations b;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = forward_one(weights, batch[i], a, b);
  }
  return out;
}

}  // namespace pommer
