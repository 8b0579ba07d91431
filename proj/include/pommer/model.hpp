#pragma once

// Reference policy/value network.
//
//   input      23 x 11 x 11
//   trunk      3 x [conv 3x3, 32 filters, stride 1, zero padding 1, ReLU]
//   policy     conv 1x1 -> 2 planes, flatten (c, row, col), affine -> 6 logits, softmax
//   value      conv 1x1 -> 1 plane, flatten, affine -> 64, ReLU, affine -> 1, tanh
//
// Convolutions are cross-correlations; tensors are row-major float32.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pommer/engine.hpp"

namespace pommer {

struct NetConfig {
  static constexpr int kInputPlanes = kObsPlanes;
  static constexpr int kBoard = kBoardSize;
  static constexpr int kTrunkLayers = 3;
  static constexpr int kFilters = 32;
  static constexpr int kPolicyPlanes = 2;
  static constexpr int kValuePlanes = 1;
  static constexpr int kValueHidden = 64;
  static constexpr int kPolicyOutputs = kNumActions;
};

/// Raised when tensors do not match NetConfig.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Tensor {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> data;

  std::size_t element_count() const noexcept;
  bool operator==(const Tensor&) const = default;
};

struct TensorSpec {
  const char* name;
  std::vector<std::uint32_t> shape;
};

/// Names and shapes of every parameter tensor, in file order.
const std::vector<TensorSpec>& tensor_specs();

namespace tensor_id {
enum : int {
  kTrunkWeight0 = 0,  // trunk layer k: weight 2k, bias 2k+1
  kPolicyConvWeight = 6,
  kPolicyConvBias,
  kPolicyFcWeight,
  kPolicyFcBias,
  kValueConvWeight,
  kValueConvBias,
  kValueFc1Weight,
  kValueFc1Bias,
  kValueFc2Weight,
  kValueFc2Bias,
  kCount
};
}  // namespace tensor_id

/// Parameters matching NetConfig exactly; immutable once built.
class ModelWeights {
 public:
  /// Validates names, shapes and finiteness; throws ShapeError.
  explicit ModelWeights(std::vector<Tensor> tensors);

  const std::vector<Tensor>& tensors() const noexcept { return tensors_; }
  std::span<const float> data(int id) const noexcept { return tensors_[id].data; }

  bool operator==(const ModelWeights&) const = default;

 private:
  std::vector<Tensor> tensors_;
};

struct ModelOutput {
  std::array<float, kNumActions> policy{};
  float value = 0.0f;
  std::array<float, kNumActions> logits{};
  float value_preactivation = 0.0f;
};

ModelWeights zero_weights();
/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every tensor.
ModelWeights init_random(std::uint64_t seed);

ModelOutput forward(const ModelWeights& weights, const ObservationPlanes& obs);
/// Element i matches forward(weights, batch[i]); items run in parallel.
std::vector<ModelOutput> forward_batch(const ModelWeights& weights, std::span<const ObservationPlanes> batch);

namespace reference {
/// Direct textbook evaluation in double precision. Slow; kept as the oracle
/// for the optimized kernels.
ModelOutput forward(const ModelWeights& weights, const ObservationPlanes& obs);
}  // namespace reference

/// l = alpha (z - v)^2 - (1 - alpha) sum_a pi_a log max(p_a, 1e-12)
double loss(std::span<const float> p, double v, std::span<const float> pi, double z, double alpha);

inline constexpr double kDefaultValueWeight = 0.1;
inline constexpr double kProbabilityFloor = 1e-12;

struct LossGradient {
  std::array<double, kNumActions> logits{};
  double value_preactivation = 0.0;
};

/// Gradient of loss(softmax(logits), tanh(v_pre), pi, z, alpha) with respect
/// to the logits and the value pre-activation.
LossGradient loss_gradient(std::span<const float> logits, double value_preactivation, std::span<const float> pi,
                           double z, double alpha);

void write_weights(const ModelWeights& weights, const std::string& path);
/// Throws FormatError (BadMagic, BadVersion, ShapeMismatch, Truncated, Io).
ModelWeights read_weights(const std::string& path);

/// "zero", "random:<seed>" or a weight file path.
ModelWeights load_weights_spec(const std::string& spec);

}  // namespace pommer
