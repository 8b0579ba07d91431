#include <cmath>
#include <numeric>

#include "pommer/model.hpp"
#include "pommer/rng.hpp"

namespace pommer {

std::size_t Tensor::element_count() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         [](std::size_t a, std::uint32_t b) { return a * b; });
}

const std::vector<TensorSpec>& tensor_specs() {
  constexpr std::uint32_t F = NetConfig::kFilters;
  constexpr std::uint32_t C = NetConfig::kInputPlanes;
  constexpr std::uint32_t cells = kNumCells;
  static const std::vector<TensorSpec> specs = {
      {"trunk.0.weight", {F, C, 3, 3}},
      {"trunk.0.bias", {F}},
      {"trunk.1.weight", {F, F, 3, 3}},
      {"trunk.1.bias", {F}},
      {"trunk.2.weight", {F, F, 3, 3}},
      {"trunk.2.bias", {F}},
      {"policy.conv.weight", {NetConfig::kPolicyPlanes, F, 1, 1}},
      {"policy.conv.bias", {NetConfig::kPolicyPlanes}},
      {"policy.fc.weight", {NetConfig::kPolicyOutputs, NetConfig::kPolicyPlanes * cells}},
      {"policy.fc.bias", {NetConfig::kPolicyOutputs}},
      {"value.conv.weight", {NetConfig::kValuePlanes, F, 1, 1}},
      {"value.conv.bias", {NetConfig::kValuePlanes}},
      {"value.fc1.weight", {NetConfig::kValueHidden, NetConfig::kValuePlanes * cells}},
      {"value.fc1.bias", {NetConfig::kValueHidden}},
      {"value.fc2.weight", {1, NetConfig::kValueHidden}},
      {"value.fc2.bias", {1}},
  };
  return specs;
}

ModelWeights::ModelWeights(std::vector<Tensor> tensors) : tensors_(std::move(tensors)) {
  const auto& specs = tensor_specs();
  if (tensors_.size() != specs.size()) {
    throw ShapeError("expected " + std::to_string(specs.size()) + " tensors, got " +
                     std::to_string(tensors_.size()));
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Tensor& t = tensors_[i];
    if (t.name != specs[i].name) throw ShapeError("tensor " + std::to_string(i) + " should be " + specs[i].name);
    if (t.shape != specs[i].shape) throw ShapeError("shape mismatch for " + t.name);
    if (t.data.size() != t.element_count()) throw ShapeError("data size mismatch for " + t.name);
    for (float v : t.data) {
      if (!std::isfinite(v)) throw ShapeError("non-finite value in " + t.name);
    }
  }
}

namespace {

std::vector<Tensor> empty_tensors() {
  std::vector<Tensor> out;
  for (const auto& spec : tensor_specs()) {
    Tensor t{spec.name, spec.shape, {}};
    t.data.assign(t.element_count(), 0.0f);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

ModelWeights zero_weights() { return ModelWeights(empty_tensors()); }

ModelWeights init_random(std::uint64_t seed) {
  auto tensors = empty_tensors();
  SplitMix64 rng(mix64(seed ^ 0x1a17ee1917ULL));
  for (std::size_t i = 0; i < tensors.size(); i += 2) {
    // weight at i, its bias at i + 1; both use the weight's fan-in
    const auto& shape = tensors[i].shape;
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < shape.size(); ++d) fan_in *= shape[d];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (std::size_t k : {i, i + 1}) {
      for (float& v : tensors[k].data) v = static_cast<float>((2.0 * rng.uniform() - 1.0) * bound);
    }
  }
  return ModelWeights(std::move(tensors));
}

}  // namespace pommer
