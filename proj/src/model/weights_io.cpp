#include <fstream>

#include "pommer/binary_io.hpp"
#include "pommer/model.hpp"

namespace pommer {

namespace {
constexpr char kMagic[5] = {'P', 'W', 'N', 'E', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void write_weights(const ModelWeights& weights, const std::string& path) {
  ByteWriter w;
  w.put_bytes({kMagic, sizeof(kMagic)});
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(weights.tensors().size()));
  for (const Tensor& t : weights.tensors()) {
    w.put<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.put_bytes(t.name);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(t.shape.size()));
    for (std::uint32_t d : t.shape) w.put<std::uint32_t>(d);
    w.put_span<float>(t.data);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  w.write_to(out);
}

ModelWeights read_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  StreamReader r(in);
  if (r.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw FormatError(FormatErrorKind::BadMagic, path + " is not a PWNET file");
  }
  if (const auto v = r.get<std::uint32_t>(); v != kVersion) {
    throw FormatError(FormatErrorKind::BadVersion, "unsupported weight file version " + std::to_string(v));
  }
  const auto& specs = tensor_specs();
  const auto count = r.get<std::uint32_t>();
  if (count != specs.size()) {
    throw FormatError(FormatErrorKind::ShapeMismatch,
                      "expected " + std::to_string(specs.size()) + " tensors, file has " + std::to_string(count));
  }
  std::vector<Tensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Tensor t;
    t.name = r.get_string(r.get<std::uint16_t>());
    const auto rank = r.get<std::uint8_t>();
    t.shape.resize(rank);
    for (auto& d : t.shape) d = r.get<std::uint32_t>();
    if (t.name != specs[i].name || t.shape != specs[i].shape) {
      throw FormatError(FormatErrorKind::ShapeMismatch, "tensor " + std::to_string(i) + " (" + t.name +
                                                            ") does not match " + specs[i].name);
    }
    t.data.resize(t.element_count());
    r.get_span<float>(t.data);
    tensors.push_back(std::move(t));
  }
  try {
    return ModelWeights(std::move(tensors));
  } catch (const ShapeError& e) {
    throw FormatError(FormatErrorKind::InvalidValue, e.what());
  }
}

ModelWeights load_weights_spec(const std::string& spec) {
  if (spec == "zero") return zero_weights();
  if (spec.rfind("random:", 0) == 0) return init_random(std::stoull(spec.substr(7)));
  return read_weights(spec);
}

}  // namespace pommer
