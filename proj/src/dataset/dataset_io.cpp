#include <cmath>

#include "pommer/binary_io.hpp"
#include "pommer/dataset.hpp"

namespace pommer::dataset {

namespace {

constexpr char kMagic[4] = {'P', 'L', 'R', 'N'};
constexpr std::uint32_t kVersion = 1;
constexpr std::streamoff kCountOffset = 8;

void put_header(ByteWriter& w, std::uint64_t count) {
  w.put_bytes({kMagic, sizeof(kMagic)});
  w.put<std::uint32_t>(kVersion);
  w.put<std::uint64_t>(count);
  w.put<std::uint32_t>(kObsPlanes);
  w.put<std::uint32_t>(kBoardSize);
  w.put<std::uint32_t>(kBoardSize);
}

void put_sample(ByteWriter& w, const Sample& s) {
  w.put_span<float>(s.obs.data);
  w.put_span<float>(s.pi);
  w.put<float>(s.z);
  w.put<std::uint8_t>(s.agent_id);
  w.put<std::uint32_t>(s.episode_id);
  w.put<std::uint16_t>(s.step_index);
}

DatasetHeader get_header(StreamReader& r, const std::string& path) {
  if (r.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw FormatError(FormatErrorKind::BadMagic, path + " is not a PLRN file");
  }
  if (const auto v = r.get<std::uint32_t>(); v != kVersion) {
    throw FormatError(FormatErrorKind::BadVersion, "unsupported dataset version " + std::to_string(v));
  }
  DatasetHeader h;
  h.sample_count = r.get<std::uint64_t>();
  const auto planes = r.get<std::uint32_t>();
  const auto height = r.get<std::uint32_t>();
  const auto width = r.get<std::uint32_t>();
  if (planes != kObsPlanes || height != kBoardSize || width != kBoardSize) {
    throw FormatError(FormatErrorKind::ShapeMismatch, "observation shape " + std::to_string(planes) + "x" +
                                                          std::to_string(height) + "x" + std::to_string(width));
  }
  return h;
}

void check_sample(const Sample& s, std::uint64_t index) {
  const auto bad = [&](const std::string& what) {
    throw FormatError(FormatErrorKind::InvalidValue, "sample " + std::to_string(index) + ": " + what);
  };
  for (float x : s.obs.data) {
    if (!std::isfinite(x)) bad("non-finite observation");
  }
  double total = 0.0;
  for (float p : s.pi) {
    if (!std::isfinite(p) || p < 0.0f) bad("policy entry outside [0, inf)");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-4) bad("policy does not sum to 1");
  if (s.z != -1.0f && s.z != 0.0f && s.z != 1.0f) bad("value target not in {-1, 0, 1}");
  if (s.agent_id >= kNumAgents) bad("agent id out of range");
}

}  // namespace

DatasetWriter::DatasetWriter(const std::string& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  ByteWriter w;
  put_header(w, 0);
  w.write_to(out_);
}

DatasetWriter::~DatasetWriter() {
  try {
    finish();
  } catch (...) {  // NOLINT(bugprone-empty-catch): destructors must not throw
  }
}

void DatasetWriter::append(const Sample& sample) { append(std::span<const Sample>(&sample, 1)); }

void DatasetWriter::append(std::span<const Sample> samples) {
  if (finished_) throw ContractViolation("DatasetWriter: append after finish");
  ByteWriter w;
  for (const Sample& s : samples) put_sample(w, s);
  w.write_to(out_);
  count_ += samples.size();
}

void DatasetWriter::finish() {
  if (finished_) return;
  finished_ = true;
  out_.seekp(kCountOffset);
  out_.write(reinterpret_cast<const char*>(&count_), sizeof(count_));
  out_.close();
  if (!out_) throw FormatError(FormatErrorKind::Io, "failed to finalize " + path_);
}

void write_dataset(std::span<const Sample> samples, const std::string& path) {
  DatasetWriter w(path);
  w.append(samples);
  w.finish();
}

std::vector<Sample> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  StreamReader r(in);
  const DatasetHeader h = get_header(r, path);
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(h.sample_count, 1u << 20)));
  for (std::uint64_t i = 0; i < h.sample_count; ++i) {
    Sample s;
    r.get_span<float>(s.obs.data);
    r.get_span<float>(s.pi);
    s.z = r.get<float>();
    s.agent_id = r.get<std::uint8_t>();
    s.episode_id = r.get<std::uint32_t>();
    s.step_index = r.get<std::uint16_t>();
    check_sample(s, i);
    out.push_back(s);
  }
  if (!r.at_eof()) {
    throw FormatError(FormatErrorKind::ShapeMismatch, "records beyond the header count of " +
                                                          std::to_string(h.sample_count));
  }
  return out;
}

DatasetHeader read_dataset_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  StreamReader r(in);
  return get_header(r, path);
}

}  // namespace pommer::dataset
