#pragma once

// Training samples, the PLRN container, value targets and board symmetries.

#include <array>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "pommer/engine.hpp"

namespace pommer::dataset {

struct Sample {
  ObservationPlanes obs;
  std::array<float, kNumActions> pi{};
  float z = 0.0f;
  std::uint8_t agent_id = 0;
  std::uint32_t episode_id = 0;
  std::uint16_t step_index = 0;

  bool operator==(const Sample&) const = default;
};

/// Element of the dihedral group of the square: an optional left-right
/// mirror followed by 0-3 clockwise quarter turns.
class Symmetry {
 public:
  constexpr Symmetry() = default;
  constexpr Symmetry(int quarter_turns, bool mirrored) : turns_((quarter_turns % 4 + 4) % 4), mirrored_(mirrored) {}

  static constexpr Symmetry identity() { return {}; }
  static std::array<Symmetry, 8> all();

  int quarter_turns() const noexcept { return turns_; }
  bool mirrored() const noexcept { return mirrored_; }
  /// 0-3 rotations, 4-7 mirrored rotations.
  int index() const noexcept { return turns_ + (mirrored_ ? 4 : 0); }

  Position apply(Position p) const noexcept;
  Action apply(Action a) const noexcept;
  Symmetry inverse() const noexcept;
  /// (a * b) applies b first, then a.
  friend Symmetry operator*(Symmetry a, Symmetry b) noexcept;

  constexpr bool operator==(const Symmetry&) const = default;

 private:
  int turns_ = 0;
  bool mirrored_ = false;
};

/// Spatial planes are moved; broadcast planes are left alone.
ObservationPlanes transform(const ObservationPlanes& obs, Symmetry g);
GameState transform(const GameState& state, Symmetry g);
/// pi'[g(a)] = pi[a].
std::array<float, kNumActions> transform_policy(const std::array<float, kNumActions>& pi, Symmetry g);
Sample augment(const Sample& sample, Symmetry g);

/// Outcome value of every agent in a finished episode. Throws
/// ContractViolation on a non-terminal state.
std::array<float, kNumAgents> episode_outcomes(const GameState& final_state);
/// Sets z of every sample to its agent's outcome.
void assign_outcomes(std::span<Sample> samples, const GameState& final_state);

struct DatasetHeader {
  std::uint64_t sample_count = 0;
};

/// Streams samples to disk; the header count is patched on finish().
class DatasetWriter {
 public:
  explicit DatasetWriter(const std::string& path);
  ~DatasetWriter();
  DatasetWriter(const DatasetWriter&) = delete;
  DatasetWriter& operator=(const DatasetWriter&) = delete;

  void append(const Sample& sample);
  void append(std::span<const Sample> samples);
  void finish();
  std::uint64_t count() const noexcept { return count_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::uint64_t count_ = 0;
  bool finished_ = false;
};

void write_dataset(std::span<const Sample> samples, const std::string& path);
/// Throws FormatError; never returns a partial result.
std::vector<Sample> read_dataset(const std::string& path);
DatasetHeader read_dataset_header(const std::string& path);

/// Bytes per record and header size.
inline constexpr std::size_t kSampleBytes = (kObsPlanes * kNumCells + kNumActions + 1) * 4 + 1 + 4 + 2;
inline constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 4 * 3;

}  // namespace pommer::dataset
