#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include "pommer/binary_io.hpp"
#include "pommer/dataset.hpp"
#include "pommer/rng.hpp"
#include "test_states.hpp"

using namespace pommer;
using namespace pommer::dataset;
using namespace pommer::testing;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pommer_dataset_" + name)).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

FormatErrorKind read_error(const std::string& path) {
  try {
    read_dataset(path);
  } catch (const FormatError& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return FormatErrorKind::Io;
}

template <class T>
void poke(std::string& bytes, std::size_t offset, T value) {
  std::memcpy(bytes.data() + offset, &value, sizeof(T));
}

std::vector<Sample> random_samples(std::size_t n, std::uint64_t seed) {
  std::vector<Sample> out;
  SplitMix64 rng(seed);
  std::vector<GameState> states;
  play_simple(seed, 120, [&](const GameState&, const GameState& next) { states.push_back(next); });
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    const auto id = static_cast<AgentId>(rng.below(kNumAgents));
    s.obs = encode_observation(states[i % states.size()], id);
    float total = 0.0f;
    for (float& p : s.pi) total += p = static_cast<float>(rng.uniform());
    for (float& p : s.pi) p /= total;
    s.z = static_cast<float>(static_cast<int>(rng.below(3)) - 1);
    s.agent_id = static_cast<std::uint8_t>(id);
    s.episode_id = static_cast<std::uint32_t>(rng.below(1u << 31));
    s.step_index = static_cast<std::uint16_t>(i % 801);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("symmetry group") {
  const auto all = Symmetry::all();
  std::set<int> indices;
  for (Symmetry g : all) indices.insert(g.index());
  CHECK(indices.size() == 8);

  for (Symmetry a : all) {
    CHECK(a * a.inverse() == Symmetry::identity());
    CHECK(a.inverse() * a == Symmetry::identity());
    for (Symmetry b : all) {
      const Symmetry ab = a * b;
      CHECK(std::find(all.begin(), all.end(), ab) != all.end());
      for (int r = 0; r < kBoardSize; ++r) {
        for (int c = 0; c < kBoardSize; ++c) {
          const Position p(r, c);
          CHECK(ab.apply(p) == a.apply(b.apply(p)));
        }
      }
      for (Action act : kAllActions) CHECK(ab.apply(act) == a.apply(b.apply(act)));
    }
    // moving then transforming equals transforming then moving the mapped direction
    for (Action m : kDirections) {
      const Position p(4, 7);
      CHECK(a.apply(offset(p, m)) == offset(a.apply(p), a.apply(m)));
    }
    CHECK(a.apply(Action::Idle) == Action::Idle);
    CHECK(a.apply(Action::PlaceBomb) == Action::PlaceBomb);
  }
}

TEST_CASE("symmetry examples") {
  const Symmetry rot(1, false);
  CHECK(rot.apply(Position(0, 0)) == Position(0, 10));
  CHECK(rot.apply(Position(2, 3)) == Position(3, 8));
  CHECK(rot.apply(Action::Up) == Action::Right);
  CHECK(rot.apply(Action::Right) == Action::Down);
  CHECK(rot.apply(Action::Down) == Action::Left);
  CHECK(rot.apply(Action::Left) == Action::Up);

  const Symmetry mirror(0, true);
  CHECK(mirror.apply(Position(2, 3)) == Position(2, 7));
  CHECK(mirror.apply(Action::Left) == Action::Right);
  CHECK(mirror.apply(Action::Up) == Action::Up);

  // mirror first, then rotate
  CHECK(Symmetry(1, true).apply(Position(2, 3)) == rot.apply(mirror.apply(Position(2, 3))));
  CHECK(Symmetry(4, false) == Symmetry::identity());

  const std::array<float, kNumActions> up{0, 1, 0, 0, 0, 0};
  const std::array<float, kNumActions> right{0, 0, 0, 0, 1, 0};
  CHECK(transform_policy(up, rot) == right);
  const std::array<float, kNumActions> pi{0.1f, 0.2f, 0.3f, 0.15f, 0.05f, 0.2f};
  for (Symmetry g : Symmetry::all()) {
    const auto t = transform_policy(pi, g);
    for (Action a : kAllActions) CHECK(t[to_index(g.apply(a))] == pi[to_index(a)]);
  }
}

TEST_CASE("augmentation round-trips and keeps broadcast planes") {
  const auto samples = random_samples(50, 3);
  for (const Sample& s : samples) {
    for (Symmetry g : Symmetry::all()) {
      const Sample t = augment(s, g);
      CHECK(augment(t, g.inverse()) == s);
      CHECK(t.z == s.z);
      CHECK(t.agent_id == s.agent_id);
      for (int p = 0; p < kObsPlanes; ++p) {
        if (!plane::is_broadcast(p)) continue;
        const auto a = s.obs.plane_span(p);
        const auto b = t.obs.plane_span(p);
        CHECK(std::equal(a.begin(), a.end(), b.begin()));
      }
      for (int r = 0; r < kBoardSize; ++r) {
        for (int c = 0; c < kBoardSize; ++c) {
          const Position q = g.apply(Position(r, c));
          CHECK(t.obs.at(plane::kRigid, q.row, q.col) == s.obs.at(plane::kRigid, r, c));
        }
      }
    }
  }
}

TEST_CASE("encoding commutes with board symmetries") {
  int checked = 0;
  play_simple(8, 200, [&](const GameState&, const GameState& s) {
    if (s.step_count % 10 != 0) return;
    for (Symmetry g : Symmetry::all()) {
      for (AgentId id = 0; id < kNumAgents; ++id) {
        CHECK(encode_observation(transform(s, g), id) == transform(encode_observation(s, id), g));
        ++checked;
      }
    }
  });
  CHECK(checked > 100);
}

TEST_CASE("dynamics commute with board symmetries on movement") {
  SplitMix64 rng(44);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    GameState s = generate_board(seed);
    for (int t = 0; t < 60 && !is_terminal(s); ++t) {
      JointAction joint{};
      for (AgentId id = 0; id < kNumAgents; ++id) joint[id] = kDirections[rng.below(4)];
      for (Symmetry g : Symmetry::all()) {
        JointAction mapped = joint;
        for (Action& a : mapped) a = g.apply(a);
        CHECK(step(transform(s, g), mapped) == transform(step(s, joint), g));
        ++checked;
      }
      s = step(s, joint);
    }
  }
  CHECK(checked > 5000);
}

TEST_CASE("episode outcomes") {
  GameState s = open_board();
  CHECK_THROWS_AS(episode_outcomes(s), ContractViolation);

  kill(s, 1, 3);
  kill(s, 2, 7);
  kill(s, 3, 9);
  s.step_count = 9;
  CHECK(episode_outcomes(s) == std::array<float, 4>{1, -1, -1, -1});

  GameState draw = open_board();
  kill(draw, 0, 12);
  kill(draw, 1, 12);
  kill(draw, 2, 5);
  kill(draw, 3, 12);
  draw.step_count = 12;
  CHECK(episode_outcomes(draw) == std::array<float, 4>{0, 0, -1, 0});

  GameState timeout = open_board();
  kill(timeout, 2, 100);
  timeout.step_count = kMaxSteps;
  CHECK(episode_outcomes(timeout) == std::array<float, 4>{0, 0, -1, 0});

  auto samples = random_samples(8, 5);
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].agent_id = static_cast<std::uint8_t>(i % 4);
  assign_outcomes(samples, s);
  for (const Sample& x : samples) CHECK(x.z == (x.agent_id == 0 ? 1.0f : -1.0f));
}

TEST_CASE("dataset files round-trip bit-exactly") {
  const auto samples = random_samples(1000, 11);
  const std::string path = temp_path("roundtrip.plrn");
  write_dataset(samples, path);
  const std::string bytes = read_file(path);
  CHECK(bytes.size() == kHeaderBytes + samples.size() * kSampleBytes);
  CHECK(bytes.substr(0, 4) == "PLRN");
  CHECK(read_dataset_header(path).sample_count == 1000);

  const auto back = read_dataset(path);
  REQUIRE(back.size() == samples.size());
  CHECK(back == samples);
  const std::string again = temp_path("roundtrip2.plrn");
  write_dataset(back, again);
  CHECK(read_file(again) == bytes);

  SUBCASE("streaming writer patches the count") {
    const std::string streamed = temp_path("streamed.plrn");
    {
      DatasetWriter w(streamed);
      for (std::size_t i = 0; i < samples.size(); i += 100) {
        w.append(std::span<const Sample>(samples).subspan(i, 100));
      }
      CHECK(w.count() == 1000);
    }
    CHECK(read_file(streamed) == bytes);
  }
  SUBCASE("empty dataset") {
    const std::string empty = temp_path("empty.plrn");
    write_dataset({}, empty);
    CHECK(read_file(empty).size() == kHeaderBytes);
    CHECK(read_dataset(empty).empty());
  }
}

TEST_CASE("corrupt dataset files are rejected") {
  const auto samples = random_samples(5, 12);
  const std::string path = temp_path("corrupt.plrn");
  write_dataset(samples, path);
  const std::string good = read_file(path);
  const std::string bad = temp_path("bad.plrn");
  const std::size_t record0 = kHeaderBytes;
  const std::size_t pi0 = record0 + kObsPlanes * kNumCells * 4;
  const std::size_t z0 = pi0 + kNumActions * 4;

  const auto expect = [&](std::string bytes, FormatErrorKind kind) {
    write_file(bad, bytes);
    CHECK(read_error(bad) == kind);
  };
  std::string b = good;
  b[0] = 'X';
  expect(b, FormatErrorKind::BadMagic);
  b = good;
  poke<std::uint32_t>(b, 4, 2);
  expect(b, FormatErrorKind::BadVersion);
  b = good;
  poke<std::uint32_t>(b, 16, 22);
  expect(b, FormatErrorKind::ShapeMismatch);
  b = good;
  poke<std::uint32_t>(b, 24, 9);
  expect(b, FormatErrorKind::ShapeMismatch);
  b = good;
  poke<std::uint64_t>(b, 8, 4);
  expect(b, FormatErrorKind::ShapeMismatch);
  b = good;
  poke<std::uint64_t>(b, 8, 6);
  expect(b, FormatErrorKind::Truncated);
  expect(good.substr(0, good.size() - 1), FormatErrorKind::Truncated);
  expect(good.substr(0, 10), FormatErrorKind::Truncated);
  b = good;
  poke<float>(b, pi0, 5.0f);
  expect(b, FormatErrorKind::InvalidValue);
  b = good;
  poke<float>(b, z0, 0.5f);
  expect(b, FormatErrorKind::InvalidValue);
  b = good;
  poke<std::uint8_t>(b, z0 + 4, 4);
  expect(b, FormatErrorKind::InvalidValue);
  b = good;
  poke<float>(b, record0, std::numeric_limits<float>::quiet_NaN());
  expect(b, FormatErrorKind::InvalidValue);

  CHECK(read_error(temp_path("missing.plrn")) == FormatErrorKind::Io);
}
