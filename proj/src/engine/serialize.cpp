#include <algorithm>
#include <cstring>
#include <fstream>

#include "pommer/binary_io.hpp"
#include "pommer/engine.hpp"
#include "pommer/rng.hpp"

namespace pommer {

namespace {

constexpr char kReplayMagic[4] = {'P', 'R', 'E', 'P'};
constexpr std::uint32_t kReplayVersion = 1;

void put_pos(ByteWriter& w, Position p) {
  w.put<std::uint8_t>(static_cast<std::uint8_t>(p.row));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(p.col));
}

// Bounds-checked cursor over a byte span.
class SpanReader {
 public:
  explicit SpanReader(std::span<const std::uint8_t> b) : bytes_(b) {}

  template <class T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw FormatError(FormatErrorKind::Truncated, "state bytes too short");
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  Position get_pos() {
    const int r = get<std::uint8_t>();
    const int c = get<std::uint8_t>();
    Position p{r, c};
    if (!p.in_bounds()) throw FormatError(FormatErrorKind::InvalidValue, "position out of bounds");
    return p;
  }
  bool done() const noexcept { return pos_ == bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

CellKind get_cell(SpanReader& r) {
  const auto v = r.get<std::uint8_t>();
  if (v > static_cast<std::uint8_t>(CellKind::ItemKick)) {
    throw FormatError(FormatErrorKind::InvalidValue, "bad cell kind");
  }
  return static_cast<CellKind>(v);
}

}  // namespace

std::vector<std::uint8_t> serialize(const GameState& state) {
  ByteWriter w;
  for (CellKind k : state.grid) w.put<std::uint8_t>(static_cast<std::uint8_t>(k));
  for (CellKind k : state.hidden_items) w.put<std::uint8_t>(static_cast<std::uint8_t>(k));

  auto bombs = state.bombs;
  std::sort(bombs.begin(), bombs.end(), [](const Bomb& a, const Bomb& b) { return a.pos < b.pos; });
  w.put<std::uint16_t>(static_cast<std::uint16_t>(bombs.size()));
  for (const Bomb& b : bombs) {
    put_pos(w, b.pos);
    w.put<std::uint8_t>(b.owner);
    w.put<std::uint8_t>(b.countdown);
    w.put<std::uint8_t>(b.blast_strength);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(b.moving_dir));
  }

  auto flames = state.flames;
  std::sort(flames.begin(), flames.end(), [](const Flame& a, const Flame& b) { return a.pos < b.pos; });
  w.put<std::uint16_t>(static_cast<std::uint16_t>(flames.size()));
  for (const Flame& f : flames) {
    put_pos(w, f.pos);
    w.put<std::uint8_t>(f.ttl);
  }

  for (const AgentState& a : state.agents) {
    put_pos(w, a.pos);
    w.put<std::uint8_t>(a.alive ? 1 : 0);
    w.put<std::uint8_t>(a.ammo);
    w.put<std::uint8_t>(a.max_bombs);
    w.put<std::uint8_t>(a.blast_strength);
    w.put<std::uint8_t>(a.can_kick ? 1 : 0);
    w.put<std::int16_t>(a.death_step);
  }
  w.put<std::uint16_t>(static_cast<std::uint16_t>(state.step_count));
  return w.take();
}

GameState deserialize(std::span<const std::uint8_t> bytes) {
  SpanReader r(bytes);
  GameState s;
  for (auto& k : s.grid) k = get_cell(r);
  for (auto& k : s.hidden_items) k = get_cell(r);
  const auto nb = r.get<std::uint16_t>();
  for (int i = 0; i < nb; ++i) {
    Bomb b;
    b.pos = r.get_pos();
    b.owner = r.get<std::uint8_t>();
    b.countdown = r.get<std::uint8_t>();
    b.blast_strength = r.get<std::uint8_t>();
    b.moving_dir = static_cast<Action>(r.get<std::uint8_t>());
    if (b.owner >= kNumAgents || b.moving_dir > Action::Right) {
      throw FormatError(FormatErrorKind::InvalidValue, "bad bomb record");
    }
    s.bombs.push_back(b);
  }
  const auto nf = r.get<std::uint16_t>();
  for (int i = 0; i < nf; ++i) {
    Flame f;
    f.pos = r.get_pos();
    f.ttl = r.get<std::uint8_t>();
    s.flames.push_back(f);
  }
  for (auto& a : s.agents) {
    a.pos = r.get_pos();
    a.alive = r.get<std::uint8_t>() != 0;
    a.ammo = r.get<std::uint8_t>();
    a.max_bombs = r.get<std::uint8_t>();
    a.blast_strength = r.get<std::uint8_t>();
    a.can_kick = r.get<std::uint8_t>() != 0;
    a.death_step = r.get<std::int16_t>();
  }
  s.step_count = r.get<std::uint16_t>();
  if (!r.done()) throw FormatError(FormatErrorKind::InvalidValue, "trailing bytes after state");
  return s;
}

std::uint64_t state_hash(const GameState& state) {
  const auto bytes = serialize(state);
  std::uint64_t h = mix64(0x706f6d6d65726861ULL ^ bytes.size());
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    std::uint64_t word;
    std::memcpy(&word, bytes.data() + i, 8);
    h = mix_combine(h, word);
  }
  std::uint64_t tail = 0;
  std::memcpy(&tail, bytes.data() + i, bytes.size() - i);
  return mix_combine(h, tail ^ (static_cast<std::uint64_t>(bytes.size() - i) << 56));
}

void write_replay(const Replay& replay, const std::string& path) {
  ByteWriter w;
  w.put_bytes({kReplayMagic, 4});
  w.put<std::uint32_t>(kReplayVersion);
  w.put<std::uint64_t>(replay.seed);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(replay.actions.size()));
  for (const JointAction& ja : replay.actions) {
    for (Action a : ja) w.put<std::uint8_t>(static_cast<std::uint8_t>(a));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  w.write_to(out);
}

Replay read_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  StreamReader r(in);
  if (r.get_string(4) != std::string(kReplayMagic, 4)) throw FormatError(FormatErrorKind::BadMagic, path);
  if (r.get<std::uint32_t>() != kReplayVersion) throw FormatError(FormatErrorKind::BadVersion, path);
  Replay replay;
  replay.seed = r.get<std::uint64_t>();
  const auto steps = r.get<std::uint32_t>();
  if (steps > kMaxSteps) throw FormatError(FormatErrorKind::ShapeMismatch, "replay longer than the step limit");
  replay.actions.resize(steps);
  for (auto& ja : replay.actions) {
    for (auto& a : ja) {
      const auto v = r.get<std::uint8_t>();
      if (v >= kNumActions) throw FormatError(FormatErrorKind::InvalidValue, "bad action byte");
      a = static_cast<Action>(v);
    }
  }
  return replay;
}

std::vector<GameState> replay_states(const Replay& replay) {
  std::vector<GameState> states;
  states.reserve(replay.actions.size() + 1);
  states.push_back(generate_board(replay.seed));
  for (const JointAction& ja : replay.actions) states.push_back(step(states.back(), ja));
  return states;
}

}  // namespace pommer
