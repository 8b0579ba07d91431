#pragma once

// Deterministic four-player free-for-all bomber game.
//
// Every operation here is a pure function of its arguments. A GameState is
// a plain value: copy it freely, share it between threads, compare it with ==.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pommer {

inline constexpr int kBoardSize = 11;
inline constexpr int kNumCells = kBoardSize * kBoardSize;
inline constexpr int kNumAgents = 4;
inline constexpr int kNumActions = 6;
inline constexpr int kMaxSteps = 800;
inline constexpr int kBombFuse = 10;
inline constexpr int kFlameLifetime = 2;
inline constexpr int kInitialBlastStrength = 2;
inline constexpr int kInitialMaxBombs = 1;
inline constexpr int kRigidTarget = 36;
inline constexpr int kWoodTarget = 36;
inline constexpr double kItemFraction = 0.5;

using AgentId = int;

/// Raised when a caller breaks an operation's precondition (e.g. stepping a
/// terminal state). Not used for ordinary data errors.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Position {
  std::int8_t row = 0;
  std::int8_t col = 0;

  constexpr Position() = default;
  constexpr Position(int r, int c) : row(static_cast<std::int8_t>(r)), col(static_cast<std::int8_t>(c)) {}

  constexpr int index() const noexcept { return row * kBoardSize + col; }
  static constexpr Position from_index(int i) noexcept { return {i / kBoardSize, i % kBoardSize}; }
  constexpr bool in_bounds() const noexcept {
    return row >= 0 && row < kBoardSize && col >= 0 && col < kBoardSize;
  }

  constexpr bool operator==(const Position&) const = default;
  constexpr auto operator<=>(const Position&) const = default;
};

constexpr int manhattan(Position a, Position b) noexcept {
  const int dr = a.row - b.row;
  const int dc = a.col - b.col;
  return (dr < 0 ? -dr : dr) + (dc < 0 ? -dc : dc);
}

enum class CellKind : std::uint8_t { Passage = 0, Rigid, Wood, ItemExtraBomb, ItemIncrRange, ItemKick };

constexpr bool is_item(CellKind k) noexcept {
  return k == CellKind::ItemExtraBomb || k == CellKind::ItemIncrRange || k == CellKind::ItemKick;
}

enum class Action : std::uint8_t { Idle = 0, Up = 1, Down = 2, Left = 3, Right = 4, PlaceBomb = 5 };

inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Idle, Action::Up, Action::Down, Action::Left, Action::Right, Action::PlaceBomb};
inline constexpr std::array<Action, 4> kDirections = {Action::Up, Action::Down, Action::Left, Action::Right};

constexpr bool is_move(Action a) noexcept { return a >= Action::Up && a <= Action::Right; }
constexpr int to_index(Action a) noexcept { return static_cast<int>(a); }
constexpr Action action_from_index(int i) noexcept { return static_cast<Action>(i); }

/// Cell reached by moving one step in direction `a`; identity for non-moves.
constexpr Position offset(Position p, Action a) noexcept {
  switch (a) {
    case Action::Up: return {p.row - 1, p.col};
    case Action::Down: return {p.row + 1, p.col};
    case Action::Left: return {p.row, p.col - 1};
    case Action::Right: return {p.row, p.col + 1};
    default: return p;
  }
}

const char* to_string(Action a) noexcept;
std::optional<Action> parse_action(const std::string& name);

using JointAction = std::array<Action, kNumAgents>;

struct Bomb {
  Position pos;
  std::uint8_t owner = 0;
  std::uint8_t countdown = kBombFuse;
  std::uint8_t blast_strength = kInitialBlastStrength;
  Action moving_dir = Action::Idle;  // Idle: resting

  constexpr bool operator==(const Bomb&) const = default;
};

struct Flame {
  Position pos;
  std::uint8_t ttl = kFlameLifetime;

  constexpr bool operator==(const Flame&) const = default;
};

struct AgentState {
  Position pos;
  bool alive = true;
  std::uint8_t ammo = kInitialMaxBombs;
  std::uint8_t max_bombs = kInitialMaxBombs;
  std::uint8_t blast_strength = kInitialBlastStrength;
  bool can_kick = false;
  std::int16_t death_step = -1;  // step_count of the state in which it was first dead

  constexpr bool operator==(const AgentState&) const = default;
};

inline constexpr std::array<Position, kNumAgents> kStartPositions = {
    Position{1, 1}, Position{9, 1}, Position{9, 9}, Position{1, 9}};

/// Complete world state. Bombs and flames are kept sorted by position so
/// that equal worlds compare equal.
struct GameState {
  std::array<CellKind, kNumCells> grid{};
  std::vector<Bomb> bombs;
  std::vector<Flame> flames;
  std::array<AgentState, kNumAgents> agents{};
  int step_count = 0;
  /// Item under each wood cell; Passage means "no item".
  std::array<CellKind, kNumCells> hidden_items{};

  CellKind cell(Position p) const noexcept { return grid[p.index()]; }
  CellKind& cell(Position p) noexcept { return grid[p.index()]; }

  const Bomb* bomb_at(Position p) const noexcept;
  const Flame* flame_at(Position p) const noexcept;
  std::optional<AgentId> agent_at(Position p) const noexcept;
  int alive_count() const noexcept;
  int bombs_owned_by(AgentId id) const noexcept;

  bool operator==(const GameState&) const = default;
};

enum class AgentOutcome : std::int8_t { Loss = -1, Draw = 0, Win = 1, Ongoing = 2 };

/// Numeric value of a finished outcome: Win 1, Draw 0, Loss -1.
int outcome_value(AgentOutcome o);
const char* to_string(AgentOutcome o) noexcept;

GameState generate_board(std::uint64_t seed);

bool is_terminal(const GameState& state) noexcept;

/// Advances one tick. Throws ContractViolation on a terminal state.
GameState step(const GameState& state, const JointAction& actions);

AgentOutcome agent_result(const GameState& state, AgentId id);

/// Earliest tick offset (>= 1) at which a flame will cover each cell if
/// nobody acts, up to `horizon`. Bombs are treated as resting.
class BlastMap {
 public:
  BlastMap() { times_.fill(kAbsent); }

  std::optional<int> at(Position p) const noexcept {
    const auto t = times_[p.index()];
    return t == kAbsent ? std::nullopt : std::optional<int>(t);
  }
  bool covered_within(Position p, int horizon) const noexcept {
    const auto t = times_[p.index()];
    return t != kAbsent && t <= horizon;
  }
  /// True if a flame that appears at its blast time would still burn at `tick`.
  bool burning_at(Position p, int tick) const noexcept {
    const auto t = times_[p.index()];
    return t != kAbsent && t <= tick && tick < t + kFlameLifetime;
  }
  void set(Position p, int t) noexcept { times_[p.index()] = static_cast<std::int16_t>(t); }
  bool empty() const noexcept;

  bool operator==(const BlastMap&) const = default;

 private:
  static constexpr std::int16_t kAbsent = -1;
  std::array<std::int16_t, kNumCells> times_{};
};

BlastMap blast_map(const GameState& state, int horizon);

/// Cells covered by a bomb of the given strength at `origin` on `grid`:
/// the origin plus four arms of reach strength-1, stopping before Rigid and
/// at (including) the first Wood or item cell.
std::vector<Position> blast_cells(const std::array<CellKind, kNumCells>& grid, Position origin,
                                  int blast_strength);

inline constexpr int kObsPlanes = 23;

namespace plane {
inline constexpr int kRigid = 0;
inline constexpr int kWood = 1;
inline constexpr int kBomb = 2;
inline constexpr int kBombStrength = 3;
inline constexpr int kBombCountdown = 4;
inline constexpr int kFlame = 5;
inline constexpr int kItemExtraBomb = 6;
inline constexpr int kItemIncrRange = 7;
inline constexpr int kItemKick = 8;
inline constexpr int kSelf = 9;
inline constexpr int kOpponent0 = 10;  // 10..12, id order skipping self
inline constexpr int kSelfAmmo = 13;
inline constexpr int kSelfStrength = 14;
inline constexpr int kSelfKick = 15;
inline constexpr int kSelfMaxBombs = 16;
inline constexpr int kStep = 17;
inline constexpr int kOpponentAlive0 = 18;  // 18..20
inline constexpr int kOnes = 21;
inline constexpr int kPassage = 22;

/// Planes whose value does not depend on the cell.
constexpr bool is_broadcast(int p) noexcept { return p >= kSelfAmmo && p <= kOnes; }
}  // namespace plane

struct ObservationPlanes {
  std::array<float, kObsPlanes * kNumCells> data{};

  float at(int p, int row, int col) const noexcept { return data[p * kNumCells + row * kBoardSize + col]; }
  float& at(int p, int row, int col) noexcept { return data[p * kNumCells + row * kBoardSize + col]; }
  std::span<const float> plane_span(int p) const noexcept { return {data.data() + p * kNumCells, kNumCells}; }

  bool operator==(const ObservationPlanes&) const = default;
};

ObservationPlanes encode_observation(const GameState& state, AgentId id);

/// Opponent ids of `self` in ascending order.
std::array<AgentId, kNumAgents - 1> opponents_of(AgentId self) noexcept;

/// Fixed-order little-endian dump of the state.
std::vector<std::uint8_t> serialize(const GameState& state);
GameState deserialize(std::span<const std::uint8_t> bytes);

std::uint64_t state_hash(const GameState& state);

/// Board state with still-covered items removed: what an agent can see.
GameState without_hidden_items(const GameState& state);

/// Seed plus the joint action of every tick.
struct Replay {
  std::uint64_t seed = 0;
  std::vector<JointAction> actions;

  bool operator==(const Replay&) const = default;
};

void write_replay(const Replay& replay, const std::string& path);
Replay read_replay(const std::string& path);
/// Every state of the episode, starting with generate_board(seed).
std::vector<GameState> replay_states(const Replay& replay);

}  // namespace pommer
