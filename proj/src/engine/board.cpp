#include <algorithm>
#include <queue>

#include "pommer/engine.hpp"
#include "pommer/rng.hpp"

namespace pommer {

const char* to_string(Action a) noexcept {
  switch (a) {
    case Action::Idle: return "idle";
    case Action::Up: return "up";
    case Action::Down: return "down";
    case Action::Left: return "left";
    case Action::Right: return "right";
    case Action::PlaceBomb: return "bomb";
  }
  return "?";
}

std::optional<Action> parse_action(const std::string& name) {
  for (Action a : kAllActions) {
    if (name == to_string(a) || name == std::to_string(to_index(a))) return a;
  }
  return std::nullopt;
}

const char* to_string(AgentOutcome o) noexcept {
  switch (o) {
    case AgentOutcome::Loss: return "loss";
    case AgentOutcome::Draw: return "draw";
    case AgentOutcome::Win: return "win";
    case AgentOutcome::Ongoing: return "ongoing";
  }
  return "?";
}

int outcome_value(AgentOutcome o) {
  if (o == AgentOutcome::Ongoing) throw ContractViolation("outcome_value: episode still ongoing");
  return static_cast<int>(o);
}

const Bomb* GameState::bomb_at(Position p) const noexcept {
  for (const auto& b : bombs) {
    if (b.pos == p) return &b;
  }
  return nullptr;
}

const Flame* GameState::flame_at(Position p) const noexcept {
  for (const auto& f : flames) {
    if (f.pos == p) return &f;
  }
  return nullptr;
}

std::optional<AgentId> GameState::agent_at(Position p) const noexcept {
  for (AgentId i = 0; i < kNumAgents; ++i) {
    if (agents[i].alive && agents[i].pos == p) return i;
  }
  return std::nullopt;
}

int GameState::alive_count() const noexcept {
  return static_cast<int>(std::count_if(agents.begin(), agents.end(), [](const auto& a) { return a.alive; }));
}

int GameState::bombs_owned_by(AgentId id) const noexcept {
  return static_cast<int>(std::count_if(bombs.begin(), bombs.end(), [id](const Bomb& b) { return b.owner == id; }));
}

std::array<AgentId, kNumAgents - 1> opponents_of(AgentId self) noexcept {
  std::array<AgentId, kNumAgents - 1> out{};
  int k = 0;
  for (AgentId i = 0; i < kNumAgents; ++i) {
    if (i != self) out[k++] = i;
  }
  return out;
}

GameState without_hidden_items(const GameState& state) {
  GameState s = state;
  s.hidden_items.fill(CellKind::Passage);
  return s;
}

namespace {

constexpr Position rotate_cw(Position p) noexcept { return {p.col, kBoardSize - 1 - p.row}; }

int ring_of(Position p) noexcept {
  return std::min({static_cast<int>(p.row), static_cast<int>(p.col), kBoardSize - 1 - p.row,
                   kBoardSize - 1 - p.col});
}

bool is_start_area(Position p) noexcept {
  for (Position s : kStartPositions) {
    if (manhattan(p, s) == 0) return true;
    // the two neighbours of the start that lie on the inner ring
    if (manhattan(p, s) == 1 && ring_of(p) == 1) return true;
  }
  return false;
}

using Orbit = std::array<Position, 4>;

std::vector<Orbit> rotation_orbits() {
  std::vector<Orbit> orbits;
  std::array<bool, kNumCells> seen{};
  const Position center{kBoardSize / 2, kBoardSize / 2};
  for (int i = 0; i < kNumCells; ++i) {
    Position p = Position::from_index(i);
    if (seen[i] || p == center) continue;
    Orbit o{};
    for (int k = 0; k < 4; ++k) {
      o[k] = p;
      seen[p.index()] = true;
      p = rotate_cw(p);
    }
    orbits.push_back(o);
  }
  return orbits;
}

// Cells reachable from `from` through non-rigid cells.
std::array<bool, kNumCells> reachable_non_rigid(const GameState& s, Position from) {
  std::array<bool, kNumCells> seen{};
  std::queue<Position> q;
  q.push(from);
  seen[from.index()] = true;
  while (!q.empty()) {
    const Position p = q.front();
    q.pop();
    for (Action d : kDirections) {
      const Position n = offset(p, d);
      if (!n.in_bounds() || seen[n.index()] || s.cell(n) == CellKind::Rigid) continue;
      seen[n.index()] = true;
      q.push(n);
    }
  }
  return seen;
}

void repair_connectivity(GameState& s) {
  for (;;) {
    const auto seen = reachable_non_rigid(s, kStartPositions[0]);
    if (std::all_of(kStartPositions.begin(), kStartPositions.end(),
                    [&](Position p) { return seen[p.index()]; })) {
      return;
    }
    // Turn the first rigid cell bordering the reachable region (and its
    // rotation orbit) into wood.
    bool converted = false;
    for (int i = 0; i < kNumCells && !converted; ++i) {
      const Position p = Position::from_index(i);
      if (s.cell(p) != CellKind::Rigid) continue;
      for (Action d : kDirections) {
        const Position n = offset(p, d);
        if (n.in_bounds() && seen[n.index()]) {
          Position q = p;
          for (int k = 0; k < 4; ++k, q = rotate_cw(q)) {
            if (s.cell(q) == CellKind::Rigid) s.cell(q) = CellKind::Wood;
          }
          converted = true;
          break;
        }
      }
    }
    if (!converted) return;  // unreachable: the inner ring is always open
  }
}

}  // namespace

GameState generate_board(std::uint64_t seed) {
  SplitMix64 rng(mix64(seed ^ 0x5eedb0a4d0000000ULL));
  GameState s;
  s.grid.fill(CellKind::Passage);
  s.hidden_items.fill(CellKind::Passage);

  auto orbits = rotation_orbits();
  // Fisher-Yates with the explicit generator keeps the layout identical across
  // standard library implementations.
  for (std::size_t i = orbits.size(); i > 1; --i) {
    std::swap(orbits[i - 1], orbits[rng.below(i)]);
  }

  int rigid = 0;
  int wood = 0;
  std::vector<bool> used(orbits.size(), false);
  for (std::size_t i = 0; i < orbits.size() && rigid < kRigidTarget; ++i) {
    const Position rep = orbits[i][0];
    if (ring_of(rep) == 1 || is_start_area(rep)) continue;
    for (Position p : orbits[i]) s.cell(p) = CellKind::Rigid;
    rigid += 4;
    used[i] = true;
  }
  for (std::size_t i = 0; i < orbits.size() && wood < kWoodTarget; ++i) {
    if (used[i] || is_start_area(orbits[i][0])) continue;
    for (Position p : orbits[i]) s.cell(p) = CellKind::Wood;
    wood += 4;
    used[i] = true;
  }
  repair_connectivity(s);

  for (int i = 0; i < kNumCells; ++i) {
    if (s.grid[i] != CellKind::Wood) continue;
    if (rng.uniform() < kItemFraction) {
      static constexpr std::array<CellKind, 3> kItems = {CellKind::ItemExtraBomb, CellKind::ItemIncrRange,
                                                         CellKind::ItemKick};
      s.hidden_items[i] = kItems[rng.below(kItems.size())];
    }
  }

  for (AgentId id = 0; id < kNumAgents; ++id) {
    AgentState& a = s.agents[id];
    a = AgentState{};
    a.pos = kStartPositions[id];
  }
  return s;
}

bool is_terminal(const GameState& state) noexcept {
  return state.alive_count() <= 1 || state.step_count >= kMaxSteps;
}

AgentOutcome agent_result(const GameState& state, AgentId id) {
  if (id < 0 || id >= kNumAgents) throw ContractViolation("agent_result: agent id out of range");
  const AgentState& a = state.agents[id];
  const int alive = state.alive_count();
  if (!is_terminal(state)) return a.alive ? AgentOutcome::Ongoing : AgentOutcome::Loss;
  if (alive == 1) return a.alive ? AgentOutcome::Win : AgentOutcome::Loss;
  if (alive == 0) {
    // everyone still standing died together in the final tick
    return a.death_step == state.step_count ? AgentOutcome::Draw : AgentOutcome::Loss;
  }
  return a.alive ? AgentOutcome::Draw : AgentOutcome::Loss;
}

}  // namespace pommer
