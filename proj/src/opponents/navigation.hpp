#pragma once

// Grid search helpers shared by the action filter and the scripted agent.

#include <array>
#include <optional>

#include "pommer/engine.hpp"

namespace pommer::detail {

/// Cell an agent can stand on right now: not Rigid/Wood, no bomb, no fire,
/// no other living agent.
bool walkable(const GameState& s, Position p, AgentId self) noexcept;

/// Where `a` actually leaves the agent if nobody else interferes.
Position destination(const GameState& s, AgentId id, Action a) noexcept;

struct PathStep {
  Action first = Action::Idle;
  int distance = 0;
};

/// Breadth-first search from the agent's cell in the given neighbour order.
/// A cell entered at distance d must not be burning at tick d. Returns the
/// first move toward the nearest cell satisfying `goal` (distance 0 if the
/// start already does).
template <class Goal>
std::optional<PathStep> search_path(const GameState& s, AgentId self, const BlastMap& blast,
                                    const std::array<Action, 4>& order, int max_distance, bool avoid_danger,
                                    Goal&& goal);

/// True if after dropping a bomb on its cell the agent can still reach a cell
/// outside every future blast.
bool has_escape_after_bomb(const GameState& s, AgentId self, const std::array<Action, 4>& order);

// --- implementation ---------------------------------------------------------

template <class Goal>
std::optional<PathStep> search_path(const GameState& s, AgentId self, const BlastMap& blast,
                                    const std::array<Action, 4>& order, int max_distance, bool avoid_danger,
                                    Goal&& goal) {
  const Position start = s.agents[self].pos;
  if (goal(start)) return PathStep{Action::Idle, 0};
  std::array<std::int16_t, kNumCells> dist;
  std::array<Action, kNumCells> first;
  dist.fill(-1);
  std::array<Position, kNumCells> queue;
  int head = 0;
  int tail = 0;
  queue[tail++] = start;
  dist[start.index()] = 0;
  first[start.index()] = Action::Idle;
  while (head < tail) {
    const Position p = queue[head++];
    const int d = dist[p.index()];
    if (d >= max_distance) continue;
    for (Action dir : order) {
      const Position n = offset(p, dir);
      if (!n.in_bounds() || dist[n.index()] >= 0) continue;
      const bool reached_goal = goal(n);
      const bool can_enter = walkable(s, n, self) && !blast.burning_at(n, d + 1) &&
                             !(avoid_danger && blast.at(n).has_value());
      if (!can_enter && !reached_goal) continue;
      dist[n.index()] = static_cast<std::int16_t>(d + 1);
      first[n.index()] = d == 0 ? dir : first[p.index()];
      if (reached_goal) return PathStep{first[n.index()], d + 1};
      queue[tail++] = n;
    }
  }
  return std::nullopt;
}

}  // namespace pommer::detail
