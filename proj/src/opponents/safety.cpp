#include "navigation.hpp"
#include "pommer/opponents.hpp"

namespace pommer {

namespace detail {

bool walkable(const GameState& s, Position p, AgentId self) noexcept {
  const CellKind k = s.cell(p);
  if (k == CellKind::Rigid || k == CellKind::Wood) return false;
  if (s.bomb_at(p) != nullptr || s.flame_at(p) != nullptr) return false;
  const auto occupant = s.agent_at(p);
  return !occupant.has_value() || *occupant == self;
}

Position destination(const GameState& s, AgentId id, Action a) noexcept {
  const Position from = s.agents[id].pos;
  if (!is_move(a)) return from;
  const Position to = offset(from, a);
  if (!to.in_bounds()) return from;
  const CellKind k = s.cell(to);
  if (k == CellKind::Rigid || k == CellKind::Wood || s.bomb_at(to) != nullptr) return from;
  return to;
}

bool has_escape_after_bomb(const GameState& s, AgentId self, const std::array<Action, 4>& order) {
  const AgentState& a = s.agents[self];
  GameState with_bomb = s;
  with_bomb.bombs.push_back(Bomb{a.pos, static_cast<std::uint8_t>(self), kBombFuse, a.blast_strength, Action::Idle});
  const BlastMap blast = blast_map(with_bomb, kDangerHorizon + kFlameLifetime);
  // the agent may leave its own bomb's cell, so search from the original state
  const auto path = search_path(s, self, blast, order, kBombFuse - 1, false, [&](Position p) {
    return p != a.pos && walkable(s, p, self) && !blast.at(p).has_value();
  });
  return path.has_value();
}

}  // namespace detail

ActionSet safe_actions(const GameState& state, AgentId id) {
  return safe_actions(state, id, blast_map(state, kDangerHorizon));
}

ActionSet safe_actions(const GameState& state, AgentId id, const BlastMap& blast) {
  const AgentState& agent = state.agents[id];
  const auto explodes_next = [&](Position p) {
    const auto t = blast.at(p);
    return t.has_value() && *t == 1;
  };

  ActionSet keep;
  bool safe_move_exists = false;
  for (Action a : kAllActions) {
    if (a == Action::PlaceBomb && agent.ammo == 0) continue;
    const Position dest = detail::destination(state, id, a);
    if (dest != agent.pos) {
      if (state.flame_at(dest) != nullptr || explodes_next(dest)) continue;
      safe_move_exists = true;
    }
    keep.insert(a);
  }
  if (explodes_next(agent.pos) && safe_move_exists) {
    for (Action a : kAllActions) {
      if (detail::destination(state, id, a) == agent.pos) keep.erase(a);
    }
  }
  // dropping a bomb with no way out of its blast is never safe
  if (keep.contains(Action::PlaceBomb) &&
      (state.bomb_at(agent.pos) != nullptr || !detail::has_escape_after_bomb(state, id, kDirections))) {
    keep.erase(Action::PlaceBomb);
  }
  return keep.empty() ? ActionSet::all() : keep;
}

}  // namespace pommer
