// Scripted baseline agent. Decisions depend only on the board geometry and
// the explicit draws, never on the agent id, so mirrored seats play mirrored
// games.

#include "navigation.hpp"
#include "pommer/opponents.hpp"

namespace pommer {

namespace {

constexpr int kDangerThreshold = 3;
constexpr int kItemRadius = 10;
constexpr int kEnemyBombRadius = 3;
constexpr int kUnbounded = kNumCells;

bool is_enemy_cell(const GameState& s, Position p, AgentId self) {
  const auto who = s.agent_at(p);
  return who.has_value() && *who != self;
}

bool can_bomb(const GameState& s, AgentId self) {
  const AgentState& a = s.agents[self];
  return a.ammo > 0 && s.bomb_at(a.pos) == nullptr;
}

}  // namespace

HeuristicDraws draw_heuristic(SplitMix64& rng) {
  HeuristicDraws d;
  for (std::size_t i = d.direction_order.size(); i > 1; --i) {
    std::swap(d.direction_order[i - 1], d.direction_order[rng.below(i)]);
  }
  d.pick = rng();
  return d;
}

Action simple_decide(const GameState& state, AgentId id, const HeuristicDraws& draws) {
  const AgentState& me = state.agents[id];
  if (!me.alive) return Action::Idle;
  const auto& order = draws.direction_order;
  const BlastMap blast = blast_map(state, kDangerHorizon);
  const ActionSet safe = safe_actions(state, id, blast);

  // (1) flee an imminent blast
  if (blast.covered_within(me.pos, kDangerThreshold)) {
    const auto path = detail::search_path(state, id, blast, order, kUnbounded, false, [&](Position p) {
      return detail::walkable(state, p, id) && !blast.at(p).has_value();
    });
    if (path && path->distance > 0 && safe.contains(path->first)) return path->first;
  } else {
    // (2) collect a visible item
    const auto item = detail::search_path(state, id, blast, order, kItemRadius, true, [&](Position p) {
      return is_item(state.cell(p)) && detail::walkable(state, p, id) && !blast.at(p).has_value();
    });
    if (item && item->distance > 0 && safe.contains(item->first)) return item->first;

    // (3) bomb a nearby enemy, (4) bomb adjacent wood; both need a way out
    const bool bomb_ok = can_bomb(state, id) && safe.contains(Action::PlaceBomb);
    if (bomb_ok) {
      const auto enemy = detail::search_path(state, id, blast, order, kEnemyBombRadius, false,
                                             [&](Position p) { return is_enemy_cell(state, p, id); });
      bool next_to_wood = false;
      for (Action d : order) {
        const Position n = offset(me.pos, d);
        next_to_wood = next_to_wood || (n.in_bounds() && state.cell(n) == CellKind::Wood);
      }
      if ((enemy.has_value() || next_to_wood) && detail::has_escape_after_bomb(state, id, order)) {
        return Action::PlaceBomb;
      }
    }

    // (5) close in on the nearest enemy
    const auto hunt = detail::search_path(state, id, blast, order, kUnbounded, true,
                                          [&](Position p) { return is_enemy_cell(state, p, id); });
    if (hunt && hunt->distance > 1 && safe.contains(hunt->first)) return hunt->first;
  }

  // (6) anything safe, uniformly. A cell inside a pending blast is not safe
  // to linger on: walk out of it first, and otherwise avoid entering one.
  if (blast.at(me.pos).has_value()) {
    const auto out = detail::search_path(state, id, blast, order, kUnbounded, false, [&](Position p) {
      return detail::walkable(state, p, id) && !blast.at(p).has_value();
    });
    if (out && out->distance > 0 && safe.contains(out->first)) return out->first;
  }
  ActionSet pool;
  for (Action a : kAllActions) {
    if (safe.contains(a) && (a == Action::PlaceBomb || !blast.at(detail::destination(state, id, a)).has_value())) {
      pool.insert(a);
    }
  }
  if (pool.empty()) pool = safe;
  // candidates listed in draw order so rotated boards with rotated draws
  // pick rotated actions
  std::array<Action, kNumActions> candidates{};
  int n = 0;
  if (pool.contains(Action::Idle)) candidates[n++] = Action::Idle;
  for (Action d : order) {
    if (pool.contains(d)) candidates[n++] = d;
  }
  if (pool.contains(Action::PlaceBomb)) candidates[n++] = Action::PlaceBomb;
  return candidates[draws.pick % static_cast<std::uint64_t>(n)];
}

SimpleActResult simple_act(const GameState& state, AgentId id, SplitMix64 rng) {
  const HeuristicDraws draws = draw_heuristic(rng);
  return {simple_decide(state, id, draws), rng};
}

}  // namespace pommer
