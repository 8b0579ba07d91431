#include <algorithm>

#include "pommer/engine.hpp"

namespace pommer {

namespace {

bool blocks_agent(CellKind k) noexcept { return k == CellKind::Rigid || k == CellKind::Wood; }

// Resting place for a sliding bomb: plain passage without another bomb.
bool bomb_can_enter(const GameState& s, Position p) noexcept {
  return p.in_bounds() && s.cell(p) == CellKind::Passage && s.bomb_at(p) == nullptr;
}

void sort_canonical(GameState& s) {
  std::sort(s.bombs.begin(), s.bombs.end(), [](const Bomb& a, const Bomb& b) { return a.pos < b.pos; });
  std::sort(s.flames.begin(), s.flames.end(), [](const Flame& a, const Flame& b) { return a.pos < b.pos; });
}

struct MoveIntent {
  Position origin;
  Position target;
  bool kick = false;
};

// Reverts moves until no two alive agents share a cell and no two agents
// swapped places. Every revert sends an agent back to its (distinct) origin,
// so the loop terminates.
void resolve_conflicts(const GameState& s, std::array<MoveIntent, kNumAgents>& m) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (AgentId i = 0; i < kNumAgents; ++i) {
      if (!s.agents[i].alive || m[i].target == m[i].origin) continue;
      for (AgentId j = 0; j < kNumAgents; ++j) {
        if (j == i || !s.agents[j].alive) continue;
        const bool same_cell = m[j].target == m[i].target;
        const bool swap = m[i].target == m[j].origin && m[j].target == m[i].origin;
        if (same_cell || swap) {
          m[i].target = m[i].origin;
          m[j].target = m[j].origin;
          changed = true;
          break;
        }
      }
    }
    // A kick needs the cell behind the bomb free of agents after movement.
    for (AgentId i = 0; i < kNumAgents; ++i) {
      if (!s.agents[i].alive || !m[i].kick || m[i].target == m[i].origin) continue;
      const Action dir = [&] {
        for (Action d : kDirections) {
          if (offset(m[i].origin, d) == m[i].target) return d;
        }
        return Action::Idle;
      }();
      const Position beyond = offset(m[i].target, dir);
      for (AgentId j = 0; j < kNumAgents; ++j) {
        if (j != i && s.agents[j].alive && m[j].target == beyond) {
          m[i].target = m[i].origin;
          changed = true;
          break;
        }
      }
    }
  }
}

Action direction_between(Position from, Position to) noexcept {
  for (Action d : kDirections) {
    if (offset(from, d) == to) return d;
  }
  return Action::Idle;
}

}  // namespace

GameState step(const GameState& state, const JointAction& actions) {
  if (is_terminal(state)) throw ContractViolation("step: state is terminal");

  GameState s = state;

  // (1) flames burn down
  for (auto& f : s.flames) --f.ttl;
  std::erase_if(s.flames, [](const Flame& f) { return f.ttl == 0; });

  // (2) actions: bomb placement first, then movement intents
  const std::size_t old_bomb_count = s.bombs.size();
  for (AgentId i = 0; i < kNumAgents; ++i) {
    AgentState& a = s.agents[i];
    if (!a.alive || actions[i] != Action::PlaceBomb) continue;
    if (a.ammo > 0 && s.bomb_at(a.pos) == nullptr) {
      s.bombs.push_back(Bomb{a.pos, static_cast<std::uint8_t>(i), kBombFuse, a.blast_strength, Action::Idle});
      --a.ammo;
    }
  }
  std::vector<bool> placed_this_tick(s.bombs.size(), false);
  for (std::size_t b = old_bomb_count; b < s.bombs.size(); ++b) placed_this_tick[b] = true;

  std::array<MoveIntent, kNumAgents> intents{};
  for (AgentId i = 0; i < kNumAgents; ++i) {
    const AgentState& a = s.agents[i];
    intents[i] = {a.pos, a.pos, false};
    if (!a.alive || !is_move(actions[i])) continue;
    const Position t = offset(a.pos, actions[i]);
    if (!t.in_bounds() || blocks_agent(s.cell(t))) continue;
    if (s.bomb_at(t) != nullptr) {
      if (a.can_kick && bomb_can_enter(s, offset(t, actions[i]))) intents[i] = {a.pos, t, true};
      continue;
    }
    intents[i].target = t;
  }
  resolve_conflicts(s, intents);

  for (AgentId i = 0; i < kNumAgents; ++i) {
    if (!s.agents[i].alive) continue;
    if (intents[i].kick && intents[i].target != intents[i].origin) {
      for (auto& b : s.bombs) {
        if (b.pos == intents[i].target) b.moving_dir = direction_between(intents[i].origin, intents[i].target);
      }
    }
    s.agents[i].pos = intents[i].target;
  }

  // (3) sliding bombs advance one cell; blocked bombs come to rest
  {
    std::vector<Position> next(s.bombs.size());
    for (std::size_t b = 0; b < s.bombs.size(); ++b) {
      const Bomb& bomb = s.bombs[b];
      next[b] = bomb.pos;
      if (bomb.moving_dir == Action::Idle) continue;
      const Position t = offset(bomb.pos, bomb.moving_dir);
      if (bomb_can_enter(s, t) && !s.agent_at(t).has_value()) next[b] = t;
    }
    for (std::size_t b = 0; b < s.bombs.size(); ++b) {
      if (next[b] == s.bombs[b].pos) continue;
      for (std::size_t c = 0; c < s.bombs.size(); ++c) {
        if (c != b && next[c] == next[b]) {
          next[b] = s.bombs[b].pos;
          break;
        }
      }
    }
    for (std::size_t b = 0; b < s.bombs.size(); ++b) {
      if (next[b] == s.bombs[b].pos) {
        s.bombs[b].moving_dir = Action::Idle;
      } else {
        s.bombs[b].pos = next[b];
      }
    }
    // An agent that walked onto a bomb which then failed to slide goes back,
    // possibly pushing others back in turn.
    bool changed = true;
    while (changed) {
      changed = false;
      for (AgentId i = 0; i < kNumAgents; ++i) {
        AgentState& a = s.agents[i];
        if (!a.alive || a.pos == intents[i].origin) continue;
        bool clash = s.bomb_at(a.pos) != nullptr;
        for (AgentId j = 0; j < kNumAgents && !clash; ++j) {
          clash = j != i && s.agents[j].alive && s.agents[j].pos == a.pos;
        }
        if (clash) {
          a.pos = intents[i].origin;
          changed = true;
        }
      }
    }
  }

  // (4) fuses burn; countdown-0 bombs, bombs resting in fire and every bomb
  // reached by a new flame explode together
  for (std::size_t b = 0; b < s.bombs.size(); ++b) {
    if (!placed_this_tick[b]) --s.bombs[b].countdown;
  }
  std::vector<bool> exploding(s.bombs.size(), false);
  std::vector<std::size_t> queue;
  for (std::size_t b = 0; b < s.bombs.size(); ++b) {
    if (s.bombs[b].countdown == 0 || s.flame_at(s.bombs[b].pos) != nullptr) {
      exploding[b] = true;
      queue.push_back(b);
    }
  }
  std::array<bool, kNumCells> fire{};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    const Bomb& bomb = s.bombs[queue[qi]];
    for (Position p : blast_cells(s.grid, bomb.pos, bomb.blast_strength)) {
      fire[p.index()] = true;
      for (std::size_t c = 0; c < s.bombs.size(); ++c) {
        if (!exploding[c] && s.bombs[c].pos == p) {
          exploding[c] = true;
          queue.push_back(c);
        }
      }
    }
  }
  if (!queue.empty()) {
    for (std::size_t b = 0; b < s.bombs.size(); ++b) {
      if (exploding[b]) ++s.agents[s.bombs[b].owner].ammo;
    }
    std::vector<Bomb> remaining;
    remaining.reserve(s.bombs.size());
    for (std::size_t b = 0; b < s.bombs.size(); ++b) {
      if (!exploding[b]) remaining.push_back(s.bombs[b]);
    }
    s.bombs = std::move(remaining);

    for (int i = 0; i < kNumCells; ++i) {
      if (!fire[i]) continue;
      const Position p = Position::from_index(i);
      // (5, part) burning wood reveals its item; burning items are consumed
      if (s.grid[i] == CellKind::Wood) {
        s.grid[i] = s.hidden_items[i];
        s.hidden_items[i] = CellKind::Passage;
      } else if (is_item(s.grid[i])) {
        s.grid[i] = CellKind::Passage;
      }
      bool refreshed = false;
      for (auto& f : s.flames) {
        if (f.pos == p) {
          f.ttl = kFlameLifetime;
          refreshed = true;
        }
      }
      if (!refreshed) s.flames.push_back(Flame{p, kFlameLifetime});
    }
  }

  // (5) fire kills; survivors pick up items
  const int next_step = state.step_count + 1;
  for (AgentId i = 0; i < kNumAgents; ++i) {
    AgentState& a = s.agents[i];
    if (!a.alive) continue;
    if (s.flame_at(a.pos) != nullptr) {
      a.alive = false;
      a.death_step = static_cast<std::int16_t>(next_step);
    }
  }
  for (AgentId i = 0; i < kNumAgents; ++i) {
    AgentState& a = s.agents[i];
    if (!a.alive) continue;
    CellKind& c = s.cell(a.pos);
    switch (c) {
      case CellKind::ItemExtraBomb:
        ++a.max_bombs;
        ++a.ammo;
        break;
      case CellKind::ItemIncrRange: ++a.blast_strength; break;
      case CellKind::ItemKick: a.can_kick = true; break;
      default: continue;
    }
    c = CellKind::Passage;
  }

  // (6)
  s.step_count = next_step;
  sort_canonical(s);
  return s;
}

}  // namespace pommer
