#pragma once

// Hand-built states and the rule invariants checked after every tick.

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pommer/engine.hpp"
#include "pommer/opponents.hpp"

namespace pommer::testing {

/// All-passage board, four fresh agents on their start cells.
inline GameState open_board() {
  GameState s;
  s.grid.fill(CellKind::Passage);
  s.hidden_items.fill(CellKind::Passage);
  for (AgentId id = 0; id < kNumAgents; ++id) s.agents[id].pos = kStartPositions[id];
  return s;
}

inline void kill(GameState& s, AgentId id, int at_step = 0) {
  s.agents[id].alive = false;
  s.agents[id].death_step = static_cast<std::int16_t>(at_step);
}

inline void add_bomb(GameState& s, Position p, AgentId owner, int countdown, int strength = kInitialBlastStrength) {
  s.bombs.push_back(Bomb{p, static_cast<std::uint8_t>(owner), static_cast<std::uint8_t>(countdown),
                         static_cast<std::uint8_t>(strength), Action::Idle});
  std::sort(s.bombs.begin(), s.bombs.end(), [](const Bomb& a, const Bomb& b) { return a.pos < b.pos; });
  // keep ammo consistent with the bombs the owner has out
  AgentState& a = s.agents[owner];
  a.ammo = static_cast<std::uint8_t>(std::max(0, a.max_bombs - s.bombs_owned_by(owner)));
}

inline void add_flame(GameState& s, Position p, int ttl = kFlameLifetime) {
  s.flames.push_back(Flame{p, static_cast<std::uint8_t>(ttl)});
  std::sort(s.flames.begin(), s.flames.end(), [](const Flame& a, const Flame& b) { return a.pos < b.pos; });
}

/// Static invariants of a single state. Empty means the state is legal.
inline std::vector<std::string> state_violations(const GameState& s) {
  std::vector<std::string> v;
  const auto say = [&](const std::string& m) { v.push_back("step " + std::to_string(s.step_count) + ": " + m); };
  if (s.step_count < 0 || s.step_count > kMaxSteps) say("step_count out of range");
  for (AgentId id = 0; id < kNumAgents; ++id) {
    const AgentState& a = s.agents[id];
    if (a.ammo + s.bombs_owned_by(id) != a.max_bombs) say("ammo not conserved for agent " + std::to_string(id));
    if (a.blast_strength < 2 || a.max_bombs < 1) say("agent stats below initial values");
    if (!a.alive) continue;
    const CellKind k = s.cell(a.pos);
    if (k == CellKind::Rigid || k == CellKind::Wood) say("agent " + std::to_string(id) + " inside a wall");
    for (AgentId other = id + 1; other < kNumAgents; ++other) {
      if (s.agents[other].alive && s.agents[other].pos == a.pos) say("two agents share a cell");
    }
  }
  for (std::size_t i = 0; i < s.bombs.size(); ++i) {
    const Bomb& b = s.bombs[i];
    if (b.countdown < 1 || b.countdown > kBombFuse) say("bomb countdown out of range");
    const CellKind k = s.cell(b.pos);
    if (k == CellKind::Rigid || k == CellKind::Wood) say("bomb inside a wall");
    if (i > 0 && !(s.bombs[i - 1].pos < b.pos)) say("bombs not strictly ordered (two bombs on a cell?)");
  }
  for (std::size_t i = 0; i < s.flames.size(); ++i) {
    if (s.flames[i].ttl < 1 || s.flames[i].ttl > kFlameLifetime) say("flame ttl out of range");
    if (i > 0 && !(s.flames[i - 1].pos < s.flames[i].pos)) say("flames not strictly ordered");
  }
  for (int i = 0; i < kNumCells; ++i) {
    if (s.hidden_items[i] != CellKind::Passage && s.grid[i] != CellKind::Wood) say("hidden item outside wood");
  }
  return v;
}

/// Invariants linking two consecutive states.
inline std::vector<std::string> transition_violations(const GameState& prev, const GameState& next) {
  std::vector<std::string> v = state_violations(next);
  const auto say = [&](const std::string& m) { v.push_back("step " + std::to_string(next.step_count) + ": " + m); };
  if (next.step_count != prev.step_count + 1) say("step_count did not advance by one");

  // flames live exactly two ticks unless re-ignited, which restarts them at full ttl
  for (const Flame& f : next.flames) {
    const Flame* before = prev.flame_at(f.pos);
    const bool fresh = f.ttl == kFlameLifetime;
    const bool aged = before != nullptr && before->ttl == f.ttl + 1;
    if (!fresh && !aged) say("flame ttl did not decrease by one");
  }
  for (const Flame& f : prev.flames) {
    if (f.ttl > 1 && next.flame_at(f.pos) == nullptr) say("flame vanished before its lifetime");
  }

  // per owner, surviving bombs are the previous ones one tick older; only a
  // freshly placed bomb may carry the full fuse
  for (AgentId id = 0; id < kNumAgents; ++id) {
    std::map<int, int> before, after;
    for (const Bomb& b : prev.bombs) {
      if (b.owner == id) ++before[b.countdown - 1];
    }
    int fresh = 0;
    for (const Bomb& b : next.bombs) {
      if (b.owner != id) continue;
      if (b.countdown == kBombFuse) {
        ++fresh;
      } else {
        ++after[b.countdown];
      }
    }
    for (const auto& [c, n] : after) {
      if (before[c] < n) say("bomb countdown did not decrease by exactly one");
    }
    if (fresh > 1) say("more than one bomb placed by one agent in a tick");
  }

  for (AgentId id = 0; id < kNumAgents; ++id) {
    if (!prev.agents[id].alive && next.agents[id].alive) say("dead agent came back");
    if (prev.agents[id].alive && next.agents[id].alive && manhattan(prev.agents[id].pos, next.agents[id].pos) > 1) {
      say("agent moved more than one cell");
    }
  }
  return v;
}

/// Runs four scripted agents from generate_board(seed) for at most
/// `max_steps` ticks; calls visit(prev, next) after every tick.
template <class Visit>
GameState play_simple(std::uint64_t seed, int max_steps, Visit&& visit) {
  GameState s = generate_board(seed);
  std::array<SplitMix64, kNumAgents> rngs;
  for (AgentId id = 0; id < kNumAgents; ++id) rngs[id] = SplitMix64(mix_combine(seed, static_cast<std::uint64_t>(id)));
  for (int t = 0; t < max_steps && !is_terminal(s); ++t) {
    JointAction j{};
    for (AgentId id = 0; id < kNumAgents; ++id) {
      if (!s.agents[id].alive) continue;
      const SimpleActResult r = simple_act(s, id, rngs[id]);
      rngs[id] = r.rng;
      j[id] = r.action;
    }
    GameState next = step(s, j);
    visit(s, next);
    s = std::move(next);
  }
  return s;
}

inline std::string join(const std::vector<std::string>& xs) {
  std::ostringstream out;
  for (const auto& x : xs) out << x << "; ";
  return out.str();
}

}  // namespace pommer::testing
