#include <algorithm>

#include "pommer/engine.hpp"

namespace pommer {

namespace {

float clamp01(float v) noexcept { return std::clamp(v, 0.0f, 1.0f); }

void fill_plane(ObservationPlanes& obs, int p, float value) {
  std::fill_n(obs.data.begin() + p * kNumCells, kNumCells, value);
}

}  // namespace

ObservationPlanes encode_observation(const GameState& state, AgentId id) {
  if (id < 0 || id >= kNumAgents) throw ContractViolation("encode_observation: agent id out of range");
  ObservationPlanes obs;

  for (int i = 0; i < kNumCells; ++i) {
    const int r = i / kBoardSize;
    const int c = i % kBoardSize;
    switch (state.grid[i]) {
      case CellKind::Rigid: obs.at(plane::kRigid, r, c) = 1.0f; break;
      case CellKind::Wood: obs.at(plane::kWood, r, c) = 1.0f; break;
      case CellKind::ItemExtraBomb: obs.at(plane::kItemExtraBomb, r, c) = 1.0f; break;
      case CellKind::ItemIncrRange: obs.at(plane::kItemIncrRange, r, c) = 1.0f; break;
      case CellKind::ItemKick: obs.at(plane::kItemKick, r, c) = 1.0f; break;
      case CellKind::Passage: obs.at(plane::kPassage, r, c) = 1.0f; break;
    }
  }
  for (const Bomb& b : state.bombs) {
    obs.at(plane::kBomb, b.pos.row, b.pos.col) = 1.0f;
    obs.at(plane::kBombStrength, b.pos.row, b.pos.col) = clamp01(b.blast_strength / 11.0f);
    obs.at(plane::kBombCountdown, b.pos.row, b.pos.col) = clamp01(b.countdown / 10.0f);
  }
  for (const Flame& f : state.flames) {
    obs.at(plane::kFlame, f.pos.row, f.pos.col) = clamp01(f.ttl / 2.0f);
  }

  const AgentState& self = state.agents[id];
  if (self.alive) obs.at(plane::kSelf, self.pos.row, self.pos.col) = 1.0f;
  const auto opponents = opponents_of(id);
  for (int k = 0; k < kNumAgents - 1; ++k) {
    const AgentState& o = state.agents[opponents[k]];
    if (o.alive) {
      obs.at(plane::kOpponent0 + k, o.pos.row, o.pos.col) = 1.0f;
      fill_plane(obs, plane::kOpponentAlive0 + k, 1.0f);
    }
  }
  fill_plane(obs, plane::kSelfAmmo, clamp01(self.ammo / 10.0f));
  fill_plane(obs, plane::kSelfStrength, clamp01(self.blast_strength / 11.0f));
  fill_plane(obs, plane::kSelfKick, self.can_kick ? 1.0f : 0.0f);
  fill_plane(obs, plane::kSelfMaxBombs, clamp01(self.max_bombs / 10.0f));
  fill_plane(obs, plane::kStep, clamp01(static_cast<float>(state.step_count) / kMaxSteps));
  fill_plane(obs, plane::kOnes, 1.0f);
  return obs;
}

}  // namespace pommer
