#include <algorithm>

#include "pommer/dataset.hpp"

namespace pommer::dataset {

std::array<Symmetry, 8> Symmetry::all() {
  std::array<Symmetry, 8> out;
  for (int i = 0; i < 8; ++i) out[i] = Symmetry(i % 4, i >= 4);
  return out;
}

Position Symmetry::apply(Position p) const noexcept {
  int r = p.row;
  int c = p.col;
  if (mirrored_) c = kBoardSize - 1 - c;
  for (int t = 0; t < turns_; ++t) {
    const int nr = c;
    c = kBoardSize - 1 - r;
    r = nr;
  }
  return Position{static_cast<std::int8_t>(r), static_cast<std::int8_t>(c)};
}

Action Symmetry::apply(Action a) const noexcept {
  if (!is_move(a)) return a;
  const Position centre{kBoardSize / 2, kBoardSize / 2};
  const Position moved = apply(offset(centre, a));
  const Position base = apply(centre);
  for (Action d : kDirections) {
    if (offset(base, d) == moved) return d;
  }
  return a;
}

Symmetry Symmetry::inverse() const noexcept {
  // a mirrored element is its own inverse
  return mirrored_ ? *this : Symmetry(-turns_, false);
}

Symmetry operator*(Symmetry a, Symmetry b) noexcept {
  // M R = R^-1 M
  const int turns = a.turns_ + (a.mirrored_ ? -b.turns_ : b.turns_);
  return Symmetry(turns, a.mirrored_ != b.mirrored_);
}

ObservationPlanes transform(const ObservationPlanes& obs, Symmetry g) {
  ObservationPlanes out;
  for (int p = 0; p < kObsPlanes; ++p) {
    if (plane::is_broadcast(p)) {
      std::copy_n(obs.data.begin() + p * kNumCells, kNumCells, out.data.begin() + p * kNumCells);
      continue;
    }
    for (int i = 0; i < kNumCells; ++i) {
      const Position to = g.apply(Position::from_index(i));
      out.data[p * kNumCells + to.index()] = obs.data[p * kNumCells + i];
    }
  }
  return out;
}

GameState transform(const GameState& s, Symmetry g) {
  GameState out = s;
  for (int i = 0; i < kNumCells; ++i) {
    const int to = g.apply(Position::from_index(i)).index();
    out.grid[to] = s.grid[i];
    out.hidden_items[to] = s.hidden_items[i];
  }
  for (Bomb& b : out.bombs) {
    b.pos = g.apply(b.pos);
    b.moving_dir = g.apply(b.moving_dir);
  }
  for (Flame& f : out.flames) f.pos = g.apply(f.pos);
  for (AgentState& a : out.agents) a.pos = g.apply(a.pos);
  std::sort(out.bombs.begin(), out.bombs.end(), [](const Bomb& a, const Bomb& b) { return a.pos < b.pos; });
  std::sort(out.flames.begin(), out.flames.end(), [](const Flame& a, const Flame& b) { return a.pos < b.pos; });
  return out;
}

std::array<float, kNumActions> transform_policy(const std::array<float, kNumActions>& pi, Symmetry g) {
  std::array<float, kNumActions> out{};
  for (int a = 0; a < kNumActions; ++a) out[to_index(g.apply(action_from_index(a)))] = pi[a];
  return out;
}

Sample augment(const Sample& sample, Symmetry g) {
  Sample out = sample;
  out.obs = transform(sample.obs, g);
  out.pi = transform_policy(sample.pi, g);
  return out;
}

}  // namespace pommer::dataset
