#include <algorithm>
#include <limits>

#include "pommer/engine.hpp"

namespace pommer {

std::vector<Position> blast_cells(const std::array<CellKind, kNumCells>& grid, Position origin,
                                  int blast_strength) {
  std::vector<Position> cells;
  cells.reserve(1 + 4 * std::max(0, blast_strength - 1));
  cells.push_back(origin);
  for (Action d : kDirections) {
    Position p = origin;
    for (int r = 1; r < blast_strength; ++r) {
      p = offset(p, d);
      if (!p.in_bounds()) break;
      const CellKind k = grid[p.index()];
      if (k == CellKind::Rigid) break;
      cells.push_back(p);
      if (k == CellKind::Wood || is_item(k)) break;
    }
  }
  return cells;
}

bool BlastMap::empty() const noexcept {
  return std::all_of(times_.begin(), times_.end(), [](std::int16_t t) { return t == kAbsent; });
}

BlastMap blast_map(const GameState& state, int horizon) {
  BlastMap map;
  if (state.bombs.empty() || horizon <= 0) return map;

  constexpr int kNever = std::numeric_limits<int>::max();
  const std::size_t n = state.bombs.size();
  std::vector<int> when(n);
  for (std::size_t b = 0; b < n; ++b) {
    const Bomb& bomb = state.bombs[b];
    const Flame* f = state.flame_at(bomb.pos);
    // a flame that survives the next burn-down detonates the bomb next tick
    when[b] = (f != nullptr && f->ttl > 1) ? 1 : bomb.countdown;
  }
  std::vector<bool> done(n, false);
  auto grid = state.grid;

  for (;;) {
    int t = kNever;
    for (std::size_t b = 0; b < n; ++b) {
      if (!done[b]) t = std::min(t, when[b]);
    }
    if (t == kNever || t > horizon) break;

    std::vector<std::size_t> group;
    for (std::size_t b = 0; b < n; ++b) {
      if (!done[b] && when[b] == t) group.push_back(b);
    }
    std::vector<Position> burnt;
    for (std::size_t gi = 0; gi < group.size(); ++gi) {
      const std::size_t b = group[gi];
      done[b] = true;
      for (Position p : blast_cells(grid, state.bombs[b].pos, state.bombs[b].blast_strength)) {
        const auto prev = map.at(p);
        if (!prev || *prev > t) map.set(p, t);
        burnt.push_back(p);
        for (std::size_t c = 0; c < n; ++c) {
          if (!done[c] && when[c] > t && state.bombs[c].pos == p) {
            when[c] = t;
            group.push_back(c);
          }
        }
      }
    }
    // later explosions see the destroyed wood (and any item it revealed)
    std::sort(burnt.begin(), burnt.end());
    burnt.erase(std::unique(burnt.begin(), burnt.end()), burnt.end());
    for (Position p : burnt) {
      CellKind& k = grid[p.index()];
      if (k == CellKind::Wood) {
        k = state.hidden_items[p.index()];
      } else if (is_item(k)) {
        k = CellKind::Passage;
      }
    }
  }
  return map;
}

}  // namespace pommer
