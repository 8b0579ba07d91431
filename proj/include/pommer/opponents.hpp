#pragma once

// Deterministic opponent models used both as real players and inside search.

#include <array>
#include <bitset>
#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "pommer/engine.hpp"
#include "pommer/model.hpp"
#include "pommer/rng.hpp"

namespace pommer {

/// Non-empty subset of the six actions.
class ActionSet {
 public:
  ActionSet() = default;
  static ActionSet all() {
    ActionSet s;
    s.bits_.set();
    return s;
  }

  bool contains(Action a) const noexcept { return bits_.test(to_index(a)); }
  void insert(Action a) noexcept { bits_.set(to_index(a)); }
  void erase(Action a) noexcept { bits_.reset(to_index(a)); }
  int size() const noexcept { return static_cast<int>(bits_.count()); }
  bool empty() const noexcept { return bits_.none(); }

  bool operator==(const ActionSet&) const = default;

 private:
  std::bitset<kNumActions> bits_;
};

/// Horizon used for the danger analysis shared by the filter and the heuristic.
inline constexpr int kDangerHorizon = kBombFuse;

/// Drops actions that walk into fire or into a cell that explodes next tick,
/// staying on such a cell while a safe move exists, and bombing without
/// ammo. Falls back to the legal set when nothing survives.
ActionSet safe_actions(const GameState& state, AgentId id);
ActionSet safe_actions(const GameState& state, AgentId id, const BlastMap& blast);

/// The random draws one heuristic decision consumes. Kept explicit so that
/// rotating a board can be paired with the matching rotated draws.
struct HeuristicDraws {
  std::array<Action, 4> direction_order = kDirections;
  std::uint64_t pick = 0;
};

HeuristicDraws draw_heuristic(SplitMix64& rng);

/// Priority rules of the scripted baseline, given fixed draws.
Action simple_decide(const GameState& state, AgentId id, const HeuristicDraws& draws);

struct SimpleActResult {
  Action action;
  SplitMix64 rng;
};

/// Scripted baseline. Pure: the generator state goes in and comes out.
SimpleActResult simple_act(const GameState& state, AgentId id, SplitMix64 rng);

/// RawNet agent: argmax of the network policy over safe_actions, lowest
/// index on ties.
Action policy_argmax_act(const ModelWeights& weights, const GameState& state, AgentId id);
Action policy_argmax_from(const ModelOutput& out, const ActionSet& allowed);

/// Seed of the heuristic opponent model for one (search, state, agent).
std::uint64_t derive_model_seed(std::uint64_t search_seed, std::uint64_t state_hash, AgentId id);

struct SimpleHeuristic {
  std::uint64_t seed = 0;
};
struct PolicyArgmax {
  std::shared_ptr<const ModelWeights> weights;
  std::string source;  // path or "random:<seed>" for provenance
};
struct FixedAction {
  Action action = Action::Idle;
};

/// Opponent model as used during search: act is a pure function of
/// (model, state, agent). SimpleHeuristic reseeds from the state each call.
class OpponentModel {
 public:
  using Variant = std::variant<SimpleHeuristic, PolicyArgmax, FixedAction>;

  OpponentModel() : v_(SimpleHeuristic{}) {}
  OpponentModel(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

  Action act(const GameState& state, AgentId id) const;
  const Variant& variant() const noexcept { return v_; }
  /// Same model with the heuristic seed replaced (other kinds unchanged).
  OpponentModel with_seed(std::uint64_t seed) const;
  std::string name() const;

 private:
  Variant v_;
};

/// Parses "simple", "rawnet:<weights-path>", "rawnet:random:<seed>",
/// "fixed:<action>".
OpponentModel parse_opponent_model(const std::string& spec);

}  // namespace pommer
