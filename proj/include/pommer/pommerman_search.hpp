#pragma once

// The bomber game as a search environment, the network evaluator and the
// opponent models wired into a ready-to-use searching agent.

#include <array>
#include <memory>

#include "pommer/engine.hpp"
#include "pommer/model.hpp"
#include "pommer/opponents.hpp"
#include "pommer/search.hpp"

namespace pommer::search {

struct PommermanEnv {
  using State = GameState;

  int num_agents() const noexcept { return kNumAgents; }
  bool is_alive(const GameState& s, AgentId id) const noexcept { return s.agents[id].alive; }
  GameState step(const GameState& s, const JointAction& joint) const { return pommer::step(s, joint); }
  bool is_terminal(const GameState& s) const noexcept { return pommer::is_terminal(s); }
  /// Outcome value for a finished episode or a dead agent (a loss).
  double terminal_value(const GameState& s, AgentId id) const;
  Position position(const GameState& s, AgentId id) const noexcept { return s.agents[id].pos; }
  std::uint64_t hash(const GameState& s) const { return state_hash(s); }
};

static_assert(SimulationEnvironment<PommermanEnv>);

/// Network evaluation from one agent's observation. With filtering the
/// priors are restricted to safe_actions and renormalized.
class NetworkEvaluator {
 public:
  NetworkEvaluator(std::shared_ptr<const ModelWeights> weights, bool filter_priors)
      : weights_(std::move(weights)), filter_priors_(filter_priors) {}

  Evaluation operator()(const GameState& s, AgentId id) const;

 private:
  std::shared_ptr<const ModelWeights> weights_;
  bool filter_priors_;
};

/// Opponent policy that dispatches to per-seat models. Heuristic models get
/// the search seed so that their in-search draws differ from the real
/// opponents' draws.
class ModelOpponents {
 public:
  ModelOpponents(const std::array<OpponentModel, kNumAgents>& models, std::uint64_t search_seed);
  Action operator()(const GameState& s, AgentId id) const { return models_[id].act(s, id); }

 private:
  std::array<OpponentModel, kNumAgents> models_;
};

struct AgentSearchConfig {
  SearchConfig search;
  std::array<OpponentModel, kNumAgents> opponent_models;  // entry of the searching seat unused
  bool filter_priors = true;
  /// Search from the true state including still-covered items.
  bool search_true_state = false;
};

/// A searching player bound to one seat.
class SearchAgent {
 public:
  SearchAgent(std::shared_ptr<const ModelWeights> weights, const AgentSearchConfig& config, AgentId seat);

  SearchResult act(const GameState& state);
  const Search<PommermanEnv>& search() const noexcept { return search_; }

 private:
  bool true_state_;
  Search<PommermanEnv> search_;
};

}  // namespace pommer::search
