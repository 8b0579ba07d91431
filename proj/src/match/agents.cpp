#include <mutex>

#include "pommer/match.hpp"
#include "pommer/pommerman_search.hpp"

namespace pommer::match {

namespace {

class SimpleAgent final : public Agent {
 public:
  SimpleAgent(AgentId id, std::uint64_t seed) : id_(id), rng_(seed) {}

  Decision act(const GameState& state) override {
    const SimpleActResult r = simple_act(state, id_, rng_);
    rng_ = r.rng;
    return {r.action, std::nullopt};
  }

 private:
  AgentId id_;
  SplitMix64 rng_;
};

class RawNetAgent final : public Agent {
 public:
  RawNetAgent(std::shared_ptr<const ModelWeights> w, AgentId id) : weights_(std::move(w)), id_(id) {}

  Decision act(const GameState& state) override { return {policy_argmax_act(*weights_, state, id_), std::nullopt}; }

 private:
  std::shared_ptr<const ModelWeights> weights_;
  AgentId id_;
};

class FixedAgent final : public Agent {
 public:
  explicit FixedAgent(Action a) : action_(a) {}
  Decision act(const GameState&) override { return {action_, std::nullopt}; }

 private:
  Action action_;
};

class SearchPlayer final : public Agent {
 public:
  SearchPlayer(std::shared_ptr<const ModelWeights> w, const search::AgentSearchConfig& config, AgentId id)
      : agent_(std::move(w), config, id) {}

  Decision act(const GameState& state) override {
    search::SearchResult r = agent_.act(state);
    const Action a = r.chosen_action;
    return {a, std::move(r)};
  }

 private:
  search::SearchAgent agent_;
};

std::mutex cache_mutex;

}  // namespace

std::shared_ptr<const ModelWeights> WeightCache::get(const std::string& spec) {
  std::lock_guard lock(cache_mutex);
  for (const auto& [key, w] : loaded_) {
    if (key == spec) return w;
  }
  auto w = std::make_shared<const ModelWeights>(load_weights_spec(spec));
  loaded_.emplace_back(spec, w);
  return w;
}

SeatPlan plan_seat(const SeatSpec& spec, WeightCache& cache) {
  SeatPlan p;
  p.spec = spec;
  if (spec.kind == AgentKind::RawNet || spec.is_search()) p.weights = cache.get(spec.weights);
  if (spec.is_search()) {
    for (int i = 0; i < kNumAgents; ++i) {
      const std::string& m = spec.opponent_models[i];
      if (m.rfind("rawnet:", 0) == 0) {
        p.opponent_models[i] = OpponentModel(PolicyArgmax{cache.get(m.substr(7)), m.substr(7)});
      } else {
        p.opponent_models[i] = parse_opponent_model(m);
      }
    }
  }
  return p;
}

std::unique_ptr<Agent> make_agent(const SeatPlan& plan, AgentId id, std::uint64_t game_seed) {
  const std::uint64_t seat_seed = mix_combine(game_seed, 0xa9e7000ULL + static_cast<std::uint64_t>(id));
  switch (plan.spec.kind) {
    case AgentKind::Simple: return std::make_unique<SimpleAgent>(id, seat_seed);
    case AgentKind::RawNet: return std::make_unique<RawNetAgent>(plan.weights, id);
    case AgentKind::Fixed: return std::make_unique<FixedAgent>(plan.spec.fixed_action);
    case AgentKind::SpMcts:
    case AgentKind::TpMcts: {
      search::AgentSearchConfig c;
      c.search = plan.spec.search;
      c.search.seed = mix_combine(plan.spec.search.seed, seat_seed);
      c.opponent_models = plan.opponent_models;
      c.filter_priors = plan.spec.filter_priors;
      c.search_true_state = plan.spec.search_true_state;
      return std::make_unique<SearchPlayer>(plan.weights, c, id);
    }
  }
  throw ContractViolation("make_agent: unknown agent kind");
}

}  // namespace pommer::match
