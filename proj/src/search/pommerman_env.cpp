#include "pommer/pommerman_search.hpp"

namespace pommer::search {

double PommermanEnv::terminal_value(const GameState& s, AgentId id) const {
  const AgentOutcome r = agent_result(s, id);
  return r == AgentOutcome::Ongoing ? 0.0 : outcome_value(r);
}

Evaluation NetworkEvaluator::operator()(const GameState& s, AgentId id) const {
  const ModelOutput out = forward(*weights_, encode_observation(s, id));
  Evaluation e;
  e.value = out.value;
  e.priors = out.policy;
  if (filter_priors_ && s.agents[id].alive) {
    const ActionSet safe = safe_actions(s, id);
    float total = 0.0f;
    for (int a = 0; a < kNumActions; ++a) {
      if (!safe.contains(action_from_index(a))) e.priors[a] = 0.0f;
      total += e.priors[a];
    }
    if (total > 0.0f) {
      for (float& p : e.priors) p /= total;
    } else {
      // the net put everything on unsafe moves; spread over the safe set
      for (int a = 0; a < kNumActions; ++a) {
        e.priors[a] = safe.contains(action_from_index(a)) ? 1.0f / static_cast<float>(safe.size()) : 0.0f;
      }
    }
  }
  return e;
}

ModelOpponents::ModelOpponents(const std::array<OpponentModel, kNumAgents>& models, std::uint64_t search_seed) {
  for (int i = 0; i < kNumAgents; ++i) models_[i] = models[i].with_seed(search_seed);
}

SearchAgent::SearchAgent(std::shared_ptr<const ModelWeights> weights, const AgentSearchConfig& config, AgentId seat)
    : true_state_(config.search_true_state),
      search_(PommermanEnv{}, NetworkEvaluator(std::move(weights), config.filter_priors),
              ModelOpponents(config.opponent_models, config.search.seed), config.search, seat) {}

SearchResult SearchAgent::act(const GameState& state) {
  return search_.run(true_state_ ? state : without_hidden_items(state));
}

}  // namespace pommer::search
