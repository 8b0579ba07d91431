#include <stdexcept>

#include "pommer/opponents.hpp"

namespace pommer {

Action policy_argmax_from(const ModelOutput& out, const ActionSet& allowed) {
  int best = -1;
  for (int a = 0; a < kNumActions; ++a) {
    if (!allowed.contains(action_from_index(a))) continue;
    if (best < 0 || out.policy[a] > out.policy[best]) best = a;
  }
  return best < 0 ? Action::Idle : action_from_index(best);
}

Action policy_argmax_act(const ModelWeights& weights, const GameState& state, AgentId id) {
  if (!state.agents[id].alive) return Action::Idle;
  const ModelOutput out = forward(weights, encode_observation(state, id));
  return policy_argmax_from(out, safe_actions(state, id));
}

std::uint64_t derive_model_seed(std::uint64_t search_seed, std::uint64_t state_hash, AgentId id) {
  std::uint64_t h = mix64(search_seed ^ 0x6f70706f6e656e74ULL);
  h = mix_combine(h, state_hash);
  return mix_combine(h, static_cast<std::uint64_t>(id) + 1);
}

Action OpponentModel::act(const GameState& state, AgentId id) const {
  return std::visit(
      [&](const auto& m) -> Action {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SimpleHeuristic>) {
          SplitMix64 rng(derive_model_seed(m.seed, state_hash(state), id));
          return simple_act(state, id, rng).action;
        } else if constexpr (std::is_same_v<T, PolicyArgmax>) {
          return policy_argmax_act(*m.weights, state, id);
        } else {
          return m.action;
        }
      },
      v_);
}

OpponentModel OpponentModel::with_seed(std::uint64_t seed) const {
  if (std::holds_alternative<SimpleHeuristic>(v_)) return OpponentModel(SimpleHeuristic{seed});
  return *this;
}

std::string OpponentModel::name() const {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SimpleHeuristic>) {
          return "simple";
        } else if constexpr (std::is_same_v<T, PolicyArgmax>) {
          return "rawnet:" + m.source;
        } else {
          return std::string("fixed:") + to_string(m.action);
        }
      },
      v_);
}

OpponentModel parse_opponent_model(const std::string& spec) {
  if (spec == "simple") return OpponentModel(SimpleHeuristic{});
  if (spec.rfind("rawnet:", 0) == 0) {
    const std::string source = spec.substr(7);
    if (source.empty()) throw std::invalid_argument("rawnet model needs a weights path");
    return OpponentModel(PolicyArgmax{std::make_shared<const ModelWeights>(load_weights_spec(source)), source});
  }
  if (spec.rfind("fixed:", 0) == 0) {
    const auto a = parse_action(spec.substr(6));
    if (!a) throw std::invalid_argument("unknown action in '" + spec + "'");
    return OpponentModel(FixedAction{*a});
  }
  throw std::invalid_argument("unknown opponent model '" + spec + "'");
}

}  // namespace pommer
