#include "pommer/dataset.hpp"

namespace pommer::dataset {

std::array<float, kNumAgents> episode_outcomes(const GameState& final_state) {
  if (!is_terminal(final_state)) throw ContractViolation("assign_outcomes: episode has not finished");
  std::array<float, kNumAgents> z{};
  for (AgentId id = 0; id < kNumAgents; ++id) z[id] = static_cast<float>(outcome_value(agent_result(final_state, id)));
  return z;
}

void assign_outcomes(std::span<Sample> samples, const GameState& final_state) {
  const auto z = episode_outcomes(final_state);
  for (Sample& s : samples) {
    if (s.agent_id >= kNumAgents) throw ContractViolation("assign_outcomes: agent id out of range");
    s.z = z[s.agent_id];
  }
}

}  // namespace pommer::dataset
