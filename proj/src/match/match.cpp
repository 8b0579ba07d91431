#include <atomic>

#ifdef POMMER_HAVE_OPENMP
#include <omp.h>
#endif

#include "pommer/match.hpp"

namespace pommer::match {

std::uint64_t game_seed(std::uint64_t base_seed, std::uint64_t index) {
  return mix_combine(mix64(base_seed ^ 0x6a4e5eedULL), index);
}

std::array<int, kNumAgents> seat_permutation(std::uint64_t base_seed, std::uint64_t index, bool randomize) {
  std::array<int, kNumAgents> perm{0, 1, 2, 3};
  if (!randomize) return perm;
  SplitMix64 rng(mix_combine(game_seed(base_seed, index), 0x5ea7ULL));
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  return perm;
}

GameRecord play_game(const std::array<SeatPlan, kNumAgents>& seats, std::uint64_t base_seed, std::uint64_t index,
                     bool randomize_seats, int step_limit) {
  GameRecord g;
  g.game_index = index;
  g.board_seed = game_seed(base_seed, index);
  g.seat_of = seat_permutation(base_seed, index, randomize_seats);
  g.replay.seed = g.board_seed;

  std::array<std::unique_ptr<Agent>, kNumAgents> agents;
  for (AgentId id = 0; id < kNumAgents; ++id) agents[id] = make_agent(seats[g.seat_of[id]], id, g.board_seed);

  GameState state = generate_board(g.board_seed);

  while (!is_terminal(state) && state.step_count < step_limit) {
    JointAction joint{};
    joint.fill(Action::Idle);
    for (AgentId id = 0; id < kNumAgents; ++id) {
      if (!state.agents[id].alive) continue;
      g.trajectories[id].push_back(state.agents[id].pos);
      Decision d = agents[id]->act(state);
      SeatGameStats& st = g.by_agent[id];
      joint[id] = d.action;
      ++st.moves;
      ++st.action_counts[to_index(d.action)];
      if (d.search) {
        st.search_depths.push_back(d.search->depth_max);
        st.search_ms.push_back(d.search->elapsed_ms);
        st.env_ms += d.search->env_ms;
        st.inference_ms += d.search->inference_ms;
      }
    }
    g.replay.actions.push_back(joint);
    state = step(state, joint);
  }

  g.env_steps = state.step_count;
  g.finished = is_terminal(state);
  for (AgentId id = 0; id < kNumAgents; ++id) {
    // a game cut at the step limit counts as a tie for everyone still alive
    const AgentOutcome r = agent_result(state, id);
    g.by_agent[id].outcome = r == AgentOutcome::Ongoing ? AgentOutcome::Draw : r;
  }
  return g;
}

std::vector<GameRecord> run_match(const MatchConfig& config, const Progress& progress) {
  WeightCache cache;
  std::array<SeatPlan, kNumAgents> plans;
  for (int s = 0; s < kNumAgents; ++s) plans[s] = plan_seat(config.seats[s], cache);

  const auto n = static_cast<std::size_t>(config.games);
  std::vector<GameRecord> games(n);
  std::atomic<std::size_t> done{0};
  std::exception_ptr failure;

#ifdef POMMER_HAVE_OPENMP
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
  for (std::size_t i = 0; i < n; ++i) {
    try {
      games[i] = play_game(plans, config.seed, i, config.randomize_seats, config.step_limit);
    } catch (...) {
#ifdef POMMER_HAVE_OPENMP
#pragma omp critical(pommer_match_failure)
#endif
      if (!failure) failure = std::current_exception();
    }
    const std::size_t finished = ++done;
    if (progress) {
#ifdef POMMER_HAVE_OPENMP
#pragma omp critical(pommer_match_progress)
#endif
      progress(finished, n);
    }
  }
  if (failure) std::rethrow_exception(failure);
  return games;
}

}  // namespace pommer::match
