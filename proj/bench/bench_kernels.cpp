// Compares the textbook network kernels with the fast path, single calls
// with batched calls, and times the simulation pieces a search move uses.
//
//   bench_kernels [iterations]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <vector>

#ifdef POMMER_HAVE_OPENMP
#include <omp.h>
#endif

#include "pommer/engine.hpp"
#include "pommer/model.hpp"
#include "pommer/opponents.hpp"
#include "pommer/pommerman_search.hpp"

using namespace pommer;
using Clock = std::chrono::steady_clock;

namespace {

template <class F>
double time_us(int iterations, F&& f) {
  f();  // warm-up
  const auto t0 = Clock::now();
  for (int i = 0; i < iterations; ++i) f();
  return std::chrono::duration<double, std::micro>(Clock::now() - t0).count() / iterations;
}

GameState midgame(std::uint64_t seed, int steps) {
  GameState s = generate_board(seed);
  std::array<SplitMix64, kNumAgents> rngs{SplitMix64(1), SplitMix64(2), SplitMix64(3), SplitMix64(4)};
  for (int t = 0; t < steps && !is_terminal(s); ++t) {
    JointAction j{};
    for (AgentId id = 0; id < kNumAgents; ++id) {
      if (!s.agents[id].alive) continue;
      const auto r = simple_act(s, id, rngs[id]);
      rngs[id] = r.rng;
      j[id] = r.action;
    }
    s = step(s, j);
  }
  return s;
}

volatile float sink;

}  // namespace

int main(int argc, char** argv) {
  const int iters = argc > 1 ? std::atoi(argv[1]) : 200;
  const ModelWeights w = init_random(7);
  const GameState s = midgame(11, 60);
  AgentId player = 0;
  while (!s.agents[player].alive) ++player;
  const ObservationPlanes obs = encode_observation(s, player);

  int threads = 1;
#ifdef POMMER_HAVE_OPENMP
  threads = omp_get_max_threads();
#endif
  std::setvbuf(stdout, nullptr, _IOLBF, 0);
  std::printf("threads: %d   midgame step %d, %d alive\n", threads, s.step_count, s.alive_count());

  const double ref_us = time_us(std::max(1, iters / 10), [&] { sink = reference::forward(w, obs).value; });
  const double fast_us = time_us(iters, [&] { sink = forward(w, obs).value; });
  std::printf("forward  reference %9.1f us   fast %9.1f us   speedup %.1fx\n", ref_us, fast_us, ref_us / fast_us);

  const std::vector<ObservationPlanes> batch(16, obs);
  const double singles_us = time_us(std::max(1, iters / 16), [&] {
    for (const auto& o : batch) sink = forward(w, o).value;
  });
  const double batch_us = time_us(std::max(1, iters / 16), [&] { sink = forward_batch(w, batch)[15].value; });
  std::printf("16 obs   singles   %9.1f us   batch %8.1f us   throughput ratio %.2fx\n", singles_us, batch_us,
              singles_us / batch_us);

  const JointAction idle{};
  const double step_us = time_us(iters * 10, [&] { sink = static_cast<float>(step(s, idle).step_count); });
  const double obs_us = time_us(iters * 10, [&] { sink = encode_observation(s, 1).data[0]; });
  const double simple_us = time_us(iters * 10, [&] { sink = static_cast<float>(simple_act(s, 1, SplitMix64(5)).action); });
  const double safe_us = time_us(iters * 10, [&] { sink = static_cast<float>(safe_actions(s, 1).size()); });
  const double hash_us = time_us(iters * 10, [&] { sink = static_cast<float>(state_hash(s) & 1); });
  std::printf("step %.2f us   observation %.2f us   simple_act %.2f us   safe_actions %.2f us   hash %.2f us\n", step_us,
              obs_us, simple_us, safe_us, hash_us);

  const auto weights = std::make_shared<const ModelWeights>(w);
  for (auto mode : {search::Mode::SinglePlayer, search::Mode::TwoPlayer}) {
    search::AgentSearchConfig c;
    c.search.mode = mode;
    c.search.simulations = 1000;
    search::SearchAgent agent(weights, c, player);
    search::SearchResult r;
    const double move_ms = time_us(3, [&] { r = agent.act(s); }) / 1000.0;
    std::printf("%s-mcts 1000 sims: %.1f ms/move (env+models %.1f ms, inference %.1f ms), depth max %d mean %.2f\n",
                search::to_string(mode), move_ms, r.env_ms, r.inference_ms, r.depth_max, r.depth_mean);
  }
  return 0;
}
