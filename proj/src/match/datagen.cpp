#include <algorithm>
#include <chrono>
#include <fstream>

#ifdef POMMER_HAVE_OPENMP
#include <omp.h>
#endif

#include "pommer/binary_io.hpp"
#include "pommer/match.hpp"
#include "pommer/pommerman_search.hpp"

namespace pommer::match {

namespace {

struct EpisodeSamples {
  std::vector<dataset::Sample> samples;
  std::vector<std::array<float, kNumActions>> raw_pi;
  int env_steps = 0;
};

int resolve_threads(int requested) {
#ifdef POMMER_HAVE_OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

dataset::Sample make_sample(const GameState& s, AgentId id, std::uint64_t episode) {
  dataset::Sample x;
  x.obs = encode_observation(s, id);
  x.agent_id = static_cast<std::uint8_t>(id);
  x.episode_id = static_cast<std::uint32_t>(episode);
  x.step_index = static_cast<std::uint16_t>(s.step_count);
  return x;
}

EpisodeSamples demo_episode(std::uint64_t base_seed, std::uint64_t index) {
  const std::uint64_t seed = game_seed(base_seed, index);
  const auto seats = seat_permutation(base_seed, index, true);
  std::array<SplitMix64, kNumAgents> rngs;
  for (AgentId id = 0; id < kNumAgents; ++id) {
    rngs[id] = SplitMix64(mix_combine(seed, 0xde70000ULL + static_cast<std::uint64_t>(seats[id])));
  }
  EpisodeSamples ep;
  GameState state = generate_board(seed);
  while (!is_terminal(state)) {
    JointAction joint{};
    joint.fill(Action::Idle);
    for (AgentId id = 0; id < kNumAgents; ++id) {
      if (!state.agents[id].alive) continue;
      const SimpleActResult r = simple_act(state, id, rngs[id]);
      rngs[id] = r.rng;
      joint[id] = r.action;
      dataset::Sample x = make_sample(state, id, index);
      x.pi[to_index(r.action)] = 1.0f;
      ep.samples.push_back(std::move(x));
    }
    state = step(state, joint);
  }
  dataset::assign_outcomes(ep.samples, state);
  ep.env_steps = state.step_count;
  return ep;
}

EpisodeSamples rl_episode(const RlDatagenConfig& config, const std::shared_ptr<const ModelWeights>& weights,
                          std::uint64_t index) {
  const std::uint64_t seed = game_seed(config.seed, index);
  const auto seats = seat_permutation(config.seed, index, true);
  AgentId player = 0;
  for (AgentId id = 0; id < kNumAgents; ++id) {
    if (seats[id] == 0) player = id;
  }
  search::AgentSearchConfig sc;
  sc.search = config.search;
  sc.search.seed = mix_combine(config.search.seed, seed);
  sc.filter_priors = config.filter_priors;
  search::SearchAgent searcher(weights, sc, player);
  std::array<SplitMix64, kNumAgents> rngs;
  for (AgentId id = 0; id < kNumAgents; ++id) {
    rngs[id] = SplitMix64(mix_combine(seed, 0xde70000ULL + static_cast<std::uint64_t>(seats[id])));
  }

  EpisodeSamples ep;
  GameState state = generate_board(seed);
  while (!is_terminal(state)) {
    JointAction joint{};
    joint.fill(Action::Idle);
    for (AgentId id = 0; id < kNumAgents; ++id) {
      if (!state.agents[id].alive) continue;
      if (id == player) {
        const search::SearchResult r = searcher.act(state);
        joint[id] = r.chosen_action;
        dataset::Sample x = make_sample(state, id, index);
        x.pi = search::policy_target_sharpen(r.pi);
        ep.samples.push_back(std::move(x));
        ep.raw_pi.push_back(r.pi);
      } else {
        const SimpleActResult r = simple_act(state, id, rngs[id]);
        rngs[id] = r.rng;
        joint[id] = r.action;
      }
    }
    state = step(state, joint);
  }
  dataset::assign_outcomes(ep.samples, state);
  ep.env_steps = state.step_count;
  return ep;
}

// Plays episodes in parallel blocks and hands them to `sink` in index order
// until it returns false.
template <class Play, class Sink>
void run_blocks(int threads, std::uint64_t max_episodes, Play&& play, Sink&& sink) {
  const auto block = static_cast<std::uint64_t>(std::max(1, threads) * 2);
  for (std::uint64_t start = 0; start < max_episodes; start += block) {
    const std::uint64_t n = std::min(block, max_episodes - start);
    std::vector<EpisodeSamples> eps(n);
    std::exception_ptr failure;
#ifdef POMMER_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#endif
    for (std::uint64_t i = 0; i < n; ++i) {
      try {
        eps[i] = play(start + i);
      } catch (...) {
#ifdef POMMER_HAVE_OPENMP
#pragma omp critical(pommer_datagen_failure)
#endif
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
    for (EpisodeSamples& ep : eps) {
      if (!sink(ep)) return;
    }
  }
}

}  // namespace

DatagenSummary generate_demos(const DemoConfig& config, const std::string& path, const Progress& progress) {
  if (config.episodes < 1) throw ConfigError("episodes must be >= 1");
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = resolve_threads(config.threads);
  dataset::DatasetWriter writer(path);
  DatagenSummary summary;
  const auto total = static_cast<std::uint64_t>(config.episodes);
  run_blocks(
      threads, total, [&](std::uint64_t i) { return demo_episode(config.seed, i); },
      [&](EpisodeSamples& ep) {
        writer.append(ep.samples);
        summary.samples += ep.samples.size();
        summary.env_steps += static_cast<std::uint64_t>(ep.env_steps);
        ++summary.episodes;
        if (progress) progress(summary.episodes, total);
        return true;
      });
  writer.finish();
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

DatagenSummary rl_datagen(const RlDatagenConfig& config, const std::string& path, const Progress& progress) {
  if (config.steps < 1) throw ConfigError("steps must be >= 1");
  search::validate(config.search);
  const auto t0 = std::chrono::steady_clock::now();
  const int threads = resolve_threads(config.threads);
  const auto weights = std::make_shared<const ModelWeights>(load_weights_spec(config.weights));
  dataset::DatasetWriter writer(path);
  std::ofstream raw;
  if (config.record_raw_pi) {
    raw.open(path + ".raw_pi.csv");
    if (!raw) throw FormatError(FormatErrorKind::Io, "cannot open " + path + ".raw_pi.csv");
    raw << "sample,idle,up,down,left,right,bomb\n";
    raw.precision(9);
  }
  DatagenSummary summary;
  // every episode records at least one decision, so this bound is never hit
  const std::uint64_t max_episodes = config.steps;
  run_blocks(
      threads, max_episodes, [&](std::uint64_t i) { return rl_episode(config, weights, i); },
      [&](EpisodeSamples& ep) {
        const std::uint64_t take = std::min<std::uint64_t>(ep.samples.size(), config.steps - summary.samples);
        writer.append(std::span<const dataset::Sample>(ep.samples.data(), take));
        if (raw.is_open()) {
          for (std::uint64_t k = 0; k < take; ++k) {
            raw << summary.samples + k;
            for (float p : ep.raw_pi[k]) raw << ',' << p;
            raw << '\n';
          }
        }
        summary.samples += take;
        summary.env_steps += static_cast<std::uint64_t>(ep.env_steps);
        ++summary.episodes;
        if (progress) progress(summary.samples, config.steps);
        return summary.samples < config.steps;
      });
  writer.finish();
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summary;
}

}  // namespace pommer::match
