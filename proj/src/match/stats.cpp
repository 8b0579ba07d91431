#include <cmath>
#include <numeric>

#include "pommer/match.hpp"

namespace pommer::match {

using nlohmann::json;

std::vector<int> unique_positions_per_window(const std::vector<Position>& positions, int window) {
  std::vector<int> out;
  if (positions.empty() || window < 1) return out;
  const auto count_distinct = [&](std::size_t begin, std::size_t end) {
    std::array<bool, kNumCells> seen{};
    int n = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const int c = positions[i].index();
      if (!seen[c]) {
        seen[c] = true;
        ++n;
      }
    }
    return n;
  };
  const auto w = static_cast<std::size_t>(window);
  if (positions.size() < w) {
    out.push_back(count_distinct(0, positions.size()));
    return out;
  }
  for (std::size_t b = 0; b + w <= positions.size(); b += w) out.push_back(count_distinct(b, b + w));
  return out;
}

BehaviorStats behavior_stats(const std::vector<EpisodeLog>& logs) {
  BehaviorStats s;
  std::uint64_t unique_sum = 0;
  for (const EpisodeLog& log : logs) {
    // start corner k sits k clockwise quarter turns away from the upper-left
    const dataset::Symmetry to_upper_left(log.start_id, false);
    for (Position p : log.positions) ++s.heatmap[to_upper_left.apply(p).index()];
    for (Action a : log.actions) ++s.action_counts[to_index(a)];
    for (int u : unique_positions_per_window(log.positions)) {
      unique_sum += static_cast<std::uint64_t>(u);
      ++s.windows;
    }
  }
  const std::uint64_t total = std::accumulate(s.action_counts.begin(), s.action_counts.end(), std::uint64_t{0});
  for (int a = 0; a < kNumActions; ++a) {
    s.action_freq[a] = total > 0 ? static_cast<double>(s.action_counts[a]) / static_cast<double>(total) : 0.0;
  }
  s.unique_positions = s.windows > 0 ? static_cast<double>(unique_sum) / static_cast<double>(s.windows) : 0.0;
  return s;
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd m;
  m.count = xs.size();
  if (xs.empty()) return m;
  m.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return m;
}

MatchReport aggregate(const MatchConfig& config, const std::vector<GameRecord>& games) {
  MatchReport r;
  r.games = games.size();
  std::array<std::vector<double>, kNumAgents> steps, depths, times;
  std::array<std::vector<EpisodeLog>, kNumAgents> logs;
  std::array<double, kNumAgents> env_ms{}, inf_ms{};
  std::array<std::size_t, kNumAgents> searched_moves{};

  for (const GameRecord& g : games) {
    if (g.finished) ++r.finished_games;
    for (AgentId id = 0; id < kNumAgents; ++id) {
      const int seat = g.seat_of[id];
      const SeatGameStats& st = g.by_agent[id];
      SeatReport& sr = r.seats[seat];
      ++sr.games;
      switch (st.outcome) {
        case AgentOutcome::Win: ++sr.wins; break;
        case AgentOutcome::Loss: ++sr.losses; break;
        default: ++sr.ties; break;
      }
      steps[seat].push_back(g.env_steps);
      for (int d : st.search_depths) depths[seat].push_back(d);
      for (double t : st.search_ms) times[seat].push_back(t);
      env_ms[seat] += st.env_ms;
      inf_ms[seat] += st.inference_ms;
      searched_moves[seat] += st.search_ms.size();

      EpisodeLog log;
      log.start_id = id;
      log.positions = g.trajectories[id];
      for (int a = 0; a < kNumActions; ++a) {
        log.actions.insert(log.actions.end(), st.action_counts[a], action_from_index(a));
      }
      logs[seat].push_back(std::move(log));
    }
  }

  for (int s = 0; s < kNumAgents; ++s) {
    SeatReport& sr = r.seats[s];
    sr.label = config.seats[s].label();
    const double n = sr.games > 0 ? static_cast<double>(sr.games) : 1.0;
    sr.win_rate = sr.wins / n;
    sr.tie_rate = sr.ties / n;
    sr.loss_rate = sr.losses / n;
    sr.env_steps = mean_std(steps[s]);
    sr.search_depth = mean_std(depths[s]);
    sr.search_time_ms = mean_std(times[s]);
    if (searched_moves[s] > 0) {
      sr.env_ms_per_move = env_ms[s] / static_cast<double>(searched_moves[s]);
      sr.inference_ms_per_move = inf_ms[s] / static_cast<double>(searched_moves[s]);
    }
    sr.behavior = behavior_stats(logs[s]);
  }
  return r;
}

namespace {
json to_json(const MeanStd& m) { return json{{"mean", m.mean}, {"std", m.std}, {"count", m.count}}; }
}  // namespace

json to_json(const MatchReport& r) {
  json seats = json::array();
  for (int s = 0; s < kNumAgents; ++s) {
    const SeatReport& sr = r.seats[s];
    json freq = json::object();
    for (int a = 0; a < kNumActions; ++a) freq[to_string(action_from_index(a))] = sr.behavior.action_freq[a];
    seats.push_back(json{{"seat", s},
                         {"agent", sr.label},
                         {"games", sr.games},
                         {"wins", sr.wins},
                         {"ties", sr.ties},
                         {"losses", sr.losses},
                         {"win_rate", sr.win_rate},
                         {"tie_rate", sr.tie_rate},
                         {"loss_rate", sr.loss_rate},
                         {"env_steps", to_json(sr.env_steps)},
                         {"search_depth", to_json(sr.search_depth)},
                         {"search_time_ms", to_json(sr.search_time_ms)},
                         {"env_ms_per_move", sr.env_ms_per_move},
                         {"inference_ms_per_move", sr.inference_ms_per_move},
                         {"action_freq", freq},
                         {"unique_positions_per_20", sr.behavior.unique_positions}});
  }
  return json{{"games", r.games}, {"finished_games", r.finished_games}, {"seats", seats}};
}

}  // namespace pommer::match
