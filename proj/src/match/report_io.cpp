#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pommer/binary_io.hpp"
#include "pommer/match.hpp"

namespace pommer::match {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw FormatError(FormatErrorKind::Io, "cannot open " + p.string());
  return out;
}

}  // namespace

std::string results_csv_header() {
  return "game,board_seed,seat,agent,start_id,result,win,tie,loss,env_steps,moves,"
         "search_depth_mean,search_depth_max,search_time_ms_mean,"
         "idle,up,down,left,right,bomb,unique_positions";
}

void write_heatmap_csv(const std::array<std::uint64_t, kNumCells>& heatmap, const std::string& path) {
  std::ofstream out = open_out(path);
  for (int r = 0; r < kBoardSize; ++r) {
    for (int c = 0; c < kBoardSize; ++c) out << (c ? "," : "") << heatmap[r * kBoardSize + c];
    out << '\n';
  }
  if (!out) throw FormatError(FormatErrorKind::Io, "write failed: " + path);
}

void write_match_outputs(const MatchConfig& config, const std::vector<GameRecord>& games, const MatchReport& report,
                         const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(FormatErrorKind::Io, "cannot create " + out_dir + ": " + ec.message());

  write_json(to_json(config), (dir / "config.resolved.json").string());
  write_json(to_json(report), (dir / "report.json").string());

  std::ofstream csv = open_out(dir / "results.csv");
  csv.precision(6);
  csv << results_csv_header() << '\n';
  for (const GameRecord& g : games) {
    for (int seat = 0; seat < kNumAgents; ++seat) {
      AgentId id = 0;
      while (g.seat_of[id] != seat) ++id;
      const SeatGameStats& st = g.by_agent[id];
      const char* result = st.outcome == AgentOutcome::Win    ? "win"
                           : st.outcome == AgentOutcome::Loss ? "loss"
                                                              : "tie";
      std::vector<double> depths(st.search_depths.begin(), st.search_depths.end());
      const MeanStd depth = mean_std(depths);
      const MeanStd time = mean_std(st.search_ms);
      const int depth_max =
          st.search_depths.empty() ? 0 : *std::max_element(st.search_depths.begin(), st.search_depths.end());
      const auto windows = unique_positions_per_window(g.trajectories[id]);
      const double unique =
          windows.empty() ? 0.0 : std::accumulate(windows.begin(), windows.end(), 0.0) / windows.size();
      csv << g.game_index << ',' << g.board_seed << ',' << seat << ',' << config.seats[seat].label() << ',' << id
          << ',' << result << ',' << (st.outcome == AgentOutcome::Win) << ','
          << (st.outcome != AgentOutcome::Win && st.outcome != AgentOutcome::Loss) << ','
          << (st.outcome == AgentOutcome::Loss) << ',' << g.env_steps << ',' << st.moves << ',' << depth.mean << ','
          << depth_max << ',' << time.mean;
      for (std::uint32_t n : st.action_counts) csv << ',' << n;
      csv << ',' << unique << '\n';
    }
  }
  if (!csv) throw FormatError(FormatErrorKind::Io, "write failed: results.csv");

  for (int s = 0; s < kNumAgents; ++s) {
    write_heatmap_csv(report.seats[s].behavior.heatmap, (dir / ("heatmap_seat" + std::to_string(s) + ".csv")).string());
  }

  if (config.write_replays) {
    fs::create_directories(dir / "replays", ec);
    if (ec) throw FormatError(FormatErrorKind::Io, "cannot create replays directory: " + ec.message());
    for (const GameRecord& g : games) {
      std::ostringstream name;
      name << "game_" << g.game_index << ".prep";
      write_replay(g.replay, (dir / "replays" / name.str()).string());
    }
  }
}

}  // namespace pommer::match
