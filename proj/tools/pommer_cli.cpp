// Command-line harness: demonstrations, match evaluation, RL data generation
// and behavior statistics. Prints one JSON status line on stdout on success
// and one on stderr on failure.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "pommer/binary_io.hpp"
#include "pommer/dataset.hpp"
#include "pommer/match.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pommer;

namespace {

enum Exit { kOk = 0, kUsage = 2, kConfig = 3, kFormat = 4, kInternal = 5 };

int fail(Exit code, const std::string& kind, const std::string& message) {
  std::cerr << json{{"status", "error"}, {"kind", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(FormatErrorKind::Io, "cannot create " + dir + ": " + ec.message());
}

void report_progress(std::size_t done, std::size_t total) {
  static std::size_t last_pct = 101;
  const std::size_t pct = total ? done * 100 / total : 100;
  if (pct != last_pct && (pct % 10 == 0 || done == total)) {
    std::cerr << "progress " << done << "/" << total << std::endl;
    last_pct = pct;
  }
}

struct Common {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> games;
  std::optional<int> threads;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c, bool needs_config) {
  auto* opt = app->add_option("--config", c.config, "JSON configuration file");
  if (needs_config) opt->required();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
  app->add_option("--seed", c.seed, "base seed (overrides the config)");
  app->add_option("--games", c.games, "number of games or episodes (overrides the config)");
  app->add_option("--threads", c.threads, "worker threads, 0 = all cores (overrides the config)");
  app->add_flag("--quiet", c.quiet, "suppress progress lines");
}

match::Progress progress_for(const Common& c) {
  if (c.quiet) return {};
  return report_progress;
}

int cmd_generate_demos(const Common& c) {
  match::DemoConfig dc;
  if (!c.config.empty()) {
    const json j = match::read_json(c.config);
    dc.seed = j.value("seed", dc.seed);
    dc.episodes = j.value("episodes", dc.episodes);
    dc.threads = j.value("threads", dc.threads);
  }
  if (c.seed) dc.seed = *c.seed;
  if (c.games) dc.episodes = *c.games;
  if (c.threads) dc.threads = *c.threads;
  if (dc.episodes < 1) throw match::ConfigError("--games must be >= 1");
  ensure_dir(c.out);
  const std::string path = (fs::path(c.out) / "demos.plrn").string();
  const match::DatagenSummary s = match::generate_demos(dc, path, progress_for(c));
  match::write_json(json{{"seed", dc.seed}, {"episodes", dc.episodes}, {"threads", dc.threads}},
                    (fs::path(c.out) / "config.resolved.json").string());
  std::cout << json{{"status", "ok"},   {"command", "generate-demos"}, {"dataset", path},
                    {"samples", s.samples}, {"episodes", s.episodes}, {"env_steps", s.env_steps},
                    {"seconds", s.seconds}}
                   .dump()
            << std::endl;
  return kOk;
}

int cmd_eval(const Common& c) {
  match::MatchConfig mc = match::parse_match_config(match::read_json(c.config));
  if (c.seed) mc.seed = *c.seed;
  if (c.games) mc.games = *c.games;
  if (c.threads) mc.threads = *c.threads;
  if (mc.games < 1) throw match::ConfigError("--games must be >= 1");
  if (mc.threads < 0) throw match::ConfigError("--threads must be >= 0");
  ensure_dir(c.out);
  const auto games = match::run_match(mc, progress_for(c));
  const match::MatchReport report = match::aggregate(mc, games);
  match::write_match_outputs(mc, games, report, c.out);
  json summary = json::array();
  for (const auto& s : report.seats) summary.push_back({{"agent", s.label}, {"win_rate", s.win_rate}, {"tie_rate", s.tie_rate}});
  std::cout << json{{"status", "ok"}, {"command", "eval"}, {"games", report.games}, {"out", c.out}, {"seats", summary}}.dump()
            << std::endl;
  return kOk;
}

int cmd_rl_datagen(const Common& c, const std::optional<std::uint64_t>& steps, const std::optional<std::string>& weights,
                   bool raw_pi) {
  match::RlDatagenConfig rc = c.config.empty() ? match::parse_rl_config(json::object())
                                               : match::parse_rl_config(match::read_json(c.config));
  if (c.seed) rc.seed = *c.seed;
  if (c.threads) rc.threads = *c.threads;
  if (steps) rc.steps = *steps;
  if (weights) rc.weights = *weights;
  if (raw_pi) rc.record_raw_pi = true;
  if (c.games) throw match::ConfigError("rl-datagen is bounded by --steps, not --games");
  if (rc.steps < 1) throw match::ConfigError("--steps must be >= 1");
  ensure_dir(c.out);
  const std::string path = (fs::path(c.out) / "rl.plrn").string();
  const match::DatagenSummary s = match::rl_datagen(rc, path, progress_for(c));
  match::write_json(match::to_json(rc), (fs::path(c.out) / "config.resolved.json").string());
  std::cout << json{{"status", "ok"},
                    {"command", "rl-datagen"},
                    {"dataset", path},
                    {"samples", s.samples},
                    {"episodes", s.episodes},
                    {"env_steps", s.env_steps},
                    {"seconds", s.seconds},
                    {"samples_per_second", s.seconds > 0 ? s.samples / s.seconds : 0.0}}
                   .dump()
            << std::endl;
  return kOk;
}

json dataset_summary(const std::string& path) {
  const auto samples = dataset::read_dataset(path);
  std::array<std::uint64_t, kNumActions> argmax_counts{};
  std::uint64_t one_hot = 0;
  std::array<std::uint64_t, 3> z_counts{};
  for (const auto& s : samples) {
    const auto it = std::max_element(s.pi.begin(), s.pi.end());
    ++argmax_counts[it - s.pi.begin()];
    one_hot += *it == 1.0f ? 1 : 0;
    ++z_counts[static_cast<int>(s.z) + 1];
  }
  json freq = json::object();
  for (int a = 0; a < kNumActions; ++a) {
    freq[to_string(action_from_index(a))] =
        samples.empty() ? 0.0 : static_cast<double>(argmax_counts[a]) / static_cast<double>(samples.size());
  }
  return json{{"samples", samples.size()},
              {"one_hot_share", samples.empty() ? 0.0 : static_cast<double>(one_hot) / samples.size()},
              {"target_argmax_freq", freq},
              {"z_loss", z_counts[0]},
              {"z_draw", z_counts[1]},
              {"z_win", z_counts[2]}};
}

int cmd_stats(const Common& c, const std::optional<std::string>& replays, const std::optional<std::string>& dataset_path) {
  if (!replays && !dataset_path) throw match::ConfigError("stats needs --replays <dir> and/or --dataset <file>");
  ensure_dir(c.out);
  json out{{"status", "ok"}, {"command", "stats"}};
  if (dataset_path) out["dataset"] = dataset_summary(*dataset_path);
  if (replays) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(*replays)) {
      if (e.path().extension() == ".prep") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw match::ConfigError("no .prep files in " + *replays);
    std::array<std::vector<match::EpisodeLog>, kNumAgents> by_start;
    std::vector<match::EpisodeLog> all;
    for (const auto& f : files) {
      const Replay r = read_replay(f.string());
      const auto states = replay_states(r);
      for (AgentId id = 0; id < kNumAgents; ++id) {
        match::EpisodeLog log;
        log.start_id = id;
        for (std::size_t t = 0; t + 1 < states.size(); ++t) {
          if (!states[t].agents[id].alive) break;
          log.positions.push_back(states[t].agents[id].pos);
          log.actions.push_back(r.actions[t][id]);
        }
        by_start[id].push_back(log);
        all.push_back(std::move(log));
      }
    }
    json agents = json::array();
    const auto describe = [](const match::BehaviorStats& s) {
      json freq = json::object();
      for (int a = 0; a < kNumActions; ++a) freq[to_string(action_from_index(a))] = s.action_freq[a];
      return json{{"action_freq", freq}, {"unique_positions_per_20", s.unique_positions}, {"windows", s.windows}};
    };
    for (AgentId id = 0; id < kNumAgents; ++id) {
      const auto s = match::behavior_stats(by_start[id]);
      match::write_heatmap_csv(s.heatmap, (fs::path(c.out) / ("heatmap_start" + std::to_string(id) + ".csv")).string());
      json d = describe(s);
      d["start_id"] = id;
      agents.push_back(d);
    }
    const auto total = match::behavior_stats(all);
    match::write_heatmap_csv(total.heatmap, (fs::path(c.out) / "heatmap_all.csv").string());
    out["replays"] = json{{"files", files.size()}, {"by_start", agents}, {"all", describe(total)}};
  }
  match::write_json(out, (fs::path(c.out) / "stats.json").string());
  std::cout << out.dump() << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bomber-game search suite"};
  app.require_subcommand(1);

  Common demos_opts, eval_opts, rl_opts, stats_opts;
  auto* demos = app.add_subcommand("generate-demos", "record scripted-agent episodes into a PLRN dataset");
  add_common(demos, demos_opts, false);

  auto* eval = app.add_subcommand("eval", "play a configured match and write CSV/JSON reports");
  add_common(eval, eval_opts, true);

  auto* rl = app.add_subcommand("rl-datagen", "record search targets of one searching seat vs three scripted agents");
  add_common(rl, rl_opts, false);
  std::optional<std::uint64_t> rl_steps;
  std::optional<std::string> rl_weights;
  bool rl_raw_pi = false;
  rl->add_option("--steps", rl_steps, "player decisions to record");
  rl->add_option("--weights", rl_weights, "weights file, 'zero' or 'random:<seed>'");
  rl->add_flag("--raw-pi", rl_raw_pi, "also write the unsharpened visit distributions");

  auto* stats = app.add_subcommand("stats", "behavior statistics from replays and dataset summaries");
  add_common(stats, stats_opts, false);
  std::optional<std::string> stats_replays, stats_dataset;
  stats->add_option("--replays", stats_replays, "directory of .prep replay files");
  stats->add_option("--dataset", stats_dataset, "PLRN dataset file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*demos) return cmd_generate_demos(demos_opts);
    if (*eval) return cmd_eval(eval_opts);
    if (*rl) return cmd_rl_datagen(rl_opts, rl_steps, rl_weights, rl_raw_pi);
    if (*stats) return cmd_stats(stats_opts, stats_replays, stats_dataset);
  } catch (const match::ConfigError& e) {
    return fail(kConfig, "config", e.what());
  } catch (const FormatError& e) {
    return fail(kFormat, to_string(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kConfig, "config", e.what());
  } catch (const std::invalid_argument& e) {
    return fail(kConfig, "config", e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, "internal", e.what());
  }
  return fail(kUsage, "usage", "no subcommand");
}
