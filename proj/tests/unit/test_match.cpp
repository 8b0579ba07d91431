#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "pommer/match.hpp"
#include "test_states.hpp"

using namespace pommer;
using namespace pommer::match;
using nlohmann::json;

namespace {

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("pommer_match_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

MatchConfig config_of(const json& j) { return parse_match_config(j); }

bool is_one_hot(const std::array<float, kNumActions>& pi) {
  int ones = 0;
  for (float p : pi) {
    if (p == 1.0f) {
      ++ones;
    } else if (p != 0.0f) {
      return false;
    }
  }
  return ones == 1;
}

}  // namespace

TEST_CASE("unique positions per window") {
  CHECK(unique_positions_per_window({}).empty());
  const std::vector<Position> idle(45, Position(1, 1));
  CHECK(unique_positions_per_window(idle) == std::vector<int>{1, 1});

  std::vector<Position> loop;
  const std::array<Position, 4> cycle{Position(1, 1), Position(1, 2), Position(2, 2), Position(2, 1)};
  for (int t = 0; t < 60; ++t) loop.push_back(cycle[t % 4]);
  CHECK(unique_positions_per_window(loop) == std::vector<int>{4, 4, 4});

  std::vector<Position> line;
  for (int t = 0; t < 25; ++t) line.push_back(Position(t % 11, t / 11));
  CHECK(unique_positions_per_window(line) == std::vector<int>{20});
  CHECK(unique_positions_per_window(std::vector<Position>(line.begin(), line.begin() + 7)) == std::vector<int>{7});
}

TEST_CASE("behavior statistics") {
  std::vector<EpisodeLog> logs;
  for (AgentId id = 0; id < kNumAgents; ++id) {
    EpisodeLog log;
    log.start_id = id;
    log.positions.assign(40, kStartPositions[id]);
    log.actions.assign(40, Action::Idle);
    logs.push_back(log);
  }
  const BehaviorStats idle = behavior_stats(logs);
  CHECK(idle.unique_positions == 1.0);
  CHECK(idle.windows == 8);
  CHECK(idle.action_freq[0] == 1.0);
  CHECK(idle.heatmap[kStartPositions[0].index()] == 160);
  CHECK(std::accumulate(idle.heatmap.begin(), idle.heatmap.end(), std::uint64_t{0}) == 160);

  // every start corner is rotated onto agent 0's corner
  for (AgentId id = 0; id < kNumAgents; ++id) {
    EpisodeLog one = logs[id];
    one.positions = {kStartPositions[id], offset(kStartPositions[id], id % 2 == 0 ? Action::Down : Action::Up)};
    one.actions = {Action::Idle, Action::Down};
    const BehaviorStats s = behavior_stats({one});
    CHECK(s.heatmap[kStartPositions[0].index()] == 1);
    CHECK(s.action_counts[to_index(Action::Down)] == 1);
    CHECK(s.action_freq[to_index(Action::Down)] == 0.5);
  }

  // conservation on real games
  std::vector<EpisodeLog> played;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::array<EpisodeLog, kNumAgents> per{};
    for (AgentId id = 0; id < kNumAgents; ++id) per[id].start_id = id;
    testing::play_simple(seed, 800, [&](const GameState& prev, const GameState&) {
      for (AgentId id = 0; id < kNumAgents; ++id) {
        if (!prev.agents[id].alive) continue;
        per[id].positions.push_back(prev.agents[id].pos);
        per[id].actions.push_back(Action::Idle);
      }
    });
    for (auto& l : per) played.push_back(l);
  }
  std::uint64_t alive_steps = 0;
  for (const auto& l : played) alive_steps += l.positions.size();
  const BehaviorStats s = behavior_stats(played);
  CHECK(std::accumulate(s.heatmap.begin(), s.heatmap.end(), std::uint64_t{0}) == alive_steps);
  CHECK(std::accumulate(s.action_counts.begin(), s.action_counts.end(), std::uint64_t{0}) == alive_steps);
}

TEST_CASE("mean and standard deviation") {
  const MeanStd m = mean_std({1.0, 2.0, 3.0, 4.0});
  CHECK(m.mean == 2.5);
  CHECK(m.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(m.count == 4);
  CHECK(mean_std({}).count == 0);
}

TEST_CASE("match config parsing") {
  const MatchConfig c = config_of(json::parse(R"({
    "seats": ["simple", "fixed:idle", {"agent": "sp-mcts", "weights": "random:3",
              "search": {"simulations": 50, "c_puct": 1.5, "opponent_model": "rawnet:zero"}},
              "tp-mcts"],
    "games": 12, "seed": 9, "randomize_seats": false})"));
  CHECK(c.games == 12);
  CHECK(c.seed == 9);
  CHECK(!c.randomize_seats);
  CHECK(c.seats[0].kind == AgentKind::Simple);
  CHECK(c.seats[1].kind == AgentKind::Fixed);
  CHECK(c.seats[1].fixed_action == Action::Idle);
  CHECK(c.seats[2].kind == AgentKind::SpMcts);
  CHECK(c.seats[2].search.simulations == 50);
  CHECK(c.seats[2].search.c_puct == 1.5);
  CHECK(c.seats[2].opponent_models[1] == "rawnet:zero");
  CHECK(c.seats[3].search.mode == search::Mode::TwoPlayer);
  CHECK(c.seats[3].label() == "tp-mcts");

  // resolved config parses back to the same thing
  const MatchConfig again = parse_match_config(to_json(c));
  CHECK(to_json(again) == to_json(c));

  const auto rejects = [](const char* text) {
    CHECK_THROWS_AS(parse_match_config(json::parse(text)), ConfigError);
  };
  rejects(R"({"seats": ["simple", "simple", "simple"]})");
  rejects(R"({"seats": ["simple", "simple", "simple", "robot"]})");
  rejects(R"({"seats": ["simple", "simple", "simple", "fixed:jump"]})");
  rejects(R"({"seats": ["simple", "simple", "simple", "simple"], "games": 0})");
  rejects(R"({"seats": ["simple", "simple", "simple", "simple"], "step_limit": 900})");
  rejects(R"({"seats": ["simple", "simple", "simple", "simple"], "colour": "red"})");
  rejects(R"({"seats": ["simple", "simple", "simple", {"agent": "simple", "search": {}}]})");
  rejects(R"({"seats": ["simple", "simple", "simple", {"agent": "sp-mcts", "search": {"mode": "tp"}}]})");
  rejects(R"({"seats": ["simple", "simple", "simple", {"agent": "sp-mcts", "search": {"simulations": 0}}]})");
  rejects(R"({"seats": ["simple", "simple", "simple", {"agent": "sp-mcts", "search": {"opponent_model": "oracle"}}]})");
  rejects(R"([1, 2])");
}

TEST_CASE("seat permutations and seeds") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    auto p = seat_permutation(5, i, true);
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::array<int, 4>{0, 1, 2, 3});
    CHECK(seat_permutation(5, i, false) == std::array<int, 4>{0, 1, 2, 3});
  }
  CHECK(game_seed(5, 0) != game_seed(5, 1));
  CHECK(game_seed(5, 0) != game_seed(6, 0));
}

TEST_CASE("matches are deterministic and the report is consistent") {
  MatchConfig c = config_of(json::parse(R"({
    "seats": ["simple", "simple", "simple", {"agent": "sp-mcts", "weights": "random:1",
              "search": {"simulations": 8}}],
    "games": 6, "seed": 4, "step_limit": 150})"));
  const auto a = run_match(c);
  c.threads = 1;
  const auto b = run_match(c);
  REQUIRE(a.size() == 6);
  for (std::size_t g = 0; g < a.size(); ++g) {
    CHECK(a[g].env_steps == b[g].env_steps);
    CHECK(a[g].seat_of == b[g].seat_of);
    CHECK(a[g].replay.actions == b[g].replay.actions);
    CHECK(a[g].env_steps <= 150);
  }
  const MatchReport r = aggregate(c, a);
  CHECK(r.games == 6);
  for (const SeatReport& s : r.seats) {
    CHECK(s.games == 6);
    CHECK(s.wins + s.ties + s.losses == 6);
    CHECK(s.win_rate + s.tie_rate + s.loss_rate == doctest::Approx(1.0));
  }
  CHECK(r.seats[3].search_depth.count > 0);
  CHECK(r.seats[0].search_depth.count == 0);

  const std::string dir = temp_dir("outputs");
  write_match_outputs(c, a, r, dir);
  const std::string csv = read_file(dir + "/results.csv");
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == results_csv_header());
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 24);
  CHECK(read_json(dir + "/config.resolved.json") == to_json(c));
  const json report = read_json(dir + "/report.json");
  CHECK(report.at("games") == 6);
  for (int k = 0; k < kNumAgents; ++k) CHECK(std::filesystem::exists(dir + "/heatmap_seat" + std::to_string(k) + ".csv"));
}

TEST_CASE("an idle seat rarely wins against three heuristic agents") {
  const MatchConfig c = config_of(json::parse(R"({"seats": ["fixed:idle", "simple", "simple", "simple"],
                                                  "games": 60, "seed": 21})"));
  const MatchReport r = aggregate(c, run_match(c));
  CHECK(r.seats[0].win_rate < 0.10);
  CHECK(r.seats[0].behavior.action_freq[0] == 1.0);
  CHECK(r.seats[0].behavior.unique_positions == 1.0);
}

TEST_CASE("demonstration datasets") {
  const std::string dir = temp_dir("demos");
  DemoConfig c;
  c.seed = 13;
  c.episodes = 1;
  const DatagenSummary s = generate_demos(c, dir + "/a.plrn");
  CHECK(s.episodes == 1);
  CHECK(s.samples >= 4);
  CHECK(s.samples <= 4 * kMaxSteps);
  const auto samples = dataset::read_dataset(dir + "/a.plrn");
  CHECK(samples.size() == s.samples);
  for (const auto& x : samples) {
    CHECK(is_one_hot(x.pi));
    CHECK((x.z == -1.0f || x.z == 0.0f || x.z == 1.0f));
  }
  c.episodes = 3;
  c.threads = 1;
  generate_demos(c, dir + "/b.plrn");
  c.threads = 0;
  generate_demos(c, dir + "/c.plrn");
  CHECK(read_file(dir + "/b.plrn") == read_file(dir + "/c.plrn"));
  c.seed = 14;
  generate_demos(c, dir + "/d.plrn");
  CHECK(read_file(dir + "/b.plrn") != read_file(dir + "/d.plrn"));

  CHECK_THROWS(generate_demos(DemoConfig{0, 0, 0}, dir + "/e.plrn"));
}

TEST_CASE("rl data generation") {
  const std::string dir = temp_dir("rl");
  RlDatagenConfig c = parse_rl_config(json::parse(R"({"weights": "random:2", "steps": 60, "seed": 3,
                                                       "search": {"simulations": 24}, "record_raw_pi": true})"));
  CHECK(c.search.root_noise.has_value());
  CHECK(c.search.temperature == 0.0);
  const DatagenSummary s = rl_datagen(c, dir + "/rl.plrn");
  CHECK(s.samples == 60);
  const auto samples = dataset::read_dataset(dir + "/rl.plrn");
  REQUIRE(samples.size() == 60);

  std::istringstream raw(read_file(dir + "/rl.plrn.raw_pi.csv"));
  std::string line;
  std::getline(raw, line);
  int mixtures = 0;
  for (const auto& x : samples) {
    REQUIRE(std::getline(raw, line));
    std::array<float, kNumActions> pi{};
    std::istringstream fields(line);
    std::string cell;
    std::getline(fields, cell, ',');
    for (float& p : pi) {
      std::getline(fields, cell, ',');
      p = std::stof(cell);
    }
    const auto sharpened = search::policy_target_sharpen(pi);
    for (int a = 0; a < kNumActions; ++a) CHECK(x.pi[a] == doctest::Approx(sharpened[a]).epsilon(1e-6));
    CHECK(std::accumulate(x.pi.begin(), x.pi.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-5));
    mixtures += !is_one_hot(x.pi);
  }
  CHECK(mixtures > 30);

  const DatagenSummary again = rl_datagen(c, dir + "/rl2.plrn");
  CHECK(again.samples == 60);
  CHECK(read_file(dir + "/rl.plrn") == read_file(dir + "/rl2.plrn"));

  CHECK_THROWS_AS(parse_rl_config(json::parse(R"({"search": {"opponent_model": "rawnet:zero"}})")), ConfigError);
  CHECK_THROWS_AS(parse_rl_config(json::parse(R"({"stepz": 4})")), ConfigError);
}
