#pragma once

// Match harness: seat configuration, agents, the game worker pool, behavior
// statistics, report aggregation and data generation.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pommer/dataset.hpp"
#include "pommer/engine.hpp"
#include "pommer/model.hpp"
#include "pommer/opponents.hpp"
#include "pommer/search.hpp"

namespace pommer::match {

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// ---- configuration ---------------------------------------------------------

enum class AgentKind { Simple, RawNet, Fixed, SpMcts, TpMcts };

const char* to_string(AgentKind k) noexcept;

struct SeatSpec {
  AgentKind kind = AgentKind::Simple;
  std::string weights = "zero";  // RawNet and search seats: path, "zero" or "random:<seed>"
  Action fixed_action = Action::Idle;
  search::SearchConfig search;
  std::array<std::string, kNumAgents> opponent_models{"simple", "simple", "simple", "simple"};
  bool filter_priors = true;
  bool search_true_state = false;

  bool is_search() const noexcept { return kind == AgentKind::SpMcts || kind == AgentKind::TpMcts; }
  /// Short identifier: simple, rawnet, fixed:idle, sp-mcts, tp-mcts.
  std::string label() const;
};

struct MatchConfig {
  std::array<SeatSpec, kNumAgents> seats;
  int games = 100;
  std::uint64_t seed = 0;
  bool randomize_seats = true;
  int step_limit = kMaxSteps;
  int threads = 0;  // 0: runtime default
  bool write_replays = false;
};

/// Parses one seat: a string ("simple", "rawnet:<w>", "fixed:<a>",
/// "sp-mcts", "tp-mcts") or an object with "agent" and optional "weights",
/// "search", "filter_priors", "search_true_state".
SeatSpec parse_seat(const nlohmann::json& j);
MatchConfig parse_match_config(const nlohmann::json& j);
nlohmann::json to_json(const SeatSpec& s);
nlohmann::json to_json(const MatchConfig& c);
nlohmann::json to_json(const search::SearchConfig& c);
/// The "search" block: mode, simulations, c_puct, q_init, temperature,
/// noise_eps, noise_conc, seed, max_depth, reuse_tree, eval_player_node_post_step.
search::SearchConfig parse_search_config(const nlohmann::json& j, search::SearchConfig base = {});

// ---- agents ----------------------------------------------------------------

struct Decision {
  Action action = Action::Idle;
  std::optional<search::SearchResult> search;
};

/// A player bound to one seat for one game.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual Decision act(const GameState& state) = 0;
};

/// Weights loaded once and shared by every game.
class WeightCache {
 public:
  std::shared_ptr<const ModelWeights> get(const std::string& spec);

 private:
  std::vector<std::pair<std::string, std::shared_ptr<const ModelWeights>>> loaded_;
};

/// Resolved, shareable seat: spec plus loaded weights and opponent models.
struct SeatPlan {
  SeatSpec spec;
  std::shared_ptr<const ModelWeights> weights;
  std::array<OpponentModel, kNumAgents> opponent_models;
};

SeatPlan plan_seat(const SeatSpec& spec, WeightCache& cache);

/// Creates the agent for `plan` playing as `id` in the game seeded `game_seed`.
std::unique_ptr<Agent> make_agent(const SeatPlan& plan, AgentId id, std::uint64_t game_seed);

// ---- games -----------------------------------------------------------------

struct SeatGameStats {
  AgentOutcome outcome = AgentOutcome::Draw;
  int moves = 0;  // decisions taken while alive
  std::array<std::uint32_t, kNumActions> action_counts{};
  std::vector<int> search_depths;  // depth_max per searched move
  std::vector<double> search_ms;   // elapsed per searched move
  double env_ms = 0.0;
  double inference_ms = 0.0;
};

struct GameRecord {
  std::uint64_t game_index = 0;
  std::uint64_t board_seed = 0;
  /// seat_of[id]: configured seat controlling agent id (start corner id).
  std::array<int, kNumAgents> seat_of{0, 1, 2, 3};
  int env_steps = 0;
  bool finished = false;  // reached a terminal state before the step limit
  std::array<SeatGameStats, kNumAgents> by_agent;
  /// Position of each agent at every tick it acted.
  std::array<std::vector<Position>, kNumAgents> trajectories;
  Replay replay;
};

/// Board seed and seat permutation for game `index`.
std::uint64_t game_seed(std::uint64_t base_seed, std::uint64_t index);
std::array<int, kNumAgents> seat_permutation(std::uint64_t base_seed, std::uint64_t index, bool randomize);

/// Plays one game to the end (or the step limit). Pure given the inputs.
GameRecord play_game(const std::array<SeatPlan, kNumAgents>& seats, std::uint64_t base_seed, std::uint64_t index,
                     bool randomize_seats, int step_limit);

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Runs config.games games over a worker pool; results are in game order.
std::vector<GameRecord> run_match(const MatchConfig& config, const Progress& progress = {});

// ---- statistics ------------------------------------------------------------

struct EpisodeLog {
  AgentId start_id = 0;  // start corner
  std::vector<Position> positions;
  std::vector<Action> actions;
};

inline constexpr int kUniqueWindow = 20;

struct BehaviorStats {
  std::array<std::uint64_t, kNumActions> action_counts{};
  std::array<double, kNumActions> action_freq{};
  /// Visits with every start corner rotated to the upper-left.
  std::array<std::uint64_t, kNumCells> heatmap{};
  /// Distinct cells per 20-step window, averaged over windows and episodes.
  double unique_positions = 0.0;
  std::uint64_t windows = 0;
};

/// Distinct positions per window for one trajectory. Only full windows are
/// counted unless the trajectory is shorter than one window.
std::vector<int> unique_positions_per_window(const std::vector<Position>& positions, int window = kUniqueWindow);
BehaviorStats behavior_stats(const std::vector<EpisodeLog>& logs);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};
MeanStd mean_std(const std::vector<double>& xs);

struct SeatReport {
  std::string label;
  std::size_t games = 0;
  std::size_t wins = 0;
  std::size_t ties = 0;
  std::size_t losses = 0;
  double win_rate = 0.0;
  double tie_rate = 0.0;
  double loss_rate = 0.0;
  MeanStd env_steps;
  MeanStd search_depth;
  MeanStd search_time_ms;
  double env_ms_per_move = 0.0;
  double inference_ms_per_move = 0.0;
  BehaviorStats behavior;
};

struct MatchReport {
  std::array<SeatReport, kNumAgents> seats;
  std::size_t games = 0;
  std::size_t finished_games = 0;
};

/// Ties include games stopped at the step limit.
MatchReport aggregate(const MatchConfig& config, const std::vector<GameRecord>& games);
nlohmann::json to_json(const MatchReport& r);

// ---- output ----------------------------------------------------------------

/// Writes results.csv, report.json, heatmap_seat<k>.csv,
/// config.resolved.json and, if enabled, replays/game_<n>.prep.
void write_match_outputs(const MatchConfig& config, const std::vector<GameRecord>& games, const MatchReport& report,
                         const std::string& out_dir);
std::string results_csv_header();
void write_heatmap_csv(const std::array<std::uint64_t, kNumCells>& heatmap, const std::string& path);
void write_json(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json(const std::string& path);

// ---- data generation -------------------------------------------------------

struct DemoConfig {
  std::uint64_t seed = 0;
  int episodes = 1;
  int threads = 0;
};

struct DatagenSummary {
  std::uint64_t samples = 0;
  std::uint64_t episodes = 0;
  std::uint64_t env_steps = 0;
  double seconds = 0.0;
};

/// Four scripted agents per episode; every living agent's step is recorded
/// with a one-hot target.
DatagenSummary generate_demos(const DemoConfig& config, const std::string& path, const Progress& progress = {});

struct RlDatagenConfig {
  std::string weights = "zero";
  search::SearchConfig search;
  std::uint64_t steps = 1000;
  std::uint64_t seed = 0;
  int threads = 0;
  bool filter_priors = true;
  /// Writes the unsharpened visit distributions next to the dataset.
  bool record_raw_pi = false;
};

RlDatagenConfig parse_rl_config(const nlohmann::json& j);
nlohmann::json to_json(const RlDatagenConfig& c);

/// One search seat against three scripted agents until `steps` decisions are
/// recorded; targets are sharpened visit distributions.
DatagenSummary rl_datagen(const RlDatagenConfig& config, const std::string& path, const Progress& progress = {});

}  // namespace pommer::match
