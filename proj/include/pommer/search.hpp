#pragma once

// PUCT tree search that reduces an n-player game to a single-player or a
// two-player search.
//
// Single-player: only the searching agent's actions branch; every other
// agent follows its opponent model inside the environment step, and values
// are backed up with the same sign at every depth.
//
// Two-player: the searching agent and one selected opponent (the closest
// living one, re-chosen at every opponent node) branch alternately. A player
// node does not step the environment; it records the chosen action and hands
// over to an opponent node, whose expansion fills the remaining agents from
// their models and steps. Values flip sign at every ply.
//
// Edge statistics at a node are always from the perspective of that node's
// active agent.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pommer/engine.hpp"
#include "pommer/rng.hpp"

namespace pommer::search {

enum class Mode { SinglePlayer, TwoPlayer };
enum class NodeKind : std::uint8_t { PlayerDecision, OpponentDecision };

const char* to_string(Mode m) noexcept;

/// Deterministic multi-agent environment the search can plan in. Terminal
/// values are real numbers in [-1, 1] from the given agent's perspective.
template <class E>
concept SimulationEnvironment = requires(const E& env, const typename E::State& s, const JointAction& ja, AgentId id) {
  typename E::State;
  { env.num_agents() } -> std::convertible_to<int>;
  { env.is_alive(s, id) } -> std::convertible_to<bool>;
  { env.step(s, ja) } -> std::same_as<typename E::State>;
  { env.is_terminal(s) } -> std::convertible_to<bool>;
  { env.terminal_value(s, id) } -> std::convertible_to<double>;
  { env.position(s, id) } -> std::same_as<Position>;
  { env.hash(s) } -> std::convertible_to<std::uint64_t>;
};

struct Evaluation {
  std::array<float, kNumActions> priors{};
  float value = 0.0f;
};

struct RootNoise {
  double epsilon = 0.25;
  double concentration = 0.2;
};

struct SearchConfig {
  Mode mode = Mode::SinglePlayer;
  int simulations = 100;
  double c_puct = 2.5;
  double q_init = 0.0;
  std::optional<RootNoise> root_noise;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  int max_depth = 2 * kMaxSteps;
  bool reuse_tree = false;
  /// Two-player only: value a player node on the state after one step with
  /// modelled opponent actions instead of on its own state.
  bool eval_player_node_post_step = false;
  /// Keep a per-simulation log of paths and backed-up values.
  bool record_log = false;
};

/// Checks the structural constraints on a config; throws std::invalid_argument.
void validate(const SearchConfig& config);

struct EdgeStats {
  std::array<std::uint32_t, kNumActions> visits{};
  std::array<double, kNumActions> value_sum{};
  std::array<float, kNumActions> prior{};

  std::uint32_t total_visits() const noexcept;
  /// W/N, or q_init for an unvisited edge.
  double q(int a, double q_init) const noexcept;
};

/// argmax_a Q(s,a) + c_puct P(s,a) sqrt(sum_b N(s,b)) / (1 + N(s,a)),
/// lowest index on ties.
Action puct_select(const EdgeStats& stats, double c_puct, double q_init);

/// 0.5 pi + 0.5 one_hot(argmax pi), lowest index on ties.
std::array<float, kNumActions> policy_target_sharpen(std::span<const float> pi);

/// (1 - eps) P + eps Dirichlet(concentration).
std::array<float, kNumActions> mix_root_noise(const std::array<float, kNumActions>& priors, const RootNoise& noise,
                                              std::uint64_t seed);

/// Index of the largest count, lowest index on ties.
int argmax_visits(const std::array<std::uint32_t, kNumActions>& visits) noexcept;

/// Samples an action with probability proportional to visits^(1/temperature).
int sample_visits(const std::array<std::uint32_t, kNumActions>& visits, double temperature, std::uint64_t seed);

template <class State>
struct Node {
  State state;
  NodeKind kind = NodeKind::PlayerDecision;
  AgentId active_agent = 0;
  Action pending_player_action = Action::Idle;  // opponent nodes only
  int depth = 0;
  std::int32_t parent = -1;
  Action parent_action = Action::Idle;
  bool terminal = false;
  /// Value backed into the parent edge when this node was created, from the
  /// parent's active agent's perspective. Re-used on terminal revisits.
  double entry_value = 0.0;
  bool evaluated = false;
  float own_value = 0.0f;  // evaluation of `state` for the active agent
  EdgeStats edges;
  std::array<std::int32_t, kNumActions> children{-1, -1, -1, -1, -1, -1};

  double q(Action a, double q_init) const noexcept { return edges.q(to_index(a), q_init); }
  int child_count() const noexcept {
    return static_cast<int>(std::count_if(children.begin(), children.end(), [](std::int32_t c) { return c >= 0; }));
  }
};

struct PathEdge {
  std::int32_t node = 0;
  Action action = Action::Idle;
};

struct SimulationRecord {
  std::vector<PathEdge> path;
  double leaf_value = 0.0;
};

template <class State>
using Tree = std::vector<Node<State>>;

/// N += 1 and W += value on every edge of the path.
template <class State>
void backprop_sp(Tree<State>& tree, std::span<const PathEdge> path, double leaf_value) {
  for (const PathEdge& e : path) {
    auto& stats = tree[e.node].edges;
    ++stats.visits[to_index(e.action)];
    stats.value_sum[to_index(e.action)] += leaf_value;
  }
}

/// Walking from the leaf edge to the root, the value flips sign at each ply.
template <class State>
void backprop_negamax(Tree<State>& tree, std::span<const PathEdge> path, double leaf_value) {
  double v = leaf_value;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    auto& stats = tree[it->node].edges;
    ++stats.visits[to_index(it->action)];
    stats.value_sum[to_index(it->action)] += v;
    v = -v;
  }
}

/// Closest living opponent by Manhattan distance, lowest id on ties.
template <SimulationEnvironment Env>
AgentId select_opponent(const Env& env, const typename Env::State& state, AgentId player) {
  AgentId best = -1;
  int best_dist = 0;
  const Position me = env.position(state, player);
  for (AgentId id = 0; id < env.num_agents(); ++id) {
    if (id == player || !env.is_alive(state, id)) continue;
    const int d = manhattan(me, env.position(state, id));
    if (best < 0 || d < best_dist) {
      best = id;
      best_dist = d;
    }
  }
  if (best < 0) throw ContractViolation("select_opponent: no living opponent");
  return best;
}

struct SearchResult {
  std::array<float, kNumActions> pi{};
  double root_value = 0.0;
  Action chosen_action = Action::Idle;
  std::size_t node_count = 0;
  int depth_max = 0;
  double depth_mean = 0.0;
  double elapsed_ms = 0.0;
  double env_ms = 0.0;         // environment steps and opponent models
  double inference_ms = 0.0;   // evaluator calls
  std::vector<Action> principal_variation;
};

template <SimulationEnvironment Env>
class Search {
 public:
  using State = typename Env::State;
  using Evaluator = std::function<Evaluation(const State&, AgentId)>;
  /// Action of a non-searched agent; must be a deterministic function of
  /// (state, agent).
  using OpponentPolicy = std::function<Action(const State&, AgentId)>;

  Search(Env env, Evaluator evaluator, OpponentPolicy opponents, SearchConfig config, AgentId player)
      : env_(std::move(env)),
        evaluate_(std::move(evaluator)),
        opponent_action_(std::move(opponents)),
        config_(config),
        player_(player) {
    validate(config_);
  }

  /// Full search from `root`: fresh tree (or the matching subtree of the
  /// previous one when reuse is enabled), then config.simulations simulations.
  SearchResult run(const State& root) {
    const auto t0 = Clock::now();
    env_ns_ = 0;
    eval_ns_ = 0;
    if (!(config_.reuse_tree && reroot(root))) reset(root);
    depth_sum_ = 0;
    depth_max_ = 0;
    for (int i = 0; i < config_.simulations; ++i) simulate();

    SearchResult r;
    const Node<State>& rn = tree_[0];
    const double total = rn.edges.total_visits();
    double value_sum = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
      r.pi[a] = total > 0 ? static_cast<float>(rn.edges.visits[a] / total) : 0.0f;
      value_sum += rn.edges.value_sum[a];
    }
    r.root_value = total > 0 ? value_sum / total : rn.own_value;
    r.chosen_action = action_from_index(
        config_.temperature <= 0.0
            ? argmax_visits(rn.edges.visits)
            : sample_visits(rn.edges.visits, config_.temperature, mix_combine(config_.seed, env_.hash(root) ^ 0x7e11ULL)));
    r.node_count = tree_.size();
    r.depth_max = depth_max_;
    r.depth_mean = config_.simulations > 0 ? static_cast<double>(depth_sum_) / config_.simulations : 0.0;
    r.principal_variation = principal_variation(static_cast<std::size_t>(config_.max_depth));
    r.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    r.env_ms = env_ns_ * 1e-6;
    r.inference_ms = eval_ns_ * 1e-6;
    return r;
  }

  /// Discards the tree and expands a new root with model priors.
  void reset(const State& root) {
    if (env_.is_terminal(root) || !env_.is_alive(root, player_)) {
      throw ContractViolation("search: root state is terminal for the searching agent");
    }
    tree_.clear();
    tree_.reserve(static_cast<std::size_t>(config_.simulations) + 1);
    log_.clear();
    Node<State> n;
    n.state = root;
    n.kind = NodeKind::PlayerDecision;
    n.active_agent = player_;
    tree_.push_back(std::move(n));
    ensure_evaluated(0);
    apply_root_noise();
  }

  /// One simulation of the configured mode.
  void simulate() {
    if (tree_.empty()) throw ContractViolation("search: simulate before reset");
    if (config_.mode == Mode::SinglePlayer) {
      simulate_single_player();
    } else {
      simulate_two_player();
    }
  }

  /// Select a leaf; pick the player's action; fill every opponent from its
  /// model; step; evaluate the new state for the player; expand; back up
  /// without negation.
  void simulate_single_player() {
    path_.clear();
    auto [leaf, action, child] = descend();
    if (child >= 0) {  // terminal or depth-capped revisit
      finish(tree_[child].entry_value, false);
      return;
    }
    const State& s = tree_[leaf].state;
    JointAction joint = model_actions(s, player_, -1);
    joint[player_] = action;
    State next = timed_step(s, joint);

    Node<State> n;
    n.kind = NodeKind::PlayerDecision;
    n.active_agent = player_;
    n.terminal = search_terminal(next);
    double value;
    if (n.terminal) {
      value = env_.terminal_value(next, player_);
      n.evaluated = true;
      n.own_value = static_cast<float>(value);
    } else {
      const Evaluation e = timed_eval(next, player_);
      n.evaluated = true;
      n.edges.prior = e.priors;
      n.own_value = e.value;
      value = e.value;
    }
    n.state = std::move(next);
    append_child(leaf, action, std::move(n), value);
    finish(value, false);
  }

  /// Player node: choose the player's action, value the current state for
  /// the player and append an opponent node that remembers the action.
  /// Opponent node: choose the selected opponent's action, combine it with
  /// the remembered player action and the other agents' model actions, step,
  /// value the new state for the opponent and append a player node. Back up
  /// with negation.
  void simulate_two_player() {
    path_.clear();
    auto [leaf, action, child] = descend();
    if (child >= 0) {
      finish(tree_[child].entry_value, true);
      return;
    }
    const Node<State>& node = tree_[leaf];
    Node<State> n;
    double value;
    if (node.kind == NodeKind::PlayerDecision) {
      value = config_.eval_player_node_post_step ? post_step_player_value(node.state) : node.own_value;
      n.state = node.state;
      n.kind = NodeKind::OpponentDecision;
      n.active_agent = select_opponent(env_, node.state, player_);
      n.pending_player_action = action;
    } else {
      const AgentId opponent = node.active_agent;
      JointAction joint = model_actions(node.state, player_, opponent);
      joint[opponent] = action;
      joint[player_] = node.pending_player_action;
      State next = timed_step(node.state, joint);
      n.kind = NodeKind::PlayerDecision;
      n.active_agent = player_;
      n.terminal = search_terminal(next);
      if (n.terminal) {
        const double v = env_.terminal_value(next, player_);
        value = -v;
        n.evaluated = true;
        n.own_value = static_cast<float>(v);
      } else if (!env_.is_alive(next, opponent)) {
        // the opponent is gone: fall back to the player's own evaluation
        const Evaluation e = timed_eval(next, player_);
        value = -e.value;
        n.evaluated = true;
        n.edges.prior = e.priors;
        n.own_value = e.value;
      } else {
        value = timed_eval(next, opponent).value;
      }
      n.state = std::move(next);
    }
    append_child(leaf, action, std::move(n), value);
    finish(value, true);
  }

  /// Greedy max-visit descent from the root.
  std::vector<Action> principal_variation(std::size_t max_len) const {
    std::vector<Action> pv;
    std::int32_t idx = tree_.empty() ? -1 : 0;
    while (idx >= 0 && pv.size() < max_len) {
      const Node<State>& n = tree_[idx];
      if (n.edges.total_visits() == 0) break;
      const int a = argmax_visits(n.edges.visits);
      pv.push_back(action_from_index(a));
      idx = n.children[a];
      if (idx >= 0 && tree_[idx].terminal) break;
    }
    return pv;
  }

  AgentId get_active_agent(std::int32_t node) const { return tree_.at(node).active_agent; }

  const Tree<State>& tree() const noexcept { return tree_; }
  const std::vector<SimulationRecord>& log() const noexcept { return log_; }
  const SearchConfig& config() const noexcept { return config_; }
  AgentId player() const noexcept { return player_; }
  const Env& env() const noexcept { return env_; }

 private:
  using Clock = std::chrono::steady_clock;

  struct Descent {
    std::int32_t leaf;
    Action action;
    std::int32_t child;  // >= 0 when the selected edge leads to a node that is not expanded further
  };

  Descent descend() {
    std::int32_t idx = 0;
    for (;;) {
      ensure_evaluated(idx);
      const Node<State>& n = tree_[idx];
      const Action a = puct_select(n.edges, config_.c_puct, config_.q_init);
      path_.push_back({idx, a});
      const std::int32_t c = n.children[to_index(a)];
      if (c < 0) return {idx, a, -1};
      if (tree_[c].terminal || tree_[c].depth >= config_.max_depth) return {idx, a, c};
      idx = c;
    }
  }

  void finish(double leaf_value, bool negamax) {
    if (negamax) {
      backprop_negamax(tree_, std::span<const PathEdge>(path_), leaf_value);
    } else {
      backprop_sp(tree_, std::span<const PathEdge>(path_), leaf_value);
    }
    const int depth = static_cast<int>(path_.size());
    depth_sum_ += depth;
    depth_max_ = std::max(depth_max_, depth);
    if (config_.record_log) log_.push_back({path_, leaf_value});
  }

  void append_child(std::int32_t parent, Action a, Node<State> n, double value) {
    n.parent = parent;
    n.parent_action = a;
    n.depth = tree_[parent].depth + 1;
    n.entry_value = value;
    const auto idx = static_cast<std::int32_t>(tree_.size());
    tree_.push_back(std::move(n));
    tree_[parent].children[to_index(a)] = idx;
  }

  void ensure_evaluated(std::int32_t idx) {
    Node<State>& n = tree_[idx];
    if (n.evaluated) return;
    const Evaluation e = timed_eval(n.state, n.active_agent);
    Node<State>& m = tree_[idx];
    m.edges.prior = e.priors;
    m.own_value = e.value;
    m.evaluated = true;
  }

  void apply_root_noise() {
    if (!config_.root_noise) return;
    Node<State>& root = tree_[0];
    root.edges.prior = mix_root_noise(root.edges.prior, *config_.root_noise,
                                      mix_combine(config_.seed, env_.hash(root.state)));
  }

  bool search_terminal(const State& s) const { return env_.is_terminal(s) || !env_.is_alive(s, player_); }

  // Model actions for every living agent except `player` and `skip`.
  JointAction model_actions(const State& s, AgentId player, AgentId skip) {
    JointAction joint{};
    joint.fill(Action::Idle);
    const auto t0 = Clock::now();
    for (AgentId id = 0; id < env_.num_agents(); ++id) {
      if (id == player || id == skip || !env_.is_alive(s, id)) continue;
      joint[id] = opponent_action_(s, id);
    }
    env_ns_ += std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
    return joint;
  }

  State timed_step(const State& s, const JointAction& joint) {
    const auto t0 = Clock::now();
    State next = env_.step(s, joint);
    env_ns_ += std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
    return next;
  }

  Evaluation timed_eval(const State& s, AgentId id) {
    const auto t0 = Clock::now();
    Evaluation e = evaluate_(s, id);
    eval_ns_ += std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
    return e;
  }

  double post_step_player_value(const State& s) {
    const AgentId opponent = select_opponent(env_, s, player_);
    JointAction joint = model_actions(s, player_, -1);
    joint[opponent] = opponent_action_(s, opponent);
    joint[player_] = Action::Idle;
    const State next = timed_step(s, joint);
    if (search_terminal(next)) return env_.terminal_value(next, player_);
    return timed_eval(next, player_).value;
  }

  // Keeps the subtree whose player node holds exactly `root`.
  bool reroot(const State& root) {
    if (tree_.empty()) return false;
    const std::uint64_t h = env_.hash(root);
    const int target_depth = config_.mode == Mode::SinglePlayer ? 1 : 2;
    std::int32_t found = -1;
    for (std::size_t i = 1; i < tree_.size() && found < 0; ++i) {
      const Node<State>& n = tree_[i];
      if (n.depth == target_depth && n.kind == NodeKind::PlayerDecision && !n.terminal && env_.hash(n.state) == h) {
        found = static_cast<std::int32_t>(i);
      }
    }
    if (found < 0) return false;

    Tree<State> kept;
    kept.reserve(tree_.size() + static_cast<std::size_t>(config_.simulations));
    std::vector<std::pair<std::int32_t, std::int32_t>> queue{{found, -1}};  // (old index, new parent)
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      const auto [old_idx, new_parent] = queue[qi];
      Node<State> n = tree_[old_idx];
      n.parent = new_parent;
      n.depth -= target_depth;
      const auto new_idx = static_cast<std::int32_t>(kept.size());
      if (new_parent >= 0) kept[new_parent].children[to_index(n.parent_action)] = new_idx;
      for (std::int32_t c : tree_[old_idx].children) {
        if (c >= 0) queue.push_back({c, new_idx});
      }
      n.children.fill(-1);
      kept.push_back(std::move(n));
    }
    tree_ = std::move(kept);
    log_.clear();
    ensure_evaluated(0);
    apply_root_noise();
    return true;
  }

  Env env_;
  Evaluator evaluate_;
  OpponentPolicy opponent_action_;
  SearchConfig config_;
  AgentId player_;
  Tree<State> tree_;
  std::vector<PathEdge> path_;
  std::vector<SimulationRecord> log_;
  long long depth_sum_ = 0;
  int depth_max_ = 0;
  double env_ns_ = 0;
  double eval_ns_ = 0;
};

}  // namespace pommer::search
