#include <fstream>

#include "pommer/binary_io.hpp"
#include "pommer/match.hpp"

namespace pommer::match {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

search::Mode parse_mode(const std::string& s) {
  if (s == "sp" || s == "single" || s == "sp-mcts") return search::Mode::SinglePlayer;
  if (s == "tp" || s == "two" || s == "tp-mcts") return search::Mode::TwoPlayer;
  throw ConfigError("unknown search mode '" + s + "'");
}

}  // namespace

const char* to_string(AgentKind k) noexcept {
  switch (k) {
    case AgentKind::Simple: return "simple";
    case AgentKind::RawNet: return "rawnet";
    case AgentKind::Fixed: return "fixed";
    case AgentKind::SpMcts: return "sp-mcts";
    case AgentKind::TpMcts: return "tp-mcts";
  }
  return "unknown";
}

std::string SeatSpec::label() const {
  if (kind == AgentKind::Fixed) return std::string("fixed:") + to_string(fixed_action);
  return to_string(kind);
}

search::SearchConfig parse_search_config(const json& j, search::SearchConfig c) {
  if (!j.is_object()) throw ConfigError("'search' must be an object");
  reject_unknown(j,
                 {"mode", "simulations", "c_puct", "q_init", "temperature", "noise_eps", "noise_conc", "seed",
                  "max_depth", "reuse_tree", "eval_player_node_post_step", "opponent_model"},
                 "search");
  if (j.contains("mode")) c.mode = parse_mode(get_or<std::string>(j, "mode", ""));
  c.simulations = get_or(j, "simulations", c.simulations);
  c.c_puct = get_or(j, "c_puct", c.c_puct);
  c.q_init = get_or(j, "q_init", c.q_init);
  c.temperature = get_or(j, "temperature", c.temperature);
  c.seed = get_or(j, "seed", c.seed);
  c.max_depth = get_or(j, "max_depth", c.max_depth);
  c.reuse_tree = get_or(j, "reuse_tree", c.reuse_tree);
  c.eval_player_node_post_step = get_or(j, "eval_player_node_post_step", c.eval_player_node_post_step);
  const double eps = get_or(j, "noise_eps", c.root_noise ? c.root_noise->epsilon : 0.0);
  const double conc = get_or(j, "noise_conc", c.root_noise ? c.root_noise->concentration : 0.2);
  if (eps > 0.0) {
    c.root_noise = search::RootNoise{eps, conc};
  } else {
    c.root_noise.reset();
  }
  try {
    search::validate(c);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

json to_json(const search::SearchConfig& c) {
  return json{{"mode", search::to_string(c.mode)},
              {"simulations", c.simulations},
              {"c_puct", c.c_puct},
              {"q_init", c.q_init},
              {"temperature", c.temperature},
              {"noise_eps", c.root_noise ? c.root_noise->epsilon : 0.0},
              {"noise_conc", c.root_noise ? c.root_noise->concentration : 0.2},
              {"seed", c.seed},
              {"max_depth", c.max_depth},
              {"reuse_tree", c.reuse_tree},
              {"eval_player_node_post_step", c.eval_player_node_post_step}};
}

SeatSpec parse_seat(const json& j) {
  SeatSpec s;
  std::string agent;
  if (j.is_string()) {
    agent = j.get<std::string>();
  } else if (j.is_object()) {
    reject_unknown(j, {"agent", "weights", "search", "filter_priors", "search_true_state"}, "seat");
    if (!j.contains("agent")) throw ConfigError("seat object needs an 'agent' key");
    agent = get_or<std::string>(j, "agent", "");
    s.weights = get_or(j, "weights", s.weights);
    s.filter_priors = get_or(j, "filter_priors", s.filter_priors);
    s.search_true_state = get_or(j, "search_true_state", s.search_true_state);
  } else {
    throw ConfigError("seat must be a string or an object");
  }

  if (agent == "simple") {
    s.kind = AgentKind::Simple;
  } else if (agent == "rawnet" || agent.rfind("rawnet:", 0) == 0) {
    s.kind = AgentKind::RawNet;
    if (agent.size() > 7) s.weights = agent.substr(7);
  } else if (agent.rfind("fixed:", 0) == 0) {
    s.kind = AgentKind::Fixed;
    const auto a = parse_action(agent.substr(6));
    if (!a) throw ConfigError("unknown action in seat '" + agent + "'");
    s.fixed_action = *a;
  } else if (agent == "sp-mcts") {
    s.kind = AgentKind::SpMcts;
  } else if (agent == "tp-mcts") {
    s.kind = AgentKind::TpMcts;
  } else {
    throw ConfigError("unknown agent '" + agent + "'");
  }

  if (s.is_search()) {
    s.search.mode = s.kind == AgentKind::SpMcts ? search::Mode::SinglePlayer : search::Mode::TwoPlayer;
    if (j.is_object() && j.contains("search")) {
      const json& sj = j.at("search");
      s.search = parse_search_config(sj, s.search);
      const search::Mode declared = s.kind == AgentKind::SpMcts ? search::Mode::SinglePlayer : search::Mode::TwoPlayer;
      if (s.search.mode != declared) throw ConfigError("search.mode contradicts agent '" + agent + "'");
      if (sj.contains("opponent_model")) {
        const json& om = sj.at("opponent_model");
        if (om.is_string()) {
          s.opponent_models.fill(om.get<std::string>());
        } else if (om.is_array() && om.size() == kNumAgents) {
          for (int i = 0; i < kNumAgents; ++i) s.opponent_models[i] = om[i].get<std::string>();
        } else {
          throw ConfigError("search.opponent_model must be a string or a list of 4 strings");
        }
      }
    }
    for (const std::string& m : s.opponent_models) {
      if (m != "simple" && m.rfind("rawnet:", 0) != 0 && m.rfind("fixed:", 0) != 0) {
        throw ConfigError("unknown opponent model '" + m + "'");
      }
    }
  } else if (j.is_object() && j.contains("search")) {
    throw ConfigError("'search' block given for non-search agent '" + agent + "'");
  }
  return s;
}

json to_json(const SeatSpec& s) {
  json j{{"agent", s.label()}};
  if (s.kind == AgentKind::RawNet || s.is_search()) j["weights"] = s.weights;
  if (s.is_search()) {
    json sj = to_json(s.search);
    sj["opponent_model"] = s.opponent_models;
    j["search"] = sj;
    j["filter_priors"] = s.filter_priors;
    j["search_true_state"] = s.search_true_state;
  }
  return j;
}

MatchConfig parse_match_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"seats", "games", "seed", "randomize_seats", "step_limit", "threads", "replays"}, "config");
  MatchConfig c;
  if (!j.contains("seats")) throw ConfigError("config needs 'seats'");
  const json& seats = j.at("seats");
  if (!seats.is_array() || seats.size() != kNumAgents) throw ConfigError("'seats' must list exactly 4 seats");
  for (int i = 0; i < kNumAgents; ++i) c.seats[i] = parse_seat(seats[i]);
  c.games = get_or(j, "games", c.games);
  c.seed = get_or(j, "seed", c.seed);
  c.randomize_seats = get_or(j, "randomize_seats", c.randomize_seats);
  c.step_limit = get_or(j, "step_limit", c.step_limit);
  c.threads = get_or(j, "threads", c.threads);
  c.write_replays = get_or(j, "replays", c.write_replays);
  if (c.games < 1) throw ConfigError("'games' must be >= 1");
  if (c.step_limit < 1 || c.step_limit > kMaxSteps) throw ConfigError("'step_limit' must be in [1, 800]");
  if (c.threads < 0) throw ConfigError("'threads' must be >= 0");
  return c;
}

json to_json(const MatchConfig& c) {
  json seats = json::array();
  for (const SeatSpec& s : c.seats) seats.push_back(to_json(s));
  return json{{"seats", seats},           {"games", c.games},     {"seed", c.seed},
              {"randomize_seats", c.randomize_seats}, {"step_limit", c.step_limit}, {"threads", c.threads},
              {"replays", c.write_replays}};
}

RlDatagenConfig parse_rl_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"weights", "search", "steps", "seed", "threads", "filter_priors", "record_raw_pi"}, "config");
  RlDatagenConfig c;
  // exploration noise is on by default when generating training data
  c.search.root_noise = search::RootNoise{};
  c.search.simulations = 250;
  c.weights = get_or(j, "weights", c.weights);
  if (j.contains("search")) {
    if (j.at("search").contains("opponent_model")) {
      const json& om = j.at("search").at("opponent_model");
      if (!(om.is_string() && om.get<std::string>() == "simple")) {
        throw ConfigError("rl-datagen supports only the 'simple' opponent model");
      }
      json copy = j.at("search");
      copy.erase("opponent_model");
      c.search = parse_search_config(copy, c.search);
    } else {
      c.search = parse_search_config(j.at("search"), c.search);
    }
  }
  c.steps = get_or(j, "steps", c.steps);
  c.seed = get_or(j, "seed", c.seed);
  c.threads = get_or(j, "threads", c.threads);
  c.filter_priors = get_or(j, "filter_priors", c.filter_priors);
  c.record_raw_pi = get_or(j, "record_raw_pi", c.record_raw_pi);
  if (c.steps < 1) throw ConfigError("'steps' must be >= 1");
  if (c.threads < 0) throw ConfigError("'threads' must be >= 0");
  return c;
}

json to_json(const RlDatagenConfig& c) {
  json sj = to_json(c.search);
  sj["opponent_model"] = "simple";
  return json{{"weights", c.weights},       {"search", sj},
              {"steps", c.steps},           {"seed", c.seed},
              {"threads", c.threads},       {"filter_priors", c.filter_priors},
              {"record_raw_pi", c.record_raw_pi}};
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  out << j.dump(2) << '\n';
  if (!out) throw FormatError(FormatErrorKind::Io, "write failed: " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(FormatErrorKind::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
}

}  // namespace pommer::match
