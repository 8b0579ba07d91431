#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "pommer/search.hpp"

namespace pommer::search {

const char* to_string(Mode m) noexcept { return m == Mode::SinglePlayer ? "sp" : "tp"; }

void validate(const SearchConfig& c) {
  if (c.simulations < 1) throw std::invalid_argument("search: simulations must be >= 1");
  if (!(c.c_puct > 0.0) || !std::isfinite(c.c_puct)) throw std::invalid_argument("search: c_puct must be > 0");
  if (!std::isfinite(c.q_init)) throw std::invalid_argument("search: q_init must be finite");
  if (!(c.temperature >= 0.0) || !std::isfinite(c.temperature)) {
    throw std::invalid_argument("search: temperature must be >= 0");
  }
  if (c.max_depth < 1) throw std::invalid_argument("search: max_depth must be >= 1");
  if (c.root_noise) {
    if (!(c.root_noise->epsilon >= 0.0 && c.root_noise->epsilon <= 1.0)) {
      throw std::invalid_argument("search: noise epsilon must be in [0, 1]");
    }
    if (!(c.root_noise->concentration > 0.0) || !std::isfinite(c.root_noise->concentration)) {
      throw std::invalid_argument("search: noise concentration must be > 0");
    }
  }
}

std::uint32_t EdgeStats::total_visits() const noexcept {
  return std::accumulate(visits.begin(), visits.end(), std::uint32_t{0});
}

double EdgeStats::q(int a, double q_init) const noexcept {
  return visits[a] == 0 ? q_init : value_sum[a] / visits[a];
}

Action puct_select(const EdgeStats& stats, double c_puct, double q_init) {
  const double sqrt_total = std::sqrt(static_cast<double>(stats.total_visits()));
  int best = 0;
  double best_score = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    const double u = c_puct * stats.prior[a] * sqrt_total / (1.0 + stats.visits[a]);
    const double score = stats.q(a, q_init) + u;
    if (a == 0 || score > best_score) {
      best = a;
      best_score = score;
    }
  }
  return action_from_index(best);
}

std::array<float, kNumActions> policy_target_sharpen(std::span<const float> pi) {
  if (pi.size() != kNumActions) throw std::invalid_argument("policy_target_sharpen: expected 6 entries");
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (pi[a] > pi[best]) best = a;
  }
  std::array<float, kNumActions> out{};
  for (int a = 0; a < kNumActions; ++a) out[a] = 0.5f * pi[a] + (a == best ? 0.5f : 0.0f);
  return out;
}

std::array<float, kNumActions> mix_root_noise(const std::array<float, kNumActions>& priors, const RootNoise& noise,
                                              std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> gamma(noise.concentration, 1.0);
  std::array<double, kNumActions> g{};
  double total = 0.0;
  for (double& x : g) {
    x = gamma(gen);
    total += x;
  }
  std::array<float, kNumActions> out{};
  for (int a = 0; a < kNumActions; ++a) {
    const double d = total > 0.0 ? g[a] / total : 1.0 / kNumActions;
    out[a] = static_cast<float>((1.0 - noise.epsilon) * priors[a] + noise.epsilon * d);
  }
  return out;
}

int argmax_visits(const std::array<std::uint32_t, kNumActions>& visits) noexcept {
  int best = 0;
  for (int a = 1; a < kNumActions; ++a) {
    if (visits[a] > visits[best]) best = a;
  }
  return best;
}

int sample_visits(const std::array<std::uint32_t, kNumActions>& visits, double temperature, std::uint64_t seed) {
  // normalize by the max count before the power so large exponents stay finite
  const double top = visits[argmax_visits(visits)];
  if (top == 0.0) return 0;
  std::array<double, kNumActions> w{};
  double total = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    w[a] = visits[a] == 0 ? 0.0 : std::pow(visits[a] / top, 1.0 / temperature);
    total += w[a];
  }
  SplitMix64 rng(seed);
  double r = rng.uniform() * total;
  for (int a = 0; a < kNumActions; ++a) {
    if (w[a] <= 0.0) continue;
    if (r < w[a]) return a;
    r -= w[a];
  }
  return argmax_visits(visits);
}

}  // namespace pommer::search
