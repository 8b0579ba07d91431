#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "pommer/binary_io.hpp"
#include "pommer/dataset.hpp"
#include "pommer/model.hpp"
#include "test_states.hpp"

using namespace pommer;
using namespace pommer::testing;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("pommer_model_" + name)).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream(path, std::ios::binary) << bytes;
}

FormatErrorKind read_error(const std::string& path) {
  try {
    read_weights(path);
  } catch (const FormatError& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return FormatErrorKind::Io;
}

ObservationPlanes random_obs(std::uint64_t seed) {
  SplitMix64 rng(seed);
  ObservationPlanes o;
  for (float& v : o.data) v = static_cast<float>(rng.uniform());
  return o;
}

std::vector<ObservationPlanes> game_observations(int count) {
  std::vector<ObservationPlanes> out;
  play_simple(3, 400, [&](const GameState& prev, const GameState&) {
    if (static_cast<int>(out.size()) < count && prev.step_count % 7 == 0) {
      for (AgentId id = 0; id < kNumAgents; ++id) {
        if (prev.agents[id].alive) out.push_back(encode_observation(prev, id));
      }
    }
  });
  out.resize(std::min<std::size_t>(out.size(), count));
  return out;
}

// loss(softmax(logits), tanh(v_pre)) in double precision
double composite_loss(const std::array<double, kNumActions>& logits, double v_pre, const std::array<float, kNumActions>& pi,
                      double z, double alpha) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - m);
  double policy = 0.0;
  for (int a = 0; a < kNumActions; ++a) {
    const double p = std::max(std::exp(logits[a] - m) / sum, kProbabilityFloor);
    policy -= pi[a] * std::log(p);
  }
  const double v = std::tanh(v_pre);
  return alpha * (z - v) * (z - v) + (1.0 - alpha) * policy;
}

}  // namespace

TEST_CASE("forward: zero weights give a uniform policy and zero value") {
  const ModelWeights w = zero_weights();
  for (const auto& obs : game_observations(10)) {
    const ModelOutput out = forward(w, obs);
    for (float p : out.policy) CHECK(p == doctest::Approx(1.0 / 6).epsilon(1e-7));
    CHECK(out.value == 0.0f);
  }
}

TEST_CASE("forward: output contract on random weights and inputs") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ModelWeights w = init_random(seed);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const ModelOutput out = forward(w, random_obs(seed * 100 + k));
      double sum = 0.0;
      for (float p : out.policy) {
        CHECK(p >= 0.0f);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(std::abs(out.value) <= 1.0f);
      CHECK(std::tanh(out.value_preactivation) == doctest::Approx(out.value).epsilon(1e-5));
    }
  }
}

TEST_CASE("forward: fast kernels match the reference") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const ModelWeights w = init_random(seed + 10);
    auto obs = game_observations(8);
    obs.push_back(random_obs(seed));
    for (const auto& o : obs) {
      const ModelOutput fast = forward(w, o);
      const ModelOutput ref = reference::forward(w, o);
      for (int a = 0; a < kNumActions; ++a) {
        CHECK(fast.logits[a] == doctest::Approx(ref.logits[a]).epsilon(1e-4).scale(1.0));
        CHECK(fast.policy[a] == doctest::Approx(ref.policy[a]).epsilon(1e-5).scale(1.0));
      }
      CHECK(fast.value == doctest::Approx(ref.value).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("forward: no built-in equivariance") {
  const ModelWeights w = init_random(4);
  const GameState s = generate_board(6);
  const ObservationPlanes o = encode_observation(s, 0);
  const ModelOutput base = forward(w, o);
  int differing = 0;
  for (const auto g : dataset::Symmetry::all()) {
    if (g == dataset::Symmetry::identity()) continue;
    const ModelOutput t = forward(w, dataset::transform(o, g));
    bool same = std::abs(t.value - base.value) < 1e-6f;
    for (int a = 0; a < kNumActions; ++a) {
      same = same && std::abs(t.policy[to_index(g.apply(action_from_index(a)))] - base.policy[a]) < 1e-6f;
    }
    differing += !same;
  }
  CHECK(differing == 7);
}

TEST_CASE("forward_batch") {
  const ModelWeights w = init_random(1);
  const auto obs = game_observations(17);
  REQUIRE(obs.size() == 17);
  const auto one = forward_batch(w, std::span(obs.data(), 1));
  REQUIRE(one.size() == 1);
  const ModelOutput single = forward(w, obs[0]);
  for (int a = 0; a < kNumActions; ++a) CHECK(one[0].policy[a] == doctest::Approx(single.policy[a]).epsilon(1e-5));
  const auto all = forward_batch(w, obs);
  REQUIRE(all.size() == obs.size());
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const ModelOutput f = forward(w, obs[i]);
    for (int a = 0; a < kNumActions; ++a) CHECK(std::abs(all[i].policy[a] - f.policy[a]) <= 1e-5f);
    CHECK(std::abs(all[i].value - f.value) <= 1e-5f);
  }
  CHECK_THROWS_AS(forward_batch(w, std::span<const ObservationPlanes>()), std::invalid_argument);
}

TEST_CASE("loss examples") {
  const std::array<float, kNumActions> uniform{1 / 6.f, 1 / 6.f, 1 / 6.f, 1 / 6.f, 1 / 6.f, 1 / 6.f};
  const std::array<float, kNumActions> one_hot{0, 1, 0, 0, 0, 0};
  CHECK(loss(uniform, 0.3, one_hot, 0.3, 1.0) == doctest::Approx(0.0));
  CHECK(loss(uniform, 0.0, one_hot, 1.0, 0.1) == doctest::Approx(0.1 + 0.9 * std::log(6.0)).epsilon(1e-6));
  CHECK(loss(uniform, 0.0, one_hot, 1.0, 0.1) == doctest::Approx(1.712583).epsilon(1e-6));
  CHECK(kDefaultValueWeight == 0.1);
  // a zero probability on the target is clamped, not infinite
  const std::array<float, kNumActions> zero_on_target{0.5f, 0.0f, 0.5f, 0, 0, 0};
  const double l = loss(zero_on_target, 0.0, one_hot, 0.0, 0.0);
  CHECK(std::isfinite(l));
  CHECK(l == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS_AS(loss(std::span<const float>(uniform.data(), 5), 0, one_hot, 0, 0.1), std::invalid_argument);
}

TEST_CASE("loss is non-negative on the simplex") {
  SplitMix64 rng(8);
  for (int i = 0; i < 1000; ++i) {
    std::array<float, kNumActions> p{}, pi{};
    float sp = 0, spi = 0;
    for (int a = 0; a < kNumActions; ++a) {
      p[a] = static_cast<float>(rng.uniform()) + 1e-3f;
      pi[a] = static_cast<float>(rng.uniform());
      sp += p[a];
      spi += pi[a];
    }
    for (int a = 0; a < kNumActions; ++a) {
      p[a] /= sp;
      pi[a] /= spi;
    }
    const double v = rng.uniform() * 2 - 1;
    const double z = static_cast<double>(rng.below(3)) - 1.0;
    CHECK(loss(p, v, pi, z, rng.uniform()) >= 0.0);
  }
}

TEST_CASE("loss gradient matches central finite differences") {
  SplitMix64 rng(21);
  double worst = 0.0;
  for (int probe = 0; probe < 10; ++probe) {
    std::array<float, kNumActions> logits_f{};
    std::array<double, kNumActions> logits{};
    std::array<float, kNumActions> pi{};
    float total = 0;
    for (int a = 0; a < kNumActions; ++a) {
      logits_f[a] = static_cast<float>(rng.uniform() * 4 - 2);
      logits[a] = logits_f[a];
      pi[a] = static_cast<float>(rng.uniform());
      total += pi[a];
    }
    for (float& x : pi) x /= total;
    const double v_pre = rng.uniform() * 2 - 1;
    const double z = static_cast<double>(rng.below(3)) - 1.0;
    const double alpha = 0.1 + 0.8 * rng.uniform();
    const LossGradient g = loss_gradient(logits_f, v_pre, pi, z, alpha);

    const double h = 1e-5;
    for (int a = 0; a < kNumActions; ++a) {
      auto up = logits, down = logits;
      up[a] += h;
      down[a] -= h;
      const double fd = (composite_loss(up, v_pre, pi, z, alpha) - composite_loss(down, v_pre, pi, z, alpha)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g.logits[a]) / std::max(1e-6, std::abs(fd) + std::abs(g.logits[a])));
    }
    const double fd_v = (composite_loss(logits, v_pre + h, pi, z, alpha) - composite_loss(logits, v_pre - h, pi, z, alpha)) / (2 * h);
    worst = std::max(worst, std::abs(fd_v - g.value_preactivation) /
                                std::max(1e-6, std::abs(fd_v) + std::abs(g.value_preactivation)));
  }
  CHECK(worst < 1e-4);

  const std::array<float, kNumActions> logits{0.1f, 0.2f, -0.3f, 0.4f, 0.0f, 1.0f};
  const std::array<float, kNumActions> pi{0, 0, 1, 0, 0, 0};
  CHECK(loss_gradient(logits, 0.3, pi, 1.0, 0.0).value_preactivation == 0.0);
  for (double d : loss_gradient(logits, 0.3, pi, 1.0, 1.0).logits) CHECK(d == 0.0);
}

TEST_CASE("init_random") {
  CHECK(init_random(5) == init_random(5));
  CHECK_FALSE(init_random(5) == init_random(6));
  const ModelWeights w = init_random(5);
  const auto& specs = tensor_specs();
  REQUIRE(w.tensors().size() == specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const Tensor& t = w.tensors()[i];
    CHECK(t.name == specs[i].name);
    CHECK(t.shape == specs[i].shape);
    // fan-in scaled bound
    const std::size_t fan_in = t.shape.size() == 1 ? 0 : t.element_count() / t.shape[0];
    if (fan_in > 0) {
      const float bound = 1.0f / std::sqrt(static_cast<float>(fan_in));
      for (float v : t.data) CHECK(std::abs(v) <= bound);
    }
  }
}

TEST_CASE("ModelWeights validation") {
  std::vector<Tensor> t = zero_weights().tensors();
  SUBCASE("missing tensor") {
    t.pop_back();
    CHECK_THROWS_AS(ModelWeights{t}, ShapeError);
  }
  SUBCASE("wrong shape") {
    t[0].shape[0] = 16;
    CHECK_THROWS_AS(ModelWeights{t}, ShapeError);
  }
  SUBCASE("wrong name") {
    t[3].name = "x";
    CHECK_THROWS_AS(ModelWeights{t}, ShapeError);
  }
  SUBCASE("non-finite") {
    t[2].data[0] = std::nanf("");
    CHECK_THROWS_AS(ModelWeights{t}, ShapeError);
  }
}

TEST_CASE("weight files") {
  const ModelWeights w = init_random(77);
  const std::string path = temp_path("w.pwnet");
  write_weights(w, path);
  const ModelWeights back = read_weights(path);
  CHECK(back == w);
  const auto obs = game_observations(3);
  for (const auto& o : obs) {
    const auto a = forward(w, o);
    const auto b = forward(back, o);
    CHECK(a.policy == b.policy);
    CHECK(a.value == b.value);
  }
  const std::string bytes = read_file(path);
  CHECK(bytes.substr(0, 5) == "PWNET");
  CHECK(load_weights_spec(path) == w);
  CHECK(load_weights_spec("zero") == zero_weights());
  CHECK(load_weights_spec("random:77") == w);

  std::string bad = bytes;
  bad[0] = 'Q';
  write_file(temp_path("magic.pwnet"), bad);
  CHECK(read_error(temp_path("magic.pwnet")) == FormatErrorKind::BadMagic);

  bad = bytes;
  bad[5] = 2;
  write_file(temp_path("version.pwnet"), bad);
  CHECK(read_error(temp_path("version.pwnet")) == FormatErrorKind::BadVersion);

  bad = bytes;
  bad[9] = static_cast<char>(bad[9] + 1);  // tensor count
  write_file(temp_path("count.pwnet"), bad);
  CHECK(read_error(temp_path("count.pwnet")) == FormatErrorKind::ShapeMismatch);

  // first tensor's first dimension: magic 5, version 4, count 4, name length 2 + name, rank 1
  const std::size_t name_len = static_cast<unsigned char>(bytes[13]);
  bad = bytes;
  bad[13 + 2 + name_len + 1] = 31;
  write_file(temp_path("shape.pwnet"), bad);
  CHECK(read_error(temp_path("shape.pwnet")) == FormatErrorKind::ShapeMismatch);

  write_file(temp_path("short.pwnet"), bytes.substr(0, bytes.size() - 10));
  CHECK(read_error(temp_path("short.pwnet")) == FormatErrorKind::Truncated);

  CHECK(read_error(temp_path("does_not_exist.pwnet")) == FormatErrorKind::Io);
}
