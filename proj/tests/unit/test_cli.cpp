#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "pommer/dataset.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pommer_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Run run(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "pommer_cli_io";
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(POMMER_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

/// The last stderr line must be a single JSON error object.
json error_line(const Run& r) {
  std::istringstream lines(r.err);
  std::string line;
  std::string last;
  while (std::getline(lines, line)) {
    if (!line.empty()) last = line;
  }
  const json j = json::parse(last);
  CHECK(j.at("status") == "error");
  CHECK(j.at("kind").is_string());
  CHECK(j.at("message").is_string());
  return j;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("generate-demos writes a dataset and a status line") {
  const fs::path dir = scratch("demos");
  const Run r = run("generate-demos --out " + dir.string() + " --seed 3 --games 2 --threads 1 --quiet");
  REQUIRE(r.code == 0);
  const json status = json::parse(r.out);
  CHECK(status.at("status") == "ok");
  CHECK(status.at("command") == "generate-demos");
  const auto samples = pommer::dataset::read_dataset((dir / "demos.plrn").string());
  CHECK(samples.size() == status.at("samples").get<std::size_t>());
  CHECK(fs::exists(dir / "config.resolved.json"));

  const fs::path again = scratch("demos2");
  REQUIRE(run("generate-demos --out " + again.string() + " --seed 3 --games 2 --quiet").code == 0);
  CHECK(slurp(dir / "demos.plrn") == slurp(again / "demos.plrn"));

  const Run stats = run("stats --out " + dir.string() + " --dataset " + (dir / "demos.plrn").string());
  REQUIRE(stats.code == 0);
  CHECK(json::parse(stats.out).at("dataset").at("one_hot_share") == 1.0);
}

TEST_CASE("eval writes the report files and replays feed stats") {
  const fs::path dir = scratch("eval");
  write(dir / "match.json", R"({"seats": ["simple", "simple", "fixed:idle", "simple"], "games": 3, "seed": 1,
                               "step_limit": 120, "replays": true})");
  const Run r = run("eval --config " + (dir / "match.json").string() + " --out " + dir.string() + " --games 4 --quiet");
  REQUIRE(r.code == 0);
  const json status = json::parse(r.out);
  CHECK(status.at("games") == 4);
  CHECK(status.at("seats").size() == 4);
  for (const char* f : {"results.csv", "report.json", "config.resolved.json", "heatmap_seat0.csv"}) {
    CHECK(fs::exists(dir / f));
  }
  CHECK(json::parse(slurp(dir / "config.resolved.json")).at("games") == 4);

  const fs::path stats_dir = scratch("stats");
  const Run s = run("stats --out " + stats_dir.string() + " --replays " + (dir / "replays").string());
  REQUIRE(s.code == 0);
  CHECK(json::parse(s.out).at("replays").at("files") == 4);
  CHECK(fs::exists(stats_dir / "heatmap_all.csv"));
}

TEST_CASE("rl-datagen records the requested number of decisions") {
  const fs::path dir = scratch("rl");
  write(dir / "rl.json", R"({"search": {"simulations": 12}, "weights": "random:4"})");
  const Run r = run("rl-datagen --config " + (dir / "rl.json").string() + " --out " + dir.string() +
                    " --steps 25 --seed 2 --raw-pi --quiet");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("samples") == 25);
  CHECK(pommer::dataset::read_dataset((dir / "rl.plrn").string()).size() == 25);
  CHECK(fs::exists(dir / "rl.plrn.raw_pi.csv"));
}

TEST_CASE("failures exit nonzero with a machine-readable error line") {
  const fs::path dir = scratch("errors");

  SUBCASE("usage") {
    const Run none = run("");
    CHECK(none.code == 2);
    CHECK(error_line(none).at("kind") == "usage");
    const Run unknown = run("dance");
    CHECK(unknown.code == 2);
    const Run missing_config = run("eval --out " + dir.string());
    CHECK(missing_config.code == 2);
    CHECK(error_line(missing_config).at("kind") == "usage");
    const Run bad_number = run("generate-demos --games many");
    CHECK(bad_number.code == 2);
  }
  SUBCASE("config") {
    write(dir / "bad.json", R"({"seats": ["simple", "simple", "simple"]})");
    const Run r = run("eval --config " + (dir / "bad.json").string() + " --out " + dir.string());
    CHECK(r.code == 3);
    CHECK(error_line(r).at("kind") == "config");

    write(dir / "broken.json", "{not json");
    const Run p = run("eval --config " + (dir / "broken.json").string() + " --out " + dir.string());
    CHECK(p.code == 3);
    CHECK(error_line(p).at("kind") == "config");

    write(dir / "ok.json", R"({"seats": ["simple", "simple", "simple", "simple"]})");
    const Run g = run("eval --config " + (dir / "ok.json").string() + " --games 0 --out " + dir.string());
    CHECK(g.code == 3);
    const Run t = run("rl-datagen --out " + dir.string() + " --games 3");
    CHECK(t.code == 3);
    const Run s = run("stats --out " + dir.string());
    CHECK(s.code == 3);
  }
  SUBCASE("format") {
    const Run missing = run("eval --config " + (dir / "nope.json").string() + " --out " + dir.string());
    CHECK(missing.code == 4);
    CHECK(error_line(missing).at("kind") == "io");

    write(dir / "junk.plrn", "JUNKJUNKJUNKJUNKJUNKJUNKJUNKJUNK");
    const Run junk = run("stats --out " + dir.string() + " --dataset " + (dir / "junk.plrn").string());
    CHECK(junk.code == 4);
    CHECK(error_line(junk).at("kind") == "bad_magic");

    const Run weights = run("rl-datagen --out " + dir.string() + " --steps 2 --weights " + (dir / "none.pwnet").string());
    CHECK(weights.code == 4);
  }
}
