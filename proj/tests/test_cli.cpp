#include <catch_amalgamated.hpp>

#include <sstream>

#include <json.hpp>

#include "featent/cli.hpp"
#include "test_support.hpp"

using namespace featent;
using featent::testing::read_file;
using featent::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string make_dataset(const TempDir& dir, std::string kind, std::string noise = "0") {
  const auto data = (dir.path() / "data").string();
  const auto r = run_cli({"synthetic", "--kind", kind, "--side", "6", "--samples", "20", "--channels", "3",
                          "--class-count", "2", "--noise", noise, "--seed", "3", "--layer-id", "conv", "--out", data});
  REQUIRE(r.code == 0);
  return data + "/manifest.json";
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("synthetic writes a loadable dataset", "[cli]") {
  TempDir dir("cli_synthetic");
  const auto manifest = make_dataset(dir, "planted_cycle");
  const auto m = load_manifest(manifest);
  CHECK(m.classes == std::vector<std::string>{"c0", "c1"});
  REQUIRE(m.layers.size() == 1);
  CHECK(m.layers[0].side == 6);
  CHECK(m.layers[0].channels == 3);
  CHECK(load_class_stack(m, "c1", "conv", 2).sample_count() == 20);
}

TEST_CASE("analyze reports planted units as fully selective", "[cli]") {
  TempDir dir("cli_analyze");
  const auto manifest = make_dataset(dir, "planted_cycle", "0.3");
  const auto out = (dir.path() / "out").string();
  const auto r = run_cli({"analyze", "--manifest", manifest, "--out", out});
  REQUIRE(r.code == 0);
  const auto lines = lines_of(read_file(dir.path() / "out" / "analyze_conv.csv"));
  REQUIRE(lines.size() == 2 + 6);
  CHECK(lines[0].rfind("# featent", 0) == 0);
  CHECK(lines[1] == "class,channel,feature_entropy,selective_rate,l1_norm,apoz,class_selectivity");
  for (std::size_t i = 2; i < lines.size(); ++i) CHECK(lines[i].find(",0,1,") != std::string::npos);
}

TEST_CASE("analyze filters classes and layers", "[cli]") {
  TempDir dir("cli_filter");
  const auto manifest = make_dataset(dir, "uniform_random");
  const auto out = (dir.path() / "out").string();
  REQUIRE(run_cli({"analyze", "--manifest", manifest, "--classes", "c1", "--out", out}).code == 0);
  const auto lines = lines_of(read_file(dir.path() / "out" / "analyze_conv.csv"));
  CHECK(lines.size() == 2 + 3);
  CHECK(run_cli({"analyze", "--manifest", manifest, "--classes", "c9", "--out", out}).code == 1);
  CHECK(run_cli({"analyze", "--manifest", manifest, "--layers", "fc", "--out", out}).code == 1);
}

TEST_CASE("analyze output does not depend on the job count", "[cli][determinism]") {
  TempDir dir("cli_jobs");
  const auto manifest = make_dataset(dir, "uniform_random");
  const auto a = (dir.path() / "a").string();
  const auto b = (dir.path() / "b").string();
  REQUIRE(run_cli({"analyze", "--manifest", manifest, "--jobs", "1", "--out", a}).code == 0);
  REQUIRE(run_cli({"analyze", "--manifest", manifest, "--jobs", "4", "--out", b}).code == 0);
  CHECK(read_file(dir.path() / "a" / "analyze_conv.csv") == read_file(dir.path() / "b" / "analyze_conv.csv"));
}

TEST_CASE("layer-summary, scatter, rank and ablation-plan", "[cli]") {
  TempDir dir("cli_misc");
  const auto manifest = make_dataset(dir, "uniform_random");
  const auto out = (dir.path() / "out").string();
  REQUIRE(run_cli({"layer-summary", "--manifest", manifest, "--out", out}).code == 0);
  REQUIRE(run_cli({"scatter", "--manifest", manifest, "--out", out}).code == 0);
  REQUIRE(run_cli({"rank", "--manifest", manifest, "--indicator", "l1_norm", "--direction", "descending", "--out", out})
              .code == 0);
  REQUIRE(run_cli({"ablation-plan", "--manifest", manifest, "--steps", "2", "--out", out}).code == 0);

  CHECK(lines_of(read_file(dir.path() / "out" / "layer-summary_conv.csv")).size() == 3);
  CHECK(lines_of(read_file(dir.path() / "out" / "scatter_conv.csv")).size() == 4);
  CHECK(lines_of(read_file(dir.path() / "out" / "rank_conv.csv")).size() == 5);

  const auto plan = nlohmann::json::parse(read_file(dir.path() / "out" / "ablation-plan_conv.json"));
  CHECK(plan["steps"].size() == 2);
  CHECK(plan["steps"][0].size() == 1);
  CHECK(plan["steps"][1][0] == plan["order"][0]);

  CHECK(run_cli({"rank", "--manifest", manifest, "--indicator", "nope", "--out", out}).code == 1);
  CHECK(run_cli({"ablation-plan", "--manifest", manifest, "--steps", "9", "--out", out}).code == 1);
}

TEST_CASE("prune-plan drops the ceiling share of channels", "[cli]") {
  TempDir dir("cli_prune");
  const auto manifest = make_dataset(dir, "uniform_random");
  const auto out = (dir.path() / "out").string();
  REQUIRE(run_cli({"prune-plan", "--manifest", manifest, "--ratio", "0.5", "--out", out}).code == 0);
  const auto doc = nlohmann::json::parse(read_file(dir.path() / "out" / "prune-plan_conv.json"));
  CHECK(doc["drop"].size() == 2);
  CHECK(doc["keep"].size() == 1);
  CHECK(doc["fused_score"].size() == 3);
  CHECK(run_cli({"prune-plan", "--manifest", manifest, "--ratio", "1.5", "--out", out}).code == 1);
}

TEST_CASE("sample-size writes per-channel and layer rows", "[cli]") {
  TempDir dir("cli_sample");
  const auto manifest = make_dataset(dir, "uniform_random");
  const auto out = (dir.path() / "out").string();
  REQUIRE(run_cli({"sample-size", "--manifest", manifest, "--sizes", "5,20", "--trials", "4", "--out", out}).code == 0);
  const auto lines = lines_of(read_file(dir.path() / "out" / "sample-size_conv.csv"));
  // 2 classes x (3 channels + layer mean) x 2 sizes.
  CHECK(lines.size() == 2 + 16);
  std::size_t full_rows = 0;
  for (const auto& l : lines) {
    if (l.find(",20,") != std::string::npos) {
      ++full_rows;
      CHECK(l.substr(l.size() - 2) == ",0");
    }
  }
  CHECK(full_rows == 8);
  CHECK(run_cli({"sample-size", "--manifest", manifest, "--sizes", "21", "--out", out}).code == 1);
}

TEST_CASE("rescale-check confirms invariance", "[cli]") {
  TempDir dir("cli_rescale");
  const auto manifest = make_dataset(dir, "uniform_random");
  const auto out = (dir.path() / "out").string();
  const auto r = run_cli({"rescale-check", "--manifest", manifest, "--factor", "0.5", "--out", out});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("6/6 units invariant") != std::string::npos);
  const auto lines = lines_of(read_file(dir.path() / "out" / "rescale-check_conv.csv"));
  REQUIRE(lines.size() == 8);
  for (std::size_t i = 2; i < lines.size(); ++i) CHECK(lines[i].find(",true,") != std::string::npos);
  CHECK(lines[2].find(",-50,") != std::string::npos);
  CHECK(run_cli({"rescale-check", "--manifest", manifest, "--factor", "-1", "--out", out}).code == 1);
}

TEST_CASE("oracle-check agrees with the brute-force oracle", "[cli]") {
  const auto r = run_cli({"oracle-check", "--instances", "200", "--seed", "4"});
  CHECK(r.code == 0);
  CHECK(r.out == "200/200 match\n");
}

TEST_CASE("exit codes", "[cli][errors]") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"frobnicate"}).code == 1);
  CHECK(run_cli({"analyze", "--manifest", "/nonexistent/manifest.json"}).code == 2);
  CHECK(run_cli({"analyze"}).code == 1);
  CHECK(run_cli({"oracle-check", "--p", "1.5"}).code == 1);
  CHECK(run_cli({"oracle-check", "--k", "3"}).code == 1);
  CHECK(run_cli({"oracle-check", "--log-base", "10"}).code == 1);
  CHECK(run_cli({"synthetic", "--kind", "gaussian", "--out", "/tmp/featent_never"}).code == 1);
  CHECK(run_cli({"--version"}).code == 0);
}
