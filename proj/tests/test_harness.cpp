#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "outbreak/harness.hpp"
#include "outbreak/percolation.hpp"

using namespace outbreak;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_config(const std::string& dir) {
  json j = json::parse(R"({
    "master_seed": 11,
    "gen": {"model": "k_regular", "d": 3, "n": 2000},
    "process": {"p": 0.7, "p_grid": [0.4, 0.6, 0.8]},
    "tasks": [
      {"type": "histogram", "trials": 100, "bands": [[0.41, 0.51]]},
      {"type": "estimate", "k": 10, "q": 200},
      {"type": "giant", "trials": 4},
      {"type": "survival", "trials": 10},
      {"type": "expansion", "eps": 0.25, "budget": 300},
      {"type": "bridges", "k": 3, "trials": 200, "p_grid": [0.7]}
    ]})");
  j["output_dir"] = dir;
  return j;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("outbreak_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config validation rejects bad tasks before running") {
  auto code_of = [](json j) {
    try {
      (void)ExperimentConfig::from_json(j);
    } catch (const ConfigError& e) {
      return e.code();
    } catch (const GeneratorError& e) {
      return e.code();
    }
    return std::string("none");
  };
  auto base = small_config("unused");
  CHECK(code_of(base) == "none");
  auto bad = base;
  bad["tasks"].push_back({{"type", "plot"}});
  CHECK(code_of(bad) == "unknown_task");
  bad = base;
  bad["tasks"][1]["k"] = 0;
  CHECK(code_of(bad) == "task_invalid");
  bad = base;
  bad["tasks"][4]["eps"] = 0.7;
  CHECK(code_of(bad) == "task_invalid");
  bad = base;
  bad.erase("gen");
  CHECK(code_of(bad) == "graph_source");
  bad = base;
  bad["gen"]["n"] = 7;  // 3-regular on 7 vertices
  CHECK(code_of(bad) == "parity");
  bad = base;
  bad["tasks"].push_back({{"type", "giant"}});
  CHECK(code_of(bad) == "duplicate_task");
}

TEST_CASE("config hash ignores output location and thread count") {
  auto a = small_config("x");
  auto b = small_config("y");
  b["threads"] = 8;
  CHECK(ExperimentConfig::from_json(a).hash() == ExperimentConfig::from_json(b).hash());
  b["master_seed"] = 12;
  CHECK(ExperimentConfig::from_json(a).hash() != ExperimentConfig::from_json(b).hash());
}

TEST_CASE("task seeds follow the documented derivation") {
  CHECK(task_seed(42, "histogram") == 0x26ec011ea0437ab6ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("experiment outputs are reproducible across runs and worker counts") {
  const auto d1 = temp_dir("a"), d2 = temp_dir("b");
  auto c1 = small_config(d1.string());
  auto c2 = small_config(d2.string());
  c1["threads"] = 1;
  c2["threads"] = 3;
  const auto m1 = run_experiment(ExperimentConfig::from_json(c1));
  const auto m2 = run_experiment(ExperimentConfig::from_json(c2));
  REQUIRE(m1.ok());
  REQUIRE(m2.ok());
  CHECK(m1.to_json().dump() == m2.to_json().dump());
  CHECK(slurp(d1 / "manifest.json") == slurp(d2 / "manifest.json"));

  std::size_t files = 0;
  for (const auto& task : m1.tasks) {
    for (const auto& a : task.artifacts) {
      ++files;
      const auto bytes = slurp(d1 / a.path);
      CHECK(hex64(content_hash(bytes)) == a.hash);
      CHECK(bytes.find(m1.config_hash) != std::string::npos);
    }
  }
  CHECK(files == 8);
  const auto survival_a = slurp(d1 / "survival_analytic.csv");
  const auto survival_e = slurp(d1 / "survival_empirical.csv");
  CHECK(std::count(survival_a.begin(), survival_a.end(), '\n') == std::count(survival_e.begin(), survival_e.end(), '\n'));
  CHECK(slurp(d1 / "histogram.csv").rfind("# config_hash=" + m1.config_hash, 0) == 0);
  const auto hist = json::parse(slurp(d1 / "histogram.json"));
  CHECK(hist.at("provenance").at("master_seed") == 11);
  CHECK(hist.at("bands").size() == 1);

  // Rerun into the same directory: identical manifest.
  const auto again = run_experiment(ExperimentConfig::from_json(c1));
  CHECK(again.to_json().dump() == m1.to_json().dump());
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("a failing task is recorded and the rest still run") {
  const auto dir = temp_dir("partial");
  json config = json::parse(R"({
    "master_seed": 3,
    "gen": {"model": "pa", "m": 2, "n": 500},
    "process": {"p": 0.5, "p_grid": [0.5]},
    "tasks": [
      {"type": "giant", "trials": 2},
      {"type": "survival", "trials": 2},
      {"type": "estimate", "k": 5, "q": 20}
    ]})");
  config["output_dir"] = dir.string();
  const auto manifest = run_experiment(ExperimentConfig::from_json(config));
  CHECK_FALSE(manifest.ok());
  REQUIRE(manifest.tasks.size() == 3);
  CHECK(manifest.tasks[0].status == "ok");
  CHECK(manifest.tasks[1].status == "failed");
  CHECK(manifest.tasks[1].error_code == "no_analytic_law");
  CHECK(manifest.tasks[2].status == "ok");
  CHECK(fs::exists(dir / "giant.csv"));
  CHECK(fs::exists(dir / "estimate.json"));
  const auto on_disk = json::parse(slurp(dir / "manifest.json"));
  CHECK(on_disk.at("tasks").at(1).at("status") == "failed");
  fs::remove_all(dir);
}

TEST_CASE("error codes and exit codes") {
  CHECK(error_code(GeneratorError("non_graphical", "x")) == "non_graphical");
  CHECK(exit_code_for(GeneratorError("non_graphical", "x")) == 1);
  CHECK(error_code(ConvergenceError("x", 0.5, 1e-3)) == "no_convergence");
  CHECK(exit_code_for(ConvergenceError("x", 0.5, 1e-3)) == 2);
  CHECK(exit_code_for(std::runtime_error("x")) == 2);
  CHECK(version_string().rfind("outbreak ", 0) == 0);
}
