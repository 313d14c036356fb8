#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "outbreak/epidemic.hpp"
#include "outbreak/generators.hpp"
#include "outbreak/graph.hpp"
#include "outbreak/rng.hpp"

namespace outbreak {

std::string version_string();

// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);
std::uint64_t content_hash(std::string_view bytes);

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string code, const std::string& what)
      : std::invalid_argument(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Stable tag for any exception the library throws.
std::string error_code(const std::exception& e);
// 1 for input/validation failures, 2 for runtime failures.
int exit_code_for(const std::exception& e);

struct TaskConfig {
  std::string type;  // histogram | estimate | giant | survival | expansion | bridges
  std::string name;
  nlohmann::json params;
};

struct ExperimentConfig {
  std::optional<GenSpec> gen;
  std::optional<std::string> graph_file;  // edge list instead of a generator
  TransmissionParams process;
  std::vector<double> p_grid;
  std::vector<TaskConfig> tasks;
  Seed master_seed = 0;
  std::string output_dir = "out";
  unsigned threads = 0;  // 0: $OUTBREAK_LOCAL_THREADS, then 1

  static ExperimentConfig from_json(const nlohmann::json& j);
  // Canonical form; output_dir and threads are left out because they do not
  // affect any artifact's content.
  nlohmann::json to_json() const;
  std::uint64_t hash() const;
  // Checks every task before anything runs. Throws ConfigError.
  void validate() const;
};

// Seed handed to task `name`: derive_seed(master_seed, name, 0).
Seed task_seed(Seed master_seed, std::string_view name);

struct Artifact {
  std::string path;  // relative to the output directory
  std::string hash;  // hex64(content_hash(bytes))
  std::size_t bytes = 0;
};

struct TaskRecord {
  std::string name;
  std::string type;
  std::string status;  // ok | failed | skipped
  std::string error_code;
  std::string error;
  std::vector<Artifact> artifacts;
};

struct Manifest {
  std::string config_hash;
  Seed master_seed = 0;
  std::string version;
  nlohmann::json graph;
  std::vector<TaskRecord> tasks;

  bool ok() const;
  nlohmann::json to_json() const;
};

// Loads or generates the configured graph.
GeneratedGraph build_experiment_graph(const ExperimentConfig& config);

// Runs one task and returns its artifacts as (file name, bytes) pairs.
std::vector<std::pair<std::string, std::string>> run_task_artifacts(const ExperimentConfig& config,
                                                                    const TaskConfig& task,
                                                                    const GeneratedGraph& graph);

// Runs tasks in order, writing artifacts and manifest.json into
// config.output_dir. A failing task is recorded and the rest still run.
Manifest run_experiment(const ExperimentConfig& config);

}  // namespace outbreak
