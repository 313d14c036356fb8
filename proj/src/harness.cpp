#include "outbreak/harness.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "outbreak/expansion.hpp"
#include "outbreak/oracle.hpp"
#include "outbreak/parallel.hpp"
#include "outbreak/percolation.hpp"

#ifndef OUTBREAK_VERSION
#define OUTBREAK_VERSION "unknown"
#endif

namespace outbreak {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version_string() { return "outbreak " OUTBREAK_VERSION; }

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

std::uint64_t content_hash(std::string_view bytes) { return fnv1a64(bytes); }

std::string error_code(const std::exception& e) {
  if (auto* g = dynamic_cast<const GeneratorError*>(&e)) return g->code();
  if (auto* c = dynamic_cast<const ConfigError*>(&e)) return c->code();
  if (dynamic_cast<const ExpansionCapError*>(&e)) return "expansion_cap";
  if (dynamic_cast<const OracleCapError*>(&e)) return "oracle_cap";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "no_convergence";
  if (dynamic_cast<const GraphError*>(&e)) return "invalid_graph";
  if (dynamic_cast<const json::exception*>(&e)) return "config_json";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
  if (dynamic_cast<const std::ios_base::failure*>(&e)) return "io";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const std::out_of_range*>(&e)) return "out_of_range";
  return "runtime";
}

int exit_code_for(const std::exception& e) {
  const std::string code = error_code(e);
  return code == "no_convergence" || code == "io" || code == "runtime" ? 2 : 1;
}

Seed task_seed(Seed master_seed, std::string_view name) { return derive_seed(master_seed, name, 0); }

namespace {

const std::set<std::string> kTaskTypes{"histogram", "estimate", "giant", "survival", "expansion", "bridges"};

[[noreturn]] void reject(const std::string& task, const std::string& what) {
  throw ConfigError("task_invalid", "task '" + task + "': " + what);
}

std::vector<double> grid_for(const ExperimentConfig& config, const TaskConfig& task) {
  if (task.params.contains("p_grid")) return task.params.at("p_grid").get<std::vector<double>>();
  if (!config.p_grid.empty()) return config.p_grid;
  return {config.process.p};
}

void validate_task(const ExperimentConfig& config, const TaskConfig& task) {
  const json& t = task.params;
  auto positive = [&](const char* key, long fallback) {
    const long v = t.value(key, fallback);
    if (v < 1) reject(task.name, std::string(key) + " must be >= 1");
  };
  for (double p : grid_for(config, task)) {
    if (!(p >= 0.0 && p <= 1.0)) reject(task.name, "p values must lie in [0, 1]");
  }
  if (task.type == "histogram") {
    positive("trials", 2000);
    positive("bins", 100);
    const double delta = t.value("delta", 0.05);
    if (!(delta > 0.0 && delta < 0.5)) reject(task.name, "delta must lie in (0, 0.5)");
  } else if (task.type == "estimate") {
    if (t.contains("eps")) {
      const double eps = t.at("eps").get<double>();
      if (!(eps > 0.0 && eps < 1.0)) reject(task.name, "eps must lie in (0, 1)");
    } else {
      positive("k", 0);
      positive("q", 0);
    }
    const std::string seeding = t.value("seeding", "uniform");
    if (seeding != "uniform" && seeding != "degree_biased") reject(task.name, "seeding must be uniform or degree_biased");
    const std::string rule = t.value("rule", "include_seed");
    if (rule != "include_seed" && rule != "exclude_seed") reject(task.name, "rule must be include_seed or exclude_seed");
  } else if (task.type == "giant") {
    positive("trials", 10);
  } else if (task.type == "survival") {
    positive("trials", 100);
    if (!t.value("analytic", true) && !t.value("empirical", true)) reject(task.name, "nothing to compute");
  } else if (task.type == "expansion") {
    const double eps = t.value("eps", 0.25);
    if (!(eps > 0.0 && eps < 0.5)) reject(task.name, "eps must lie in (0, 0.5)");
    const std::string mode = t.value("mode", "edge");
    if (mode != "edge" && mode != "vertex") reject(task.name, "mode must be edge or vertex");
    const std::string method = t.value("method", "auto");
    if (method != "auto" && method != "exact" && method != "heuristic") {
      reject(task.name, "method must be auto, exact or heuristic");
    }
    positive("budget", 2000);
  } else if (task.type == "bridges") {
    positive("k", 0);
    positive("trials", 10000);
    const double h = t.value("h", 0.05);
    if (!(h > 0.0 && h < 0.5)) reject(task.name, "h must lie in (0, 0.5)");
  }
}

std::string csv_preamble(const ExperimentConfig& config) {
  return fmt::format("# config_hash={},master_seed={},version={}\n", hex64(config.hash()), config.master_seed,
                     version_string());
}

json provenance_json(const ExperimentConfig& config, const TaskConfig& task) {
  return {{"config_hash", hex64(config.hash())},
          {"master_seed", config.master_seed},
          {"task", task.name},
          {"task_seed", task_seed(config.master_seed, task.name)},
          {"version", version_string()}};
}

class ArtifactWriter {
 public:
  void write(const std::string& name, std::string bytes) { files.push_back({name, std::move(bytes)}); }

  std::vector<std::pair<std::string, std::string>> files;
};

std::optional<DegreeLaw> analytic_law(const ExperimentConfig& config, const GeneratedGraph& gg) {
  if (!config.gen) return std::nullopt;
  switch (config.gen->model) {
    case Model::kConfiguration:
    case Model::kRegular:
    case Model::kTwoBlock:
      return DegreeLaw::from_sequence(gg.graph.degree_sequence());
    default:
      return std::nullopt;
  }
}

void run_task(const ExperimentConfig& config, const TaskConfig& task, const GeneratedGraph& gg,
              ArtifactWriter& out) {
  const Graph& g = gg.graph;
  const json& t = task.params;
  const Seed seed = task_seed(config.master_seed, task.name);
  const unsigned threads = resolve_threads(config.threads);
  const std::string preamble = csv_preamble(config);
  json summary{{"provenance", provenance_json(config, task)}, {"type", task.type}};

  if (task.type == "histogram") {
    HistogramOptions options;
    options.delta = t.value("delta", 0.05);
    options.bins = t.value("bins", std::size_t{100});
    if (t.contains("zeta_ref")) options.zeta_ref = t.at("zeta_ref").get<double>();
    options.threads = threads;
    const auto hist = outbreak_histogram(g, t.value("trials", std::size_t{2000}), config.process, seed, options);
    std::ostringstream csv;
    csv << preamble;
    write_outbreak_csv(csv, hist);
    out.write(task.name + ".csv", csv.str());
    summary["p"] = config.process.p;
    summary["summary"] = hist.summary_json();
    if (t.contains("bands")) {
      json bands = json::array();
      for (const auto& band : t.at("bands")) {
        const double lo = band.at(0).get<double>(), hi = band.at(1).get<double>();
        bands.push_back({{"lo", lo}, {"hi", hi}, {"mass", hist.mass_in(lo, hi)}});
      }
      summary["bands"] = bands;
    }
    out.write(task.name + ".json", summary.dump(2) + "\n");
  } else if (task.type == "estimate") {
    EstimateOptions options;
    options.threads = threads;
    options.rule = t.value("rule", "include_seed") == "include_seed" ? SuccessRule::kIncludeSeed
                                                                     : SuccessRule::kExcludeSeed;
    options.measure_overlap = t.value("measure_overlap", true);
    summary["p"] = config.process.p;
    if (t.contains("eps")) {
      summary["report"] = adaptive_estimate(g, t.at("eps").get<double>(), config.process, seed, options).to_json();
    } else {
      const auto k = t.at("k").get<std::uint32_t>();
      const auto q = t.at("q").get<std::size_t>();
      const auto report = t.value("seeding", "uniform") == "degree_biased"
                              ? estimate_degree_biased(g, k, q, config.process, seed, options)
                              : estimate(g, k, q, config.process, seed, options);
      summary["report"] = report.to_json();
    }
    out.write(task.name + ".json", summary.dump(2) + "\n");
  } else if (task.type == "giant") {
    const auto grid = grid_for(config, task);
    const auto curve = giant_fraction_curve(g, grid, t.value("trials", std::size_t{10}), seed, threads);
    std::ostringstream csv;
    csv << preamble << "p,mean,stddev,stderr,min,max,trials\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto& s = curve[i];
      csv << fmt::format("{},{},{},{},{},{},{}\n", grid[i], s.mean, s.stddev, s.stderr_, s.min, s.max,
                         s.per_trial.size());
    }
    out.write(task.name + ".csv", csv.str());
  } else if (task.type == "survival") {
    const auto grid = grid_for(config, task);
    const auto law = analytic_law(config, gg);
    if (t.value("analytic", true)) {
      if (!law) throw ConfigError("no_analytic_law", "no fixed-point law for this graph model");
      std::ostringstream csv;
      csv << preamble;
      write_survival_csv(csv, survival_curve(*law, grid));
      out.write(task.name + "_analytic.csv", csv.str());
    }
    if (t.value("empirical", true)) {
      std::ostringstream csv;
      csv << preamble;
      write_survival_csv(csv, survival_curve(g, grid, t.value("trials", std::size_t{100}), seed, threads));
      out.write(task.name + "_empirical.csv", csv.str());
    }
  } else if (task.type == "expansion") {
    const double eps = t.value("eps", 0.25);
    const auto mode = t.value("mode", "edge") == "edge" ? ExpansionMode::kEdge : ExpansionMode::kVertex;
    const std::string method = t.value("method", "auto");
    const bool exact = method == "exact" || (method == "auto" && g.num_vertices() <= kExactExpansionCap);
    const auto report = exact ? expansion_exact(g, eps, mode)
                              : expansion_heuristic(g, eps, mode, t.value("budget", std::size_t{2000}), seed);
    summary["report"] = {{"epsilon", report.epsilon},
                         {"mode", std::string(mode == ExpansionMode::kEdge ? "edge" : "vertex")},
                         {"value", report.value.value()},
                         {"numerator", report.value.numerator},
                         {"denominator", report.value.denominator},
                         {"witness_size", report.witness.size()},
                         {"witness", report.witness},
                         {"exact", report.exact}};
    out.write(task.name + ".json", summary.dump(2) + "\n");
  } else if (task.type == "bridges") {
    const auto grid = grid_for(config, task);
    const auto root = t.value("root", Vertex{0});
    const auto k = t.at("k").get<std::uint32_t>();
    std::vector<BridgeReport> reports;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      reports.push_back(pivotal_bridge_report(g, root, k, grid[i], t.value("trials", std::size_t{10000}),
                                              derive_seed(seed, "p", i), t.value("h", 0.05), threads));
    }
    std::ostringstream csv;
    csv << preamble;
    write_bridge_csv(csv, reports);
    out.write(task.name + ".csv", csv.str());
  }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> run_task_artifacts(const ExperimentConfig& config,
                                                                    const TaskConfig& task,
                                                                    const GeneratedGraph& graph) {
  ArtifactWriter writer;
  run_task(config, task, graph, writer);
  return std::move(writer.files);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.master_seed = j.value("master_seed", Seed{0});
    c.output_dir = j.value("output_dir", std::string("out"));
    c.threads = j.value("threads", 0u);
    if (j.contains("gen")) {
      json gen = j.at("gen");
      if (!gen.contains("seed")) gen["seed"] = derive_seed(c.master_seed, "graph", 0);
      c.gen = GenSpec::from_json(gen);
    }
    if (j.contains("graph_file")) c.graph_file = j.at("graph_file").get<std::string>();
    const json process = j.value("process", json::object());
    if (process.contains("lambda")) {
      c.process = TransmissionParams::from_lambda(process.at("lambda").get<double>());
    } else {
      c.process = TransmissionParams::from_p(process.value("p", 0.5));
    }
    c.p_grid = process.value("p_grid", std::vector<double>{});
    std::set<std::string> names;
    for (const auto& tj : j.at("tasks")) {
      TaskConfig task;
      task.type = tj.at("type").get<std::string>();
      task.name = tj.value("name", task.type);
      task.params = tj;
      if (!names.insert(task.name).second) {
        throw ConfigError("duplicate_task", "duplicate task name '" + task.name + "'");
      }
      c.tasks.push_back(std::move(task));
    }
  } catch (const json::exception& e) {
    throw ConfigError("config_json", std::string("malformed experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json j{{"master_seed", master_seed}};
  if (gen) j["gen"] = gen->to_json();
  if (graph_file) j["graph_file"] = *graph_file;
  json proc{{"p", process.p}, {"p_grid", p_grid}};
  if (process.lambda) proc["lambda"] = *process.lambda;
  j["process"] = proc;
  json tasks_json = json::array();
  for (const auto& task : tasks) {
    json tj = task.params;
    tj["type"] = task.type;
    tj["name"] = task.name;
    tasks_json.push_back(tj);
  }
  j["tasks"] = tasks_json;
  return j;
}

std::uint64_t ExperimentConfig::hash() const { return content_hash(to_json().dump()); }

void ExperimentConfig::validate() const {
  if (gen.has_value() == graph_file.has_value()) {
    throw ConfigError("graph_source", "config needs exactly one of gen and graph_file");
  }
  if (gen) gen->validate();
  if (!(process.p >= 0.0 && process.p <= 1.0)) throw ConfigError("process_invalid", "p must lie in [0, 1]");
  for (double p : p_grid) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("process_invalid", "p_grid values must lie in [0, 1]");
  }
  if (tasks.empty()) throw ConfigError("no_tasks", "config lists no tasks");
  for (const auto& task : tasks) {
    if (!kTaskTypes.contains(task.type)) throw ConfigError("unknown_task", "unknown task type '" + task.type + "'");
    try {
      validate_task(*this, task);
    } catch (const json::exception& e) {
      reject(task.name, std::string("bad parameter: ") + e.what());
    }
  }
}

bool Manifest::ok() const {
  for (const auto& t : tasks) {
    if (t.status != "ok") return false;
  }
  return true;
}

json Manifest::to_json() const {
  json tasks_json = json::array();
  for (const auto& t : tasks) {
    json files = json::array();
    for (const auto& a : t.artifacts) files.push_back({{"path", a.path}, {"fnv1a64", a.hash}, {"bytes", a.bytes}});
    json tj{{"name", t.name}, {"type", t.type}, {"status", t.status}, {"files", files}};
    if (t.status == "failed") {
      tj["error_code"] = t.error_code;
      tj["error"] = t.error;
    }
    tasks_json.push_back(tj);
  }
  return {{"config_hash", config_hash},
          {"master_seed", master_seed},
          {"version", version},
          {"graph", graph},
          {"tasks", tasks_json}};
}

GeneratedGraph build_experiment_graph(const ExperimentConfig& config) {
  if (config.gen) return generate(*config.gen);
  GeneratedGraph gg{read_edge_list_file(*config.graph_file), {}, {}, std::nullopt};
  return gg;
}

Manifest run_experiment(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);

  Manifest manifest;
  manifest.config_hash = hex64(config.hash());
  manifest.master_seed = config.master_seed;
  manifest.version = version_string();
  auto flush = [&] {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.to_json().dump(2) << "\n";
  };

  std::optional<GeneratedGraph> gg;
  try {
    gg = build_experiment_graph(config);
    json graph{{"vertices", gg->graph.num_vertices()}, {"edges", gg->graph.num_edges()}};
    if (config.gen) {
      graph["spec"] = config.gen->to_json();
      graph["provenance"] = gg->provenance.to_json();
    } else {
      graph["file"] = *config.graph_file;
    }
    manifest.graph = graph;
  } catch (const std::exception& e) {
    manifest.graph = {{"error_code", error_code(e)}, {"error", e.what()}};
    for (const auto& task : config.tasks) {
      manifest.tasks.push_back({task.name, task.type, "skipped", "", "graph construction failed", {}});
    }
    flush();
    throw;
  }

  for (const auto& task : config.tasks) {
    TaskRecord record{task.name, task.type, "ok", "", "", {}};
    try {
      for (const auto& [name, bytes] : run_task_artifacts(config, task, *gg)) {
        std::ofstream out(dir / name, std::ios::binary);
        out << bytes;
        out.close();
        if (!out) throw std::ios_base::failure("cannot write " + (dir / name).string());
        record.artifacts.push_back({name, hex64(content_hash(bytes)), bytes.size()});
      }
    } catch (const std::exception& e) {
      record.status = "failed";
      record.error_code = error_code(e);
      record.error = e.what();
    }
    manifest.tasks.push_back(std::move(record));
    flush();
  }
  return manifest;
}

}  // namespace outbreak
