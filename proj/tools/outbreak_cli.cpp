// Command-line front end: graph generation, single experiment tasks, exact
// oracles and config-driven experiments.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "outbreak/harness.hpp"
#include "outbreak/oracle.hpp"

using nlohmann::json;
using namespace outbreak;

namespace {

struct GraphFlags {
  std::string graph_file;
  std::string model;
  std::string degrees;
  std::string gen_config;
  std::size_t m = 0, n = 0, d = 0;

  void attach(CLI::App* app) {
    app->add_option("--graph", graph_file, "edge-list file");
    app->add_option("--model", model, "cm | pa | motif | two_block | k_regular");
    app->add_option("--degrees", degrees, "degree sequence: 3x100000, 2,2,3,3 or @file");
    app->add_option("--gen-config", gen_config, "graph spec JSON file");
    app->add_option("--m", m, "edges per arrival (pa)");
    app->add_option("--n", n, "vertex count");
    app->add_option("--d", d, "degree (two_block, k_regular)");
  }
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config_json", path + ": " + e.what());
  }
}

json parse_degrees(const std::string& text) {
  if (text.starts_with("@")) {
    std::ifstream in(text.substr(1));
    if (!in) throw std::ios_base::failure("cannot open " + text.substr(1));
    std::vector<std::size_t> seq;
    for (std::size_t x; in >> x;) seq.push_back(x);
    return seq;
  }
  if (auto x = text.find('x'); x != std::string::npos) {
    return {{"value", std::stoul(text.substr(0, x))}, {"count", std::stoul(text.substr(x + 1))}};
  }
  std::vector<std::size_t> seq;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) seq.push_back(std::stoul(item));
  return seq;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':'), b = text.rfind(':');
    const double lo = std::stod(text.substr(0, a)), hi = std::stod(text.substr(a + 1, b - a - 1)),
                 step = std::stod(text.substr(b + 1));
    if (!(step > 0.0)) throw ConfigError("grid_invalid", "grid step must be positive");
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) grid.push_back(std::stod(item));
  return grid;
}

// Graph source as experiment-config fields.
void graph_source(const GraphFlags& f, json& config) {
  const int sources = !f.graph_file.empty() + !f.model.empty() + !f.gen_config.empty();
  if (sources != 1) throw ConfigError("graph_source", "give exactly one of --graph, --model, --gen-config");
  if (!f.graph_file.empty()) {
    config["graph_file"] = f.graph_file;
    return;
  }
  if (!f.gen_config.empty()) {
    config["gen"] = read_json_file(f.gen_config);
    return;
  }
  json gen{{"model", f.model}};
  if (!f.degrees.empty()) gen["degrees"] = parse_degrees(f.degrees);
  if (f.m) gen["m"] = f.m;
  if (f.n) gen["n"] = f.n;
  if (f.d) gen["d"] = f.d;
  config["gen"] = gen;
}

void emit(const std::string& out, const std::string& bytes) {
  if (out.empty()) {
    std::cout << bytes;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  file << bytes;
  file.close();
  if (!file) throw std::ios_base::failure("cannot write " + out);
}

// Runs a one-task experiment. With --out the artifacts and a manifest land in
// that directory; otherwise they go to stdout.
int run_single(json config, const std::string& out) {
  if (!out.empty()) {
    config["output_dir"] = out;
    const auto manifest = run_experiment(ExperimentConfig::from_json(config));
    std::cout << manifest.to_json().dump(2) << "\n";
    return manifest.ok() ? 0 : 2;
  }
  const auto parsed = ExperimentConfig::from_json(config);
  const auto graph = build_experiment_graph(parsed);
  const auto files = run_task_artifacts(parsed, parsed.tasks.front(), graph);
  for (const auto& [name, bytes] : files) {
    if (files.size() > 1) std::cout << "==> " << name << " <==\n";
    std::cout << bytes;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bond percolation and SIR outbreak experiments"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);

  Seed seed = 0;
  unsigned threads = 0;
  std::string out;
  double p = 0.5;
  std::string p_grid;
  GraphFlags gf;

  auto common = [&](CLI::App* sub, bool with_graph = true) {
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--threads", threads, "worker threads (default $OUTBREAK_LOCAL_THREADS, then 1)");
    sub->add_option("--out", out, "output file or directory");
    if (with_graph) gf.attach(sub);
  };

  auto* generate = app.add_subcommand("generate", "sample a graph and write it as an edge list");
  common(generate);

  std::size_t trials = 0;
  auto* percolate = app.add_subcommand("percolate", "largest-component fraction under bond percolation");
  common(percolate);
  percolate->add_option("--p", p, "edge retention probability");
  percolate->add_option("--p-grid", p_grid, "list a,b,c or range lo:hi:step");
  percolate->add_option("--trials", trials, "trials per grid point")->default_val(10);

  double delta = 0.05;
  double zeta_ref = -1.0;
  std::size_t bins = 100;
  double lambda = -1.0;
  auto* outbreak_cmd = app.add_subcommand("outbreak", "single-seed outbreak size histogram");
  common(outbreak_cmd);
  outbreak_cmd->add_option("--p", p, "transmission probability");
  outbreak_cmd->add_option("--lambda", lambda, "transmission rate; p = lambda/(lambda+1)");
  outbreak_cmd->add_option("--trials", trials, "outbreaks")->default_val(2000);
  outbreak_cmd->add_option("--delta", delta, "band half-width");
  outbreak_cmd->add_option("--zeta-ref", zeta_ref, "reference outbreak fraction");
  outbreak_cmd->add_option("--bins", bins, "histogram bins");

  std::uint32_t k = 0;
  std::size_t q = 0;
  double eps = 0.0;
  bool degree_biased = false, exclude_seed = false;
  auto* estimate_cmd = app.add_subcommand("estimate", "local-query outbreak estimator");
  common(estimate_cmd);
  estimate_cmd->add_option("--p", p, "transmission probability");
  estimate_cmd->add_option("--lambda", lambda, "transmission rate; p = lambda/(lambda+1)");
  estimate_cmd->add_option("--k", k, "ball radius and size threshold");
  estimate_cmd->add_option("--q", q, "number of queries");
  estimate_cmd->add_option("--eps", eps, "adaptive schedule accuracy");
  estimate_cmd->add_flag("--degree-biased", degree_biased, "seed queries proportional to degree");
  estimate_cmd->add_flag("--exclude-seed", exclude_seed, "require k infections besides the seed");

  bool no_analytic = false, no_empirical = false;
  auto* survival = app.add_subcommand("survival", "survival curve, fixed point and Monte Carlo");
  common(survival);
  survival->add_option("--p-grid", p_grid, "list a,b,c or range lo:hi:step")->required();
  survival->add_option("--trials", trials, "Monte Carlo trials per point")->default_val(100);
  survival->add_flag("--no-analytic", no_analytic);
  survival->add_flag("--no-empirical", no_empirical);

  std::string mode = "edge", method = "auto";
  std::size_t budget = 2000;
  auto* expansion = app.add_subcommand("expansion", "large-set expansion");
  common(expansion);
  expansion->add_option("--eps", eps, "smallest set size as a fraction of n")->required();
  expansion->add_option("--mode", mode, "edge | vertex");
  expansion->add_option("--method", method, "auto | exact | heuristic");
  expansion->add_option("--budget", budget, "heuristic move budget");

  Vertex root = 0;
  double h = 0.05;
  auto* bridges = app.add_subcommand("bridges", "k-bridge counts and pivotal rates");
  common(bridges);
  bridges->add_option("--root", root, "root vertex");
  bridges->add_option("--k", k, "distance threshold")->required();
  bridges->add_option("--p", p, "edge retention probability");
  bridges->add_option("--p-grid", p_grid, "list a,b,c or range lo:hi:step");
  bridges->add_option("--trials", trials, "trials per point")->default_val(10000);
  bridges->add_option("--step", h, "finite-difference half-step");

  Vertex vertex = 0;
  std::string seeds_text;
  std::string rational;
  std::int64_t zeta_k = -1;
  auto* oracle = app.add_subcommand("oracle", "exact laws by enumerating every bond mask");
  common(oracle);
  oracle->add_option("--vertex", vertex, "seed vertex");
  oracle->add_option("--seeds", seeds_text, "comma-separated seed set");
  oracle->add_option("--p", p, "edge retention probability");
  oracle->add_option("--zeta-k", zeta_k, "report P(cluster reaches distance k) instead");
  oracle->add_option("--rational", rational, "p as a/b, adds exact fractions");

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "run a JSON experiment config");
  common(experiment, false);
  experiment->add_option("--config", config_path, "experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }

  try {
    json config{{"master_seed", seed}, {"threads", threads}};
    json process{{"p", p}};
    if (lambda >= 0.0) process = {{"lambda", lambda}};
    if (!p_grid.empty()) process["p_grid"] = parse_grid(p_grid);
    config["process"] = process;

    if (generate->parsed()) {
      graph_source(gf, config);
      config["tasks"] = json::array({{{"type", "giant"}}});
      const auto parsed = ExperimentConfig::from_json(config);
      const auto gg = build_experiment_graph(parsed);
      std::ostringstream edges;
      write_edge_list(edges, gg.graph);
      json meta{{"vertices", gg.graph.num_vertices()}, {"edges", gg.graph.num_edges()}, {"version", version_string()}};
      if (parsed.gen) {
        meta["spec"] = parsed.gen->to_json();
        meta["provenance"] = gg.provenance.to_json();
      }
      if (out.empty()) {
        std::cout << edges.str();
      } else {
        emit(out, edges.str());
        emit(out + ".json", meta.dump(2) + "\n");
        std::cout << meta.dump(2) << "\n";
      }
      return 0;
    }
    if (oracle->parsed()) {
      graph_source(gf, config);
      config["tasks"] = json::array({{{"type", "giant"}}});
      const auto gg = build_experiment_graph(ExperimentConfig::from_json(config));
      std::vector<Vertex> seeds;
      if (!seeds_text.empty()) {
        std::stringstream ss(seeds_text);
        for (std::string item; std::getline(ss, item, ',');) seeds.push_back(static_cast<Vertex>(std::stoul(item)));
      } else {
        seeds.push_back(vertex);
      }
      const ExactLaw law = zeta_k >= 0 ? exact_zeta_k_law(gg.graph, seeds.front(), static_cast<std::uint32_t>(zeta_k), p)
                                       : exact_outbreak_distribution(gg.graph, seeds, p);
      json result = law.to_json();
      if (!rational.empty()) {
        const auto slash = rational.find('/');
        if (slash == std::string::npos) throw ConfigError("rational_invalid", "--rational expects a/b");
        const auto exact = law.rational(std::stoll(rational.substr(0, slash)), std::stoll(rational.substr(slash + 1)));
        json fractions = json::object();
        for (std::size_t i = 0; i < law.support.size(); ++i) fractions[std::to_string(law.support[i])] = exact[i].str();
        result = {{"law", result}, {"rational", fractions}};
      }
      emit(out, result.dump() + "\n");
      return 0;
    }
    if (experiment->parsed()) {
      json file = read_json_file(config_path);
      if (!experiment->get_option("--seed")->empty()) file["master_seed"] = seed;
      if (!experiment->get_option("--threads")->empty()) file["threads"] = threads;
      if (!out.empty()) file["output_dir"] = out;
      const auto manifest = run_experiment(ExperimentConfig::from_json(file));
      std::cout << manifest.to_json().dump(2) << "\n";
      return manifest.ok() ? 0 : 2;
    }

    graph_source(gf, config);
    json task;
    if (percolate->parsed()) {
      task = {{"type", "giant"}, {"trials", trials}};
    } else if (outbreak_cmd->parsed()) {
      task = {{"type", "histogram"}, {"trials", trials}, {"delta", delta}, {"bins", bins}};
      if (zeta_ref >= 0.0) task["zeta_ref"] = zeta_ref;
    } else if (estimate_cmd->parsed()) {
      task = {{"type", "estimate"}};
      if (eps > 0.0) {
        task["eps"] = eps;
      } else {
        task["k"] = k;
        task["q"] = q;
      }
      task["seeding"] = degree_biased ? "degree_biased" : "uniform";
      task["rule"] = exclude_seed ? "exclude_seed" : "include_seed";
    } else if (survival->parsed()) {
      task = {{"type", "survival"}, {"trials", trials}, {"analytic", !no_analytic}, {"empirical", !no_empirical}};
    } else if (expansion->parsed()) {
      task = {{"type", "expansion"}, {"eps", eps}, {"mode", mode}, {"method", method}, {"budget", budget}};
    } else if (bridges->parsed()) {
      task = {{"type", "bridges"}, {"root", root}, {"k", k}, {"trials", trials}, {"h", h}};
    }
    config["tasks"] = json::array({task});
    return run_single(config, out);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", error_code(e)}, {"message", e.what()}}.dump() << "\n";
    return exit_code_for(e);
  }
}
