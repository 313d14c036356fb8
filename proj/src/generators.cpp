#include "outbreak/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "outbreak/components.hpp"

namespace outbreak {

std::size_t Motif::external_degree() const noexcept {
  return std::accumulate(ext_degrees.begin(), ext_degrees.end(), std::size_t{0});
}

void Motif::validate() const {
  if (internal.num_vertices() == 0) throw GeneratorError("motif_empty", "motif has no vertices");
  if (ext_degrees.size() != internal.num_vertices()) {
    throw GeneratorError("motif_ext_mismatch",
                         "motif ext list has " + std::to_string(ext_degrees.size()) +
                             " entries for " + std::to_string(internal.num_vertices()) + " vertices");
  }
  if (components(internal).sizes.size() != 1) {
    throw GeneratorError("motif_disconnected", "motif internal graph must be connected");
  }
}

void MotifDistribution::add_table(std::size_t d, std::vector<WeightedMotif> entries) {
  if (entries.empty()) throw GeneratorError("motif_table_empty", "empty motif table for d=" + std::to_string(d));
  double total = 0.0;
  for (const auto& entry : entries) {
    entry.motif.validate();
    if (entry.motif.external_degree() != d) {
      throw GeneratorError("motif_degree_mismatch",
                           "motif with total external degree " +
                               std::to_string(entry.motif.external_degree()) +
                               " registered under d=" + std::to_string(d));
    }
    if (entry.motif.size() > s_max_) {
      throw GeneratorError("motif_too_large", "motif of size " + std::to_string(entry.motif.size()) +
                                                  " exceeds s_max=" + std::to_string(s_max_));
    }
    if (!(entry.probability >= 0.0)) {
      throw GeneratorError("motif_probability", "negative motif probability");
    }
    total += entry.probability;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw GeneratorError("motif_probability",
                         "motif probabilities for d=" + std::to_string(d) + " sum to " + std::to_string(total));
  }
  tables_[d] = std::move(entries);
}

const std::vector<WeightedMotif>& MotifDistribution::table(std::size_t d) const {
  auto it = tables_.find(d);
  if (it == tables_.end()) {
    throw GeneratorError("missing_motif_table", "no motif table for external degree " + std::to_string(d));
  }
  return it->second;
}

const Motif& MotifDistribution::draw(std::size_t d, Rng& rng) const {
  const auto& entries = table(d);
  if (entries.size() == 1) return entries.front().motif;
  double u = rng.uniform();
  for (const auto& entry : entries) {
    if (u < entry.probability) return entry.motif;
    u -= entry.probability;
  }
  return entries.back().motif;
}

MotifDistribution MotifDistribution::from_json(const nlohmann::json& j, std::size_t s_max) {
  if (!j.is_object()) throw GeneratorError("motif_json", "motif distribution must be a JSON object");
  MotifDistribution dist(s_max);
  for (const auto& [key, list] : j.items()) {
    std::size_t d = 0;
    try {
      d = std::stoul(key);
    } catch (const std::exception&) {
      throw GeneratorError("motif_json", "motif table key '" + key + "' is not a degree");
    }
    std::vector<WeightedMotif> entries;
    for (const auto& item : list) {
      const auto ext = item.at("ext").get<std::vector<std::size_t>>();
      std::vector<Edge> edges;
      for (const auto& pair : item.value("edges", nlohmann::json::array())) {
        edges.push_back({pair.at(0).get<Vertex>(), pair.at(1).get<Vertex>()});
      }
      entries.push_back({Motif{Graph::from_edges(ext.size(), edges), ext}, item.value("p", 1.0)});
    }
    dist.add_table(d, std::move(entries));
  }
  return dist;
}

nlohmann::json MotifDistribution::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [d, entries] : tables_) {
    auto& list = j[std::to_string(d)];
    list = nlohmann::json::array();
    for (const auto& entry : entries) {
      nlohmann::json edges = nlohmann::json::array();
      for (const Edge& e : entry.motif.internal.edges()) edges.push_back({e.u, e.v});
      list.push_back({{"edges", edges}, {"ext", entry.motif.ext_degrees}, {"p", entry.probability}});
    }
  }
  return j;
}

std::string to_string(Model model) {
  switch (model) {
    case Model::kConfiguration: return "cm";
    case Model::kPreferentialAttachment: return "pa";
    case Model::kMotifOverlay: return "motif";
    case Model::kTwoBlock: return "two_block";
    case Model::kRegular: return "k_regular";
  }
  return "unknown";
}

Model model_from_string(const std::string& name) {
  for (Model m : {Model::kConfiguration, Model::kPreferentialAttachment, Model::kMotifOverlay,
                  Model::kTwoBlock, Model::kRegular}) {
    if (to_string(m) == name) return m;
  }
  throw GeneratorError("unknown_model", "unknown graph model '" + name + "'");
}

void GenSpec::validate() const {
  switch (model) {
    case Model::kConfiguration:
      if (!degrees && !power_law) throw GeneratorError("spec_incomplete", "cm spec needs degrees or power_law");
      if (degrees && !check_graphical(*degrees)) {
        throw GeneratorError("non_graphical", "degree sequence is not graphical");
      }
      if (power_law && (power_law->n == 0 || power_law->d_min == 0 || power_law->d_min > power_law->d_max)) {
        throw GeneratorError("spec_incomplete", "power_law needs n > 0 and 1 <= d_min <= d_max");
      }
      break;
    case Model::kPreferentialAttachment:
      if (m < 2 || n < 2 * m + 1) throw GeneratorError("spec_invalid", "pa needs m >= 2 and n >= 2m+1");
      break;
    case Model::kMotifOverlay:
      if (external.size() != 1 || !motifs) {
        throw GeneratorError("spec_incomplete", "motif spec needs one external spec and a motif distribution");
      }
      external.front().validate();
      break;
    case Model::kTwoBlock:
      if (n % 2 != 0 || d >= n / 2 || (d * (n / 2)) % 2 != 0) {
        throw GeneratorError("spec_invalid", "two_block needs even n and feasible d-regular blocks");
      }
      break;
    case Model::kRegular:
      if (d >= n || (d * n) % 2 != 0) throw GeneratorError("parity", "k_regular needs d < n and d*n even");
      break;
  }
}

nlohmann::json GenSpec::to_json() const {
  nlohmann::json j;
  j["model"] = to_string(model);
  j["seed"] = seed;
  switch (model) {
    case Model::kConfiguration:
      if (degrees) {
        const auto& seq = degrees->degrees;
        const bool constant = !seq.empty() && std::all_of(seq.begin(), seq.end(), [&](auto x) { return x == seq.front(); });
        if (constant) {
          j["degrees"] = {{"value", seq.front()}, {"count", seq.size()}};
        } else {
          j["degrees"] = seq;
        }
      }
      if (power_law) {
        j["power_law"] = {{"tau", power_law->tau}, {"d_min", power_law->d_min},
                          {"d_max", power_law->d_max}, {"n", power_law->n}};
      }
      j["max_retries"] = max_retries;
      break;
    case Model::kPreferentialAttachment:
      j["m"] = m;
      j["n"] = n;
      break;
    case Model::kMotifOverlay:
      if (!external.empty()) j["external"] = external.front().to_json();
      if (motifs) {
        j["motifs"] = motifs->to_json();
        j["s_max"] = motifs->s_max();
      }
      break;
    case Model::kTwoBlock:
    case Model::kRegular:
      j["d"] = d;
      j["n"] = n;
      break;
  }
  return j;
}

GenSpec GenSpec::from_json(const nlohmann::json& j) {
  GenSpec spec;
  try {
    spec.model = model_from_string(j.at("model").get<std::string>());
    spec.seed = j.value("seed", Seed{0});
    spec.max_retries = j.value("max_retries", std::size_t{1000});
    spec.m = j.value("m", std::size_t{0});
    spec.n = j.value("n", std::size_t{0});
    spec.d = j.value("d", std::size_t{0});
    if (j.contains("degrees")) {
      const auto& deg = j.at("degrees");
      if (deg.is_array()) {
        spec.degrees = DegreeSequence{deg.get<std::vector<std::size_t>>()};
      } else {
        // {"value": 3, "count": 100000}
        spec.degrees = constant_degrees(deg.at("value").get<std::size_t>(), deg.at("count").get<std::size_t>());
      }
    }
    if (j.contains("power_law")) {
      const auto& pl = j.at("power_law");
      spec.power_law = PowerLawDegrees{pl.value("tau", 2.5), pl.value("d_min", std::size_t{3}),
                                       pl.value("d_max", std::size_t{1000}), pl.at("n").get<std::size_t>()};
    }
    if (j.contains("external")) spec.external.push_back(GenSpec::from_json(j.at("external")));
    if (j.contains("motifs")) {
      spec.motifs = MotifDistribution::from_json(j.at("motifs"), j.value("s_max", std::size_t{64}));
    }
  } catch (const nlohmann::json::exception& e) {
    throw GeneratorError("spec_json", std::string("malformed graph spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::uint64_t GenSpec::hash() const { return fnv1a64(to_json().dump()); }

nlohmann::json Provenance::to_json() const {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(spec_hash));
  nlohmann::json j{{"spec_hash", hex}, {"seed", seed}, {"erased", erased}, {"attempts", attempts}};
  if (pa) {
    j["pa"] = {{"tuple_draws", pa->tuple_draws}, {"rejected", pa->rejected},
               {"rejection_bound", pa->rejection_bound}};
  }
  return j;
}

DegreeSequence constant_degrees(std::size_t d, std::size_t n) {
  return DegreeSequence{std::vector<std::size_t>(n, d)};
}

DegreeSequence power_law_degrees(const PowerLawDegrees& law, Seed seed) {
  std::vector<double> cdf;
  double total = 0.0;
  for (std::size_t k = law.d_min; k <= law.d_max; ++k) {
    total += std::pow(static_cast<double>(k), -law.tau);
    cdf.push_back(total);
  }
  Rng rng(seed);
  DegreeSequence d;
  d.degrees.reserve(law.n);
  for (std::size_t i = 0; i < law.n; ++i) {
    const double u = rng.uniform() * total;
    const auto pos = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    d.degrees.push_back(law.d_min + std::min(pos, cdf.size() - 1));
  }
  if (d.total() % 2 != 0) ++d.degrees.back();
  return d;
}

GeneratedGraph gen_cm_simple(const DegreeSequence& d, Seed seed, std::size_t max_retries) {
  if (!check_graphical(d)) throw GeneratorError("non_graphical", "degree sequence is not graphical");
  const std::size_t n = d.size();
  std::vector<Vertex> stubs;
  stubs.reserve(d.total());
  for (Vertex v = 0; v < n; ++v) stubs.insert(stubs.end(), d.degrees[v], v);

  Rng rng(seed);
  GeneratedGraph out;
  out.provenance.seed = seed;
  std::vector<Edge> pairs(stubs.size() / 2);
  const std::size_t budget = std::max<std::size_t>(max_retries, 1);
  for (std::size_t attempt = 1; attempt <= budget; ++attempt) {
    out.provenance.attempts = attempt;
    rng.shuffle(std::span<Vertex>(stubs));
    bool simple = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const Vertex a = stubs[2 * i], b = stubs[2 * i + 1];
      if (a == b) simple = false;
      pairs[i] = a < b ? Edge{a, b} : Edge{b, a};
    }
    if (simple) {
      std::vector<Edge> sorted = pairs;
      std::sort(sorted.begin(), sorted.end());
      simple = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }
    if (simple) {
      out.graph = Graph::from_edges(n, pairs);
      return out;
    }
  }
  // Erased configuration model: keep the last matching minus loops and
  // duplicate edges.
  std::erase_if(pairs, [](const Edge& e) { return e.u == e.v; });
  out.graph = Graph::from_edges(n, pairs);
  out.provenance.erased = true;
  return out;
}

GeneratedGraph gen_k_regular(std::size_t d, std::size_t n, Seed seed) {
  if (d >= n || (d * n) % 2 != 0) {
    throw GeneratorError("parity", std::to_string(d) + "-regular graph on " + std::to_string(n) +
                                       " vertices does not exist (need d < n and d*n even)");
  }
  return gen_cm_simple(constant_degrees(d, n), seed);
}

GeneratedGraph gen_pa(std::size_t m, std::size_t n, Seed seed) {
  if (m < 2 || n < 2 * m + 1) throw GeneratorError("spec_invalid", "gen_pa needs m >= 2 and n >= 2m+1");
  std::vector<Edge> edges;
  // Each vertex appears once per incident edge end, so a uniform entry is a
  // degree-proportional vertex.
  std::vector<Vertex> endpoints;
  std::vector<std::size_t> degree(n, 0);
  std::size_t max_degree = m;
  const std::size_t seed_size = m + 1;
  for (Vertex a = 0; a < seed_size; ++a) {
    for (Vertex b = a + 1; b < seed_size; ++b) {
      edges.push_back({a, b});
      endpoints.push_back(a);
      endpoints.push_back(b);
    }
    degree[a] = m;
  }

  Rng rng(seed);
  PaCounters counters;
  const double pair_count = static_cast<double>(m * (m - 1) / 2);
  std::vector<Vertex> targets(m);
  for (Vertex t = static_cast<Vertex>(seed_size); t < n; ++t) {
    counters.rejection_bound +=
        pair_count * static_cast<double>(max_degree) / static_cast<double>(endpoints.size());
    for (;;) {
      ++counters.tuple_draws;
      for (auto& w : targets) w = endpoints[rng.below(endpoints.size())];
      bool distinct = true;
      for (std::size_t i = 0; i < m && distinct; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          if (targets[i] == targets[j]) {
            distinct = false;
            break;
          }
        }
      }
      if (distinct) break;
      ++counters.rejected;
    }
    for (Vertex w : targets) {
      edges.push_back({w, t});
      endpoints.push_back(w);
      endpoints.push_back(t);
      max_degree = std::max(max_degree, ++degree[w]);
    }
    degree[t] = m;
  }

  GeneratedGraph out;
  out.graph = Graph::from_edges(n, edges);
  out.provenance.seed = seed;
  out.provenance.pa = counters;
  return out;
}

GeneratedGraph gen_motif_overlay(const Graph& external, const MotifDistribution& motifs, Seed seed) {
  const std::size_t n_ext = external.num_vertices();
  Rng rng(seed);
  std::vector<const Motif*> chosen(n_ext);
  std::vector<std::size_t> base(n_ext + 1, 0);
  for (Vertex u = 0; u < n_ext; ++u) {
    chosen[u] = &motifs.draw(external.degree(u), rng);
    base[u + 1] = base[u] + chosen[u]->size();
  }

  GeneratedGraph out;
  out.provenance.seed = seed;
  out.motif_of.resize(base[n_ext]);
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n_ext; ++u) {
    const auto offset = static_cast<Vertex>(base[u]);
    for (std::size_t i = 0; i < chosen[u]->size(); ++i) out.motif_of[offset + i] = u;
    for (const Edge& e : chosen[u]->internal.edges()) edges.push_back({offset + e.u, offset + e.v});
  }

  // endpoint_of[2e] / [2e+1]: motif vertex carrying the u-side / v-side of
  // external edge e. At each external vertex the incident edges are matched
  // to the multiset {v repeated ext_v times} by a uniform bijection.
  std::vector<Vertex> endpoint_of(2 * external.num_edges());
  std::vector<Vertex> slots;
  for (Vertex u = 0; u < n_ext; ++u) {
    slots.clear();
    const Motif& motif = *chosen[u];
    for (Vertex v = 0; v < motif.size(); ++v) {
      slots.insert(slots.end(), motif.ext_degrees[v], static_cast<Vertex>(base[u] + v));
    }
    rng.shuffle(std::span<Vertex>(slots));
    const auto incident = external.incident_edges(u);
    for (std::size_t i = 0; i < incident.size(); ++i) {
      const EdgeId e = incident[i];
      const bool is_low_end = external.edge(e).u == u;
      endpoint_of[2 * e + (is_low_end ? 0 : 1)] = slots[i];
    }
  }
  for (EdgeId e = 0; e < external.num_edges(); ++e) edges.push_back({endpoint_of[2 * e], endpoint_of[2 * e + 1]});

  out.graph = Graph::from_edges(base[n_ext], edges);
  return out;
}

GeneratedGraph gen_two_block(std::size_t d, std::size_t n, Seed seed) {
  if (n % 2 != 0) throw GeneratorError("spec_invalid", "two_block needs an even vertex count");
  const std::size_t half = n / 2;
  auto first = gen_k_regular(d, half, derive_seed(seed, "block", 0));
  auto second = gen_k_regular(d, half, derive_seed(seed, "block", 1));
  std::vector<Edge> edges(first.graph.edges().begin(), first.graph.edges().end());
  const auto shift = static_cast<Vertex>(half);
  for (const Edge& e : second.graph.edges()) edges.push_back({e.u + shift, e.v + shift});
  edges.push_back({0, shift});

  GeneratedGraph out;
  out.graph = Graph::from_edges(n, edges);
  out.provenance.seed = seed;
  out.provenance.erased = first.provenance.erased || second.provenance.erased;
  out.provenance.attempts = first.provenance.attempts + second.provenance.attempts;
  out.bridge = out.graph.find_edge(0, shift);
  return out;
}

GeneratedGraph generate(const GenSpec& spec) {
  spec.validate();
  GeneratedGraph out;
  switch (spec.model) {
    case Model::kConfiguration: {
      const DegreeSequence degrees =
          spec.degrees ? *spec.degrees : power_law_degrees(*spec.power_law, derive_seed(spec.seed, "degrees", 0));
      out = gen_cm_simple(degrees, spec.seed, spec.max_retries);
      break;
    }
    case Model::kPreferentialAttachment:
      out = gen_pa(spec.m, spec.n, spec.seed);
      break;
    case Model::kMotifOverlay: {
      const auto ext = generate(spec.external.front());
      out = gen_motif_overlay(ext.graph, *spec.motifs, spec.seed);
      out.provenance.erased = ext.provenance.erased;
      out.provenance.attempts = ext.provenance.attempts;
      break;
    }
    case Model::kTwoBlock:
      out = gen_two_block(spec.d, spec.n, spec.seed);
      break;
    case Model::kRegular:
      out = gen_k_regular(spec.d, spec.n, spec.seed);
      break;
  }
  out.provenance.spec_hash = spec.hash();
  out.provenance.seed = spec.seed;
  return out;
}

}  // namespace outbreak
