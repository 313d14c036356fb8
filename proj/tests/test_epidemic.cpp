#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "outbreak/epidemic.hpp"
#include "outbreak/generators.hpp"
#include "outbreak/oracle.hpp"
#include "outbreak/percolation.hpp"
#include "support.hpp"

using namespace outbreak;

namespace {

std::vector<Vertex> sorted(std::vector<Vertex> v) {
  std::sort(v.begin(), v.end());
  return v;
}

double total_variation(const std::map<std::size_t, double>& a, const std::map<std::size_t, double>& b) {
  std::map<std::size_t, double> diff = a;
  for (auto [k, v] : b) diff[k] -= v;
  double tv = 0.0;
  for (auto [k, v] : diff) tv += std::abs(v);
  return tv / 2.0;
}

}  // namespace

TEST_CASE("lambda_to_p") {
  CHECK(lambda_to_p(1.0) == 0.5);
  CHECK(lambda_to_p(0.0) == 0.0);
  CHECK(lambda_to_p(3.0) == 0.75);
  CHECK_THROWS_AS(lambda_to_p(-0.1), std::invalid_argument);
  const auto params = TransmissionParams::from_lambda(3.0);
  CHECK(params.p == 3.0 / 4.0);
  CHECK(*params.lambda == 3.0);
  CHECK_THROWS_AS(TransmissionParams::from_p(1.5), std::invalid_argument);
}

TEST_CASE("run_sir_with_mask equals the union of seed components, exhaustively") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (const auto& g : testing::all_labeled_graphs(n)) {
      const std::size_t m = g.num_edges();
      for (std::uint32_t bits = 0; bits < (1u << m); ++bits) {
        std::vector<bool> open(m);
        for (std::size_t e = 0; e < m; ++e) open[e] = bits >> e & 1;
        const EdgeMask mask{open, 0.5, 0, 0};
        const auto stats = components(g, mask);
        const auto a = testing::adjacency(g, open);
        for (std::uint32_t set = 1; set < (1u << n); ++set) {
          std::vector<Vertex> seeds;
          for (Vertex v = 0; v < n; ++v)
            if (set >> v & 1) seeds.push_back(v);
          const auto rec = run_sir_with_mask(g, seeds, mask);
          std::vector<Vertex> expected;
          for (Vertex v = 0; v < n; ++v) {
            bool hit = false;
            for (Vertex s : seeds) hit |= stats.labels[v] == stats.labels[s];
            if (hit) expected.push_back(v);
          }
          REQUIRE(sorted(rec.infected) == expected);
          const auto seen = testing::reach(a, seeds);
          REQUIRE(rec.final_size == static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true)));
        }
      }
    }
  }
}

TEST_CASE("run_sir generations are BFS layers") {
  const Graph g = testing::path(5);
  const std::vector<Vertex> seeds{2};
  const auto rec = run_sir_with_mask(g, seeds, EdgeMask::all_open(4));
  CHECK(rec.generation_sizes == std::vector<std::size_t>{1, 2, 2});
  CHECK(rec.infected.front() == 2);
  CHECK(rec.relative_size == 1.0);
  const auto closed = run_sir_with_mask(g, seeds, EdgeMask::all_closed(4));
  CHECK(closed.final_size == 1);
  const std::vector<Vertex> dup{1, 1, 3};
  CHECK(run_sir_with_mask(g, dup, EdgeMask::all_closed(4)).final_size == 2);
}

TEST_CASE("run_sir errors") {
  const Graph g = testing::path(3);
  const std::vector<Vertex> none;
  const std::vector<Vertex> one{0};
  CHECK_THROWS_AS(run_sir_with_mask(g, none, EdgeMask::all_open(2)), std::invalid_argument);
  CHECK_THROWS_AS(run_sir_with_mask(g, one, EdgeMask::all_open(3)), std::invalid_argument);
  CHECK_THROWS_AS(run_sir(g, none, TransmissionParams::from_p(0.5), 1), std::invalid_argument);
}

TEST_CASE("run_sir uses the percolation tape") {
  const Graph g = gen_k_regular(3, 500, 3).graph;
  const std::vector<Vertex> seeds{0, 17};
  for (std::uint64_t t = 0; t < 10; ++t) {
    const auto direct = run_sir(g, seeds, TransmissionParams::from_p(0.6), trial_stream(4, t));
    const auto masked = run_sir_with_mask(g, seeds, percolate(g, 0.6, 4, t));
    CHECK(direct.infected == masked.infected);
  }
  const auto rec0 = run_sir(g, seeds, TransmissionParams::from_p(0.0), 1);
  CHECK(rec0.final_size == 2);
  const auto rec1 = run_sir(g, std::vector<Vertex>{5}, TransmissionParams::from_p(1.0), 1);
  CHECK(rec1.final_size == components(g).size_of(5));
}

TEST_CASE("run_sir outbreak law matches enumeration") {
  for (const Graph& g : {testing::complete(3), testing::path(3)}) {
    const std::vector<Vertex> seeds{1};
    for (double p : {0.25, 0.5, 0.75}) {
      const auto exact = testing::brute_outbreak_law(g, {1}, p);
      std::map<std::size_t, double> mc;
      const int trials = 100000;
      for (int t = 0; t < trials; ++t) {
        mc[run_sir(g, seeds, TransmissionParams::from_p(p), trial_stream(31, t)).final_size] += 1.0 / trials;
      }
      CHECK(total_variation(exact, mc) < 0.01);
    }
  }
}

TEST_CASE("local query conventions") {
  const Graph k3 = testing::complete(3);
  const auto half = TransmissionParams::from_p(0.5);
  for (Seed s = 0; s < 50; ++s) {
    CHECK(local_query(k3, 0, 1, half, s));
    CHECK_FALSE(local_query(k3, 0, 2, TransmissionParams::from_p(0.0), s));
    CHECK_FALSE(local_query(k3, 0, 1, TransmissionParams::from_p(0.0), s, SuccessRule::kExcludeSeed));
  }
  int hits = 0;
  const int trials = 40000;
  for (int t = 0; t < trials; ++t) hits += local_query(k3, 0, 3, half, trial_stream(2, t));
  CHECK(double(hits) / trials == doctest::Approx(0.5).epsilon(0.03));
  CHECK_THROWS_AS(local_query(k3, 0, 0, half, 1), std::invalid_argument);
}

TEST_CASE("ball containment: a size-k cluster is visible inside the k-ball") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 200; ++round) {
    const std::size_t n = 5 + round % 40;
    const Graph g = testing::random_graph(n, 3.0 / double(n), rng);
    const auto params = TransmissionParams::from_p(0.7);
    const Seed stream = trial_stream(6, round);
    const auto mask = percolate(g, 0.7, 6, round);
    const auto stats = components(g, mask);
    for (Vertex v = 0; v < n; v += 3) {
      for (std::uint32_t k = 1; k <= 6; ++k) {
        const bool global = stats.size_of(v) >= k;
        CHECK(local_query(g, v, k, params, stream) == global);
      }
    }
  }
}

TEST_CASE("estimator is nonincreasing in k on a shared tape") {
  const Graph g = gen_k_regular(3, 3000, 5).graph;
  const auto params = TransmissionParams::from_p(0.6);
  double previous = 1.0;
  for (std::uint32_t k : {1u, 2u, 4u, 8u, 16u, 32u}) {
    const auto r = estimate(g, k, 400, params, 77);
    CHECK(r.n_tilde <= previous);
    CHECK(r.n_tilde == double(r.successes) / 400.0);
    previous = r.n_tilde;
  }
}

TEST_CASE("estimate basics and determinism") {
  const Graph g = gen_k_regular(3, 2000, 6).graph;
  const auto full = estimate(g, 10, 300, TransmissionParams::from_p(1.0), 1);
  CHECK(full.n_tilde == 1.0);
  CHECK(full.halfwidth == 0.0);
  REQUIRE(full.overlap_fraction.has_value());
  const auto params = TransmissionParams::from_p(0.7);
  const auto a = estimate(g, 20, 500, params, 9, {1});
  const auto b = estimate(g, 20, 500, params, 9, {4});
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(std::abs(a.n_tilde - 0.92128) < 0.06);
  CHECK_THROWS_AS(estimate(g, 0, 10, params, 1), std::invalid_argument);
  CHECK_THROWS_AS(estimate(g, 5, 0, params, 1), std::invalid_argument);
  // small balls on a large sparse graph rarely meet
  const auto sparse = estimate(g, 2, 50, params, 3);
  CHECK(*sparse.overlap_fraction < 0.05);
}

TEST_CASE("overlap fraction matches pairwise distances") {
  std::mt19937_64 rng(12);
  const Graph g = testing::random_graph(30, 0.08, rng);
  const auto ap = testing::all_pairs(g);
  const std::size_t q = 25;
  const std::uint32_t k = 2;
  const auto r = estimate(g, k, q, TransmissionParams::from_p(0.5), 41);
  std::vector<Vertex> starts;
  for (std::size_t i = 0; i < q; ++i) starts.push_back(static_cast<Vertex>(Rng(trial_stream(41, i)).below(30)));
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = i + 1; j < q; ++j) {
      const int d = ap[starts[i]][starts[j]];
      pairs += d >= 0 && d <= static_cast<int>(2 * k);
    }
  CHECK(*r.overlap_fraction == doctest::Approx(double(pairs) / (q * (q - 1) / 2.0)));
}

TEST_CASE("degree-biased seeding") {
  const Graph reg = gen_k_regular(3, 1000, 2).graph;
  const auto params = TransmissionParams::from_p(0.6);
  const auto uni = estimate(reg, 12, 300, params, 5);
  const auto biased = estimate_degree_biased(reg, 12, 300, params, 5);
  CHECK(biased.acceptance_rate.value() == 1.0);
  CHECK(uni.n_tilde == biased.n_tilde);
  CHECK(biased.seeding == "degree_biased");

  // Star: the center carries half the degree mass.
  const Graph s = testing::star(200);
  const auto low = TransmissionParams::from_p(0.05);
  const auto u = estimate(s, 2, 4000, low, 8);
  const auto b = estimate_degree_biased(s, 2, 4000, low, 8);
  CHECK(b.n_tilde > u.n_tilde + 0.1);
  // acceptance rate = mean degree / max degree
  const double expected = (2.0 * 199 / 200) / 199.0;
  CHECK(*b.acceptance_rate == doctest::Approx(expected).epsilon(0.15));
}

TEST_CASE("adaptive estimate") {
  const Graph g = gen_k_regular(3, 2000, 7).graph;
  const auto full = adaptive_estimate(g, 0.1, TransmissionParams::from_p(1.0), 3);
  CHECK(full.report.n_tilde == 1.0);
  CHECK(full.stages.size() == 2);
  CHECK(full.report.q == 800);
  CHECK_FALSE(full.best_effort);
  const auto sub = adaptive_estimate(g, 0.1, TransmissionParams::from_p(0.3), 3);
  CHECK(sub.report.n_tilde <= 0.02);
  CHECK_THROWS_AS(adaptive_estimate(g, 0.0, TransmissionParams::from_p(0.5), 1), std::invalid_argument);
  // Tiny path: stages run past the diameter bound.
  const auto tiny = adaptive_estimate(testing::path(4), 0.5, TransmissionParams::from_p(0.5), 1);
  CHECK(tiny.best_effort);
}

TEST_CASE("outbreak histogram") {
  const Graph g = gen_k_regular(3, 500, 4).graph;
  const auto zero = outbreak_histogram(g, 50, TransmissionParams::from_p(0.0), 1);
  for (const auto& t : zero.trials) CHECK(t.final_size == 1);
  CHECK(zero.low_mass == 1.0);
  CHECK(zero.bin_counts[0] == 50);

  HistogramOptions opts;
  opts.zeta_ref = 0.92;
  opts.threads = 1;
  const auto a = outbreak_histogram(g, 200, TransmissionParams::from_p(0.7), 9, opts);
  opts.threads = 3;
  const auto b = outbreak_histogram(g, 200, TransmissionParams::from_p(0.7), 9, opts);
  std::ostringstream ca, cb;
  write_outbreak_csv(ca, a);
  write_outbreak_csv(cb, b);
  CHECK(ca.str() == cb.str());
  CHECK(ca.str().rfind("trial,seed,final_size,relative_size\n", 0) == 0);
  CHECK(a.low_mass + a.middle_mass + a.upper_mass == doctest::Approx(1.0));
  CHECK(a.mass_in(0.0, 1.0) == 1.0);
  for (std::size_t t = 0; t < a.trials.size(); ++t) {
    const auto& tr = a.trials[t];
    const auto rec = run_sir(g, std::vector<Vertex>{tr.seed}, TransmissionParams::from_p(0.7), trial_stream(9, t));
    CHECK(rec.final_size == tr.final_size);
  }
  CHECK(a.summary_json().at("zeta_ref_source") == "given");
}
