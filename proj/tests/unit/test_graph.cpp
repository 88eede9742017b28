#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

#include "tdnetgen/error.hpp"
#include "tdnetgen/graph.hpp"
#include "tdnetgen/random.hpp"

using namespace tdnetgen;
using namespace tdnetgen::netgen;

namespace {

bool satisfies_invariants(const Graph& g) {
  const int n = g.n_nodes();
  const auto& a = g.adjacency();
  for (int i = 0; i < n; ++i) {
    if (a[i * n + i] != 0) return false;
    for (int j = 0; j < n; ++j) {
      if (a[i * n + j] > 1) return false;
      if (a[i * n + j] != a[j * n + i]) return false;
    }
  }
  return true;
}

bool connected(const Graph& g) {
  std::vector<bool> seen(g.n_nodes(), false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : g.neighbors(u))
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == g.n_nodes();
}

TopologySpec fixed_er(int n, double p) {
  TopologySpec s;
  s.family = TopologyFamily::ER;
  s.n_nodes = {n, n};
  s.er_p = {p, p};
  return s;
}

}  // namespace

TEST_CASE("adjacency validation rejects broken matrices") {
  CHECK_THROWS_AS(Graph::from_adjacency(2, {0, 1, 0, 0}), DomainError);
  CHECK_THROWS_AS(Graph::from_adjacency(2, {1, 0, 0, 0}), DomainError);
  CHECK_THROWS_AS(Graph::from_adjacency(2, {0, 2, 2, 0}), DomainError);
  const Graph g = Graph::from_adjacency(2, {0, 1, 1, 0});
  CHECK(g.n_edges() == 1);
}

TEST_CASE("invalid specs raise the documented errors") {
  TopologySpec s = fixed_er(1, 0.1);
  CHECK_THROWS_AS(generate_topology(s, 1), DomainError);
  s = fixed_er(10, 1.5);
  CHECK_THROWS_AS(generate_topology(s, 1), ConfigError);
  CHECK_THROWS_AS(topology_family_from_string("WS"), ConfigError);
}

TEST_CASE("every family yields valid and deterministic graphs") {
  for (auto fam : {TopologyFamily::ER, TopologyFamily::BA, TopologyFamily::S1, TopologyFamily::SBM,
                   TopologyFamily::MODULAR_PERTURBED}) {
    TopologySpec s;
    s.family = fam;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Graph a = generate_topology(s, seed);
      const Graph b = generate_topology(s, seed);
      CHECK(satisfies_invariants(a));
      CHECK(a == b);
    }
  }
}

TEST_CASE("ER with p = 0 is edgeless") {
  for (std::uint64_t seed = 0; seed < 10; ++seed)
    CHECK(generate_topology(fixed_er(30, 0.0), seed).n_edges() == 0);
}

TEST_CASE("ER edge counts follow the uniform-p binomial expectation") {
  TopologySpec s;  // defaults: N in [20, 52], p in [0, 0.15]
  const int samples = 3000;
  std::vector<double> ordered;
  for (int k = 0; k < samples; ++k)
    ordered.push_back(2.0 * static_cast<double>(generate_topology(s, 1000 + k).n_edges()));
  const double m = std::accumulate(ordered.begin(), ordered.end(), 0.0) / samples;
  double var = 0.0;
  for (double x : ordered) var += (x - m) * (x - m);
  const double se = std::sqrt(var / (samples - 1) / samples);

  // E[#ordered pairs] = E[p] * E[N (N - 1)] with N, p independent and uniform.
  double e_pairs = 0.0;
  for (int n = s.n_nodes.lo; n <= s.n_nodes.hi; ++n) e_pairs += n * (n - 1.0);
  e_pairs /= s.n_nodes.hi - s.n_nodes.lo + 1;
  const double expected = 0.5 * (s.er_p.lo + s.er_p.hi) * e_pairs;
  CHECK(std::abs(m - expected) < 3.0 * se);
  // Published average edge count of the ER mutualistic dataset.
  CHECK(std::abs(m - 99.0) / 99.0 < 0.10);
}

TEST_CASE("BA growth adds exactly m edges per new node and stays connected") {
  TopologySpec s;
  s.family = TopologyFamily::BA;
  s.n_nodes = {10, 10};
  s.ba_m = 4;
  const int seed_clique_edges = s.ba_m * (s.ba_m - 1) / 2;
  const int expected = seed_clique_edges + (10 - s.ba_m) * s.ba_m;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_topology(s, seed);
    std::size_t counted = 0;
    for (int i = 0; i < g.n_nodes(); ++i)
      for (int j = i + 1; j < g.n_nodes(); ++j) counted += g.has_edge(i, j);
    CHECK(counted == static_cast<std::size_t>(expected));
    CHECK(connected(g));
    for (int v = s.ba_m; v < 10; ++v) {
      int older = 0;
      for (int u = 0; u < v; ++u) older += g.has_edge(u, v);
      CHECK(older == s.ba_m);
    }
  }
}

TEST_CASE("degree statistics") {
  const Graph cycle = Graph::from_edges(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  auto st = degree_stats(cycle);
  CHECK(st.degrees == std::vector<int>{2, 2, 2, 2});
  CHECK(st.mean_degree == doctest::Approx(2.0));
  CHECK(st.density == doctest::Approx(2.0 / 3.0));

  st = degree_stats(Graph(5));
  CHECK(st.mean_degree == 0.0);
  CHECK(st.density == 0.0);
  CHECK(std::all_of(st.degrees.begin(), st.degrees.end(), [](int d) { return d == 0; }));

  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed)
    total += degree_stats(generate_topology(fixed_er(50, 0.1), seed)).mean_degree;
  // Mean degree 2|E|/N with |E| ~ Bin(1225, 0.1): sd per graph 2 sqrt(110.25) / 50.
  const double sd_of_mean = 2.0 * std::sqrt(1225 * 0.1 * 0.9) / 50.0 / 10.0;
  CHECK(std::abs(total / 100.0 - 0.1 * 49) < 3.0 * sd_of_mean);
}

TEST_CASE("S1 mean degree tracks the target") {
  TopologySpec s;
  s.family = TopologyFamily::S1;
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) total += degree_stats(generate_topology(s, seed)).mean_degree;
  CHECK(std::abs(total / 200.0 - s.s1_mean_degree) / s.s1_mean_degree < 0.15);
}

TEST_CASE("SBM block probabilities are used as configured") {
  TopologySpec s;
  s.family = TopologyFamily::SBM;
  s.n_nodes = {40, 40};
  s.sbm_communities = {1, 1};
  double density = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) density += degree_stats(generate_topology(s, seed)).density;
  // A single community only ever uses the intra-community probability.
  CHECK(density / 50.0 == doctest::Approx(s.sbm_p_intra).epsilon(0.15));
}

TEST_CASE("modular perturbation removes a fraction of the base nodes") {
  TopologySpec s;
  s.family = TopologyFamily::MODULAR_PERTURBED;
  const int base = modular_base_graph(s).n_nodes();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Graph g = generate_topology(s, seed);
    const double removed = 1.0 - static_cast<double>(g.n_nodes()) / base;
    CHECK(removed >= s.modular_removal.lo - 1.0 / base);
    CHECK(removed <= s.modular_removal.hi + 1.0 / base);
  }
}

TEST_CASE("edge list round trip and parse errors") {
  const Graph g = generate_topology(fixed_er(15, 0.3), 3);
  std::stringstream ss;
  write_edge_list(ss, g);
  CHECK(read_edge_list(ss) == g);

  std::stringstream bad("N=3\n0 7\n");
  CHECK_THROWS_AS(read_edge_list(bad), IoError);
  std::stringstream no_header("0 1\n");
  CHECK_THROWS_AS(read_edge_list(no_header), IoError);
}

TEST_CASE("permutation relabels the adjacency") {
  const Graph g = Graph::from_edges(4, {{0, 1}, {1, 2}});
  const Graph p = g.permuted({2, 1, 0, 3});
  CHECK(p.has_edge(0, 1));
  CHECK(p.has_edge(1, 2));
  CHECK(!p.has_edge(0, 2));
  const Graph h = Graph::from_edges(4, {{0, 3}});
  CHECK(h.permuted({3, 0, 1, 2}).has_edge(0, 1));
}
