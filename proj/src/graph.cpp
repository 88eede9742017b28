#include "tdnetgen/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "tdnetgen/error.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::netgen {

// =============================================================================
// Graph
// =============================================================================

Graph::Graph(int n_nodes) : n_(n_nodes) {
  if (n_nodes < 0) throw DomainError("Graph: negative node count");
  adj_.assign(static_cast<std::size_t>(n_nodes) * n_nodes, 0);
}

Graph Graph::from_adjacency(int n_nodes, const std::vector<std::uint8_t>& adjacency) {
  if (adjacency.size() != static_cast<std::size_t>(n_nodes) * n_nodes)
    throw DomainError("Graph: adjacency size does not match node count");
  Graph g(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j) {
      const auto a = adjacency[static_cast<std::size_t>(i) * n_nodes + j];
      const auto b = adjacency[static_cast<std::size_t>(j) * n_nodes + i];
      if (a > 1) throw DomainError("Graph: adjacency entries must be 0 or 1");
      if (a != b) throw DomainError("Graph: adjacency is not symmetric");
      if (i == j && a != 0) throw DomainError("Graph: self-loop on node " + std::to_string(i));
    }
  }
  g.adj_ = adjacency;
  return g;
}

Graph Graph::from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges) {
  Graph g(n_nodes);
  for (auto [u, v] : edges) g.add_edge(u, v);
  return g;
}

std::size_t Graph::index(int i, int j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_)
    throw DomainError("Graph: node index out of range");
  return static_cast<std::size_t>(i) * n_ + j;
}

void Graph::add_edge(int i, int j) {
  if (i == j) throw DomainError("Graph: self-loops are not allowed");
  adj_[index(i, j)] = 1;
  adj_[index(j, i)] = 1;
}

void Graph::remove_edge(int i, int j) {
  adj_[index(i, j)] = 0;
  adj_[index(j, i)] = 0;
}

std::size_t Graph::n_edges() const {
  return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1})) / 2;
}

int Graph::degree(int i) const {
  int d = 0;
  for (int j = 0; j < n_; ++j) d += adj_[index(i, j)];
  return d;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> d(n_);
  for (int i = 0; i < n_; ++i) d[i] = degree(i);
  return d;
}

std::vector<int> Graph::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j)
    if (adj_[index(i, j)]) out.push_back(j);
  return out;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (adj_[index(i, j)]) out.emplace_back(i, j);
  return out;
}

Graph Graph::induced_subgraph(const std::vector<int>& keep) const {
  Graph sub(static_cast<int>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = a + 1; b < keep.size(); ++b)
      if (has_edge(keep[a], keep[b])) sub.add_edge(static_cast<int>(a), static_cast<int>(b));
  return sub;
}

Graph Graph::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw DomainError("Graph: permutation size mismatch");
  Graph out(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out.adj_[out.index(i, j)] = adj_[index(perm[i], perm[j])];
  return out;
}

// =============================================================================
// Topology specs
// =============================================================================

std::string_view to_string(TopologyFamily family) {
  switch (family) {
    case TopologyFamily::ER: return "ER";
    case TopologyFamily::BA: return "BA";
    case TopologyFamily::S1: return "S1";
    case TopologyFamily::SBM: return "SBM";
    case TopologyFamily::MODULAR_PERTURBED: return "MODULAR_PERTURBED";
  }
  return "?";
}

TopologyFamily topology_family_from_string(std::string_view name) {
  for (auto f : {TopologyFamily::ER, TopologyFamily::BA, TopologyFamily::S1, TopologyFamily::SBM,
                 TopologyFamily::MODULAR_PERTURBED})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown topology family '" + std::string(name) + "'");
}

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

void check_probability_range(const Range& r, const char* what) {
  if (!is_probability(r.lo) || !is_probability(r.hi) || r.lo > r.hi)
    throw ConfigError(std::string(what) + ": probability range must satisfy 0 <= lo <= hi <= 1");
}

}  // namespace

void TopologySpec::validate() const {
  if (n_nodes.lo > n_nodes.hi) throw ConfigError("topology: n_nodes range is empty");
  if (family != TopologyFamily::MODULAR_PERTURBED && n_nodes.lo < 2)
    throw DomainError("topology: graphs need at least 2 nodes");
  switch (family) {
    case TopologyFamily::ER:
      check_probability_range(er_p, "ER");
      break;
    case TopologyFamily::BA:
      if (ba_m < 1) throw ConfigError("BA: m must be >= 1");
      if (n_nodes.lo < ba_m) throw ConfigError("BA: node count must be >= m");
      break;
    case TopologyFamily::S1:
      if (s1_beta <= 1.0) throw ConfigError("S1: beta must exceed 1");
      if (s1_gamma <= 2.0) throw ConfigError("S1: gamma must exceed 2");
      if (s1_mean_degree <= 0.0 || s1_mean_degree >= n_nodes.lo - 1)
        throw ConfigError("S1: mean degree must lie in (0, N-1)");
      break;
    case TopologyFamily::SBM:
      if (sbm_communities.lo < 1 || sbm_communities.lo > sbm_communities.hi)
        throw ConfigError("SBM: community range invalid");
      if (!is_probability(sbm_p_intra) || !is_probability(sbm_p_inter))
        throw ConfigError("SBM: probabilities must lie in [0, 1]");
      break;
    case TopologyFamily::MODULAR_PERTURBED:
      if (modular_base_nodes < 4) throw DomainError("modular: base graph needs at least 4 nodes");
      if (!is_probability(modular_p_in) || !is_probability(modular_p_out))
        throw ConfigError("modular: probabilities must lie in [0, 1]");
      if (modular_removal.lo < 0.0 || modular_removal.hi >= 1.0 ||
          modular_removal.lo > modular_removal.hi)
        throw ConfigError("modular: removal fraction range must lie in [0, 1)");
      break;
  }
}

// =============================================================================
// Generators
// =============================================================================

namespace {

Graph erdos_renyi(int n, double p, Rng& rng) {
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (uniform01(rng) < p) g.add_edge(i, j);
  return g;
}

Graph barabasi_albert(int n, int m, Rng& rng) {
  Graph g(n);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) g.add_edge(i, j);
  std::vector<double> deg(n, 0.0);
  for (int i = 0; i < m; ++i) deg[i] = m - 1;

  for (int v = m; v < n; ++v) {
    std::vector<int> targets;
    const double total = std::accumulate(deg.begin(), deg.begin() + v, 0.0);
    while (static_cast<int>(targets.size()) < m) {
      int pick;
      if (total <= 0.0) {
        pick = uniform_int(rng, 0, v - 1);
      } else {
        std::discrete_distribution<int> dist(deg.begin(), deg.begin() + v);
        pick = dist(rng);
      }
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) targets.push_back(pick);
    }
    for (int t : targets) {
      g.add_edge(v, t);
      deg[t] += 1.0;
    }
    deg[v] = m;
  }
  return g;
}

Graph hyperbolic_s1(int n, double beta, double gamma, double mean_degree, Rng& rng) {
  const double alpha = (gamma - 1.0) / 2.0;
  std::vector<double> offset(n), theta(n);
  for (int i = 0; i < n; ++i) {
    // Radial density ~ exp(alpha * r) on (-inf, R]: r = R + log(u) / alpha.
    const double u = 1.0 - uniform01(rng);
    offset[i] = std::log(u) / alpha;
    theta[i] = 2.0 * std::numbers::pi * uniform01(rng);
  }
  std::vector<double> log_sin;
  log_sin.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double dt = std::numbers::pi - std::abs(std::numbers::pi - std::abs(theta[i] - theta[j]));
      log_sin.push_back(2.0 * std::log(std::sin(dt / 2.0)));
    }
  }
  // d_ij - R = R + offset_i + offset_j + 2 log sin(theta_ij / 2) is increasing in R.
  auto connect_prob = [&](double radius, int i, int j, std::size_t k) {
    const double excess = radius + offset[i] + offset[j] + log_sin[k];
    return 1.0 / (1.0 + std::exp(beta * excess / 2.0));
  };
  auto expected_mean_degree = [&](double radius) {
    double s = 0.0;
    std::size_t k = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) s += connect_prob(radius, i, j, k++);
    return 2.0 * s / n;
  };
  double lo = -200.0, hi = 200.0;
  for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (expected_mean_degree(mid) > mean_degree) lo = mid;
    else hi = mid;
  }
  const double radius = 0.5 * (lo + hi);

  Graph g(n);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++k)
      if (uniform01(rng) < connect_prob(radius, i, j, k)) g.add_edge(i, j);
  return g;
}

Graph stochastic_block(int n, int communities, double p_intra, double p_inter, Rng& rng) {
  std::vector<int> block(n);
  for (int i = 0; i < n; ++i) block[i] = uniform_int(rng, 0, communities - 1);
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double p = block[i] == block[j] ? p_intra : p_inter;
      if (uniform01(rng) < p) g.add_edge(i, j);
    }
  return g;
}

}  // namespace

Graph modular_base_graph(const TopologySpec& spec) {
  Rng rng(derive_seed(spec.modular_base_seed, 0x6d6f64));
  const int n = spec.modular_base_nodes;
  Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const bool same_side = (i < n / 2) == (j < n / 2);
      if (uniform01(rng) < (same_side ? spec.modular_p_in : spec.modular_p_out)) g.add_edge(i, j);
    }
  return g;
}

Graph generate_topology(const TopologySpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(derive_seed(seed, 0x746f706f));
  switch (spec.family) {
    case TopologyFamily::ER: {
      const int n = uniform_int(rng, spec.n_nodes.lo, spec.n_nodes.hi);
      const double p = spec.er_p.lo + (spec.er_p.hi - spec.er_p.lo) * uniform01(rng);
      return erdos_renyi(n, p, rng);
    }
    case TopologyFamily::BA: {
      const int n = uniform_int(rng, spec.n_nodes.lo, spec.n_nodes.hi);
      return barabasi_albert(n, spec.ba_m, rng);
    }
    case TopologyFamily::S1: {
      const int n = uniform_int(rng, spec.n_nodes.lo, spec.n_nodes.hi);
      return hyperbolic_s1(n, spec.s1_beta, spec.s1_gamma, spec.s1_mean_degree, rng);
    }
    case TopologyFamily::SBM: {
      const int n = uniform_int(rng, spec.n_nodes.lo, spec.n_nodes.hi);
      const int k = uniform_int(rng, spec.sbm_communities.lo, spec.sbm_communities.hi);
      return stochastic_block(n, k, spec.sbm_p_intra, spec.sbm_p_inter, rng);
    }
    case TopologyFamily::MODULAR_PERTURBED: {
      const Graph base = modular_base_graph(spec);
      const double frac = spec.modular_removal.lo +
                          (spec.modular_removal.hi - spec.modular_removal.lo) * uniform01(rng);
      std::vector<int> order(base.n_nodes());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      const int n_remove = static_cast<int>(std::lround(frac * base.n_nodes()));
      std::vector<int> keep(order.begin() + n_remove, order.end());
      std::sort(keep.begin(), keep.end());
      if (keep.size() < 2) throw DomainError("modular: removal left fewer than 2 nodes");
      return base.induced_subgraph(keep);
    }
  }
  throw ConfigError("generate_topology: unknown family");
}

DegreeStats degree_stats(const Graph& g) {
  DegreeStats out;
  out.degrees = g.degrees();
  const int n = g.n_nodes();
  const double m = static_cast<double>(g.n_edges());
  out.mean_degree = n > 0 ? 2.0 * m / n : 0.0;
  out.density = n > 1 ? 2.0 * m / (static_cast<double>(n) * (n - 1)) : 0.0;
  return out;
}

// =============================================================================
// Edge-list text format
// =============================================================================

void write_edge_list(std::ostream& os, const Graph& g) {
  os << "N=" << g.n_nodes() << '\n';
  for (auto [u, v] : g.edges()) os << u << ' ' << v << '\n';
}

Graph read_edge_list(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("N=", 0) != 0)
    throw IoError("edge list: missing 'N=<n>' header");
  int n = 0;
  try {
    n = std::stoi(header.substr(2));
  } catch (const std::exception&) {
    throw IoError("edge list: malformed header '" + header + "'");
  }
  if (n < 0) throw IoError("edge list: negative node count");
  Graph g(n);
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    int u = -1, v = -1;
    if (!(ls >> u >> v) || u < 0 || v < 0 || u >= n || v >= n || u == v)
      throw IoError("edge list: bad edge on line " + std::to_string(lineno));
    g.add_edge(u, v);
  }
  return g;
}

}  // namespace tdnetgen::netgen
