#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tdnetgen::netgen {

/// Undirected simple graph stored as a dense binary adjacency matrix.
///
/// The adjacency is kept symmetric and hollow by every mutator, so a Graph
/// value always satisfies the topology invariants used across the pipeline.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n_nodes);

  /// Builds from a row-major N*N 0/1 matrix; throws DomainError when the
  /// matrix is not symmetric, not hollow or not binary.
  static Graph from_adjacency(int n_nodes, const std::vector<std::uint8_t>& adjacency);
  static Graph from_edges(int n_nodes, const std::vector<std::pair<int, int>>& edges);

  int n_nodes() const noexcept { return n_; }
  bool has_edge(int i, int j) const { return adj_[index(i, j)] != 0; }
  void add_edge(int i, int j);
  void remove_edge(int i, int j);

  std::size_t n_edges() const;
  int degree(int i) const;
  std::vector<int> degrees() const;
  std::vector<int> neighbors(int i) const;
  /// Upper-triangle edge list, sorted by (u, v).
  std::vector<std::pair<int, int>> edges() const;
  const std::vector<std::uint8_t>& adjacency() const noexcept { return adj_; }

  /// Subgraph induced by `keep` (node order preserved).
  Graph induced_subgraph(const std::vector<int>& keep) const;
  /// Graph with node i of the result equal to node perm[i] of this graph.
  Graph permuted(const std::vector<int>& perm) const;

  bool operator==(const Graph& other) const = default;

 private:
  std::size_t index(int i, int j) const;

  int n_ = 0;
  std::vector<std::uint8_t> adj_;
};

enum class TopologyFamily { ER, BA, S1, SBM, MODULAR_PERTURBED };

std::string_view to_string(TopologyFamily family);
/// Throws ConfigError for unknown names.
TopologyFamily topology_family_from_string(std::string_view name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Range&) const = default;
};

struct IntRange {
  int lo = 0;
  int hi = 0;
  bool operator==(const IntRange&) const = default;
};

/// Parameters of the five topology families. Only the fields of the selected
/// family are read.
struct TopologySpec {
  TopologyFamily family = TopologyFamily::ER;
  IntRange n_nodes{20, 52};

  // ER: edge probability drawn uniformly per sample.
  Range er_p{0.0, 0.15};

  // BA: attachment count; the seed graph is the complete graph on m nodes.
  int ba_m = 4;

  // S1/H2: inverse temperature, degree exponent, target mean degree.
  double s1_beta = 1.5;
  double s1_gamma = 2.7;
  double s1_mean_degree = 5.0;

  // SBM: community count range and the two block probabilities. The defaults
  // keep the values as published (inter 0.3, intra 0.05).
  IntRange sbm_communities{2, 5};
  double sbm_p_intra = 0.05;
  double sbm_p_inter = 0.3;

  // Modular base graph standing in for an empirical connectome: two dense
  // hemispheres joined by sparse cross links, then randomly thinned.
  int modular_base_nodes = 200;
  double modular_p_in = 0.08;
  double modular_p_out = 0.004;
  std::uint64_t modular_base_seed = 998;
  Range modular_removal{0.0, 0.15};

  /// Throws ConfigError on out-of-range parameters.
  void validate() const;
  bool operator==(const TopologySpec&) const = default;
};

/// Draws one topology. All randomness derives from `seed`.
Graph generate_topology(const TopologySpec& spec, std::uint64_t seed);

/// The shared base graph of the MODULAR_PERTURBED family.
Graph modular_base_graph(const TopologySpec& spec);

struct DegreeStats {
  std::vector<int> degrees;
  double mean_degree = 0.0;
  double density = 0.0;
};

DegreeStats degree_stats(const Graph& g);

/// Edge-list text format: first line `N=<n>`, then one `u v` pair per line
/// (0-indexed, u < v).
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is);

}  // namespace tdnetgen::netgen
