#pragma once

#include <vector>

#include <torch/torch.h>

#include "tdnetgen/dataset.hpp"
#include "tdnetgen/graph.hpp"

namespace tdnetgen {

/// Graphs zero-padded to a common node count.
struct GraphBatch {
  torch::Tensor adj;   ///< [B, N, N], 0/1 entries, padded rows/cols zero
  torch::Tensor mask;  ///< [B, N], 1 for real nodes
  std::vector<int> n_nodes;
  int size() const { return static_cast<int>(n_nodes.size()); }
  int n_max() const { return static_cast<int>(adj.size(1)); }
};

GraphBatch make_graph_batch(const std::vector<netgen::Graph>& graphs,
                            torch::Dtype dtype = torch::kFloat32, int n_max = 0);

/// Observations stacked to [B, M, N, T] with padded nodes set to zero.
torch::Tensor make_obs_batch(const std::vector<const dataset::Observations*>& obs, int n_max,
                             torch::Dtype dtype = torch::kFloat32);

/// Hard 0/1 [N, N] adjacency of one graph back from a (padded) batch row.
netgen::Graph graph_from_adjacency(const torch::Tensor& adj, int n_nodes);

/// Outer product mask [B, N, N] of valid node pairs with the diagonal removed.
torch::Tensor pair_mask(const torch::Tensor& mask);

/// Seeded CPU generator for torch sampling routines.
at::Generator make_generator(std::uint64_t seed);

}  // namespace tdnetgen
