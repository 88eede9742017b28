#include "tdnetgen/batch.hpp"

#include <ATen/CPUGeneratorImpl.h>

#include "tdnetgen/error.hpp"

namespace tdnetgen {

GraphBatch make_graph_batch(const std::vector<netgen::Graph>& graphs, torch::Dtype dtype, int n_max) {
  if (graphs.empty()) throw DomainError("make_graph_batch: empty batch");
  for (const auto& g : graphs) n_max = std::max(n_max, g.n_nodes());
  const auto b = static_cast<std::int64_t>(graphs.size());
  auto adj = torch::zeros({b, n_max, n_max}, torch::kFloat64);
  auto mask = torch::zeros({b, n_max}, torch::kFloat64);
  auto a = adj.accessor<double, 3>();
  auto m = mask.accessor<double, 2>();
  GraphBatch out;
  for (std::int64_t k = 0; k < b; ++k) {
    const auto& g = graphs[k];
    const int n = g.n_nodes();
    out.n_nodes.push_back(n);
    for (int i = 0; i < n; ++i) {
      m[k][i] = 1.0;
      for (int j = 0; j < n; ++j) a[k][i][j] = g.has_edge(i, j) ? 1.0 : 0.0;
    }
  }
  out.adj = adj.to(dtype);
  out.mask = mask.to(dtype);
  return out;
}

torch::Tensor make_obs_batch(const std::vector<const dataset::Observations*>& obs, int n_max,
                             torch::Dtype dtype) {
  if (obs.empty()) throw DomainError("make_obs_batch: empty batch");
  const int m_traj = obs.front()->n_traj;
  const int t_len = obs.front()->n_time;
  auto out = torch::zeros({static_cast<std::int64_t>(obs.size()), m_traj, n_max, t_len}, torch::kFloat32);
  auto acc = out.accessor<float, 4>();
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const auto& o = *obs[k];
    if (o.n_traj != m_traj || o.n_time != t_len)
      throw DomainError("make_obs_batch: observation shapes differ within a batch");
    if (o.n_nodes > n_max) throw DomainError("make_obs_batch: node count exceeds padding");
    for (int mm = 0; mm < m_traj; ++mm)
      for (int i = 0; i < o.n_nodes; ++i)
        for (int t = 0; t < t_len; ++t) acc[k][mm][i][t] = o.at(mm, i, t);
  }
  return out.to(dtype);
}

netgen::Graph graph_from_adjacency(const torch::Tensor& adj, int n_nodes) {
  auto a = adj.detach().to(torch::kFloat64).contiguous();
  auto acc = a.accessor<double, 2>();
  netgen::Graph g(n_nodes);
  for (int i = 0; i < n_nodes; ++i)
    for (int j = i + 1; j < n_nodes; ++j)
      if (acc[i][j] > 0.5) g.add_edge(i, j);
  return g;
}

torch::Tensor pair_mask(const torch::Tensor& mask) {
  const auto n = mask.size(1);
  auto pm = mask.unsqueeze(2) * mask.unsqueeze(1);
  return pm * (1 - torch::eye(n, mask.options())).unsqueeze(0);
}

at::Generator make_generator(std::uint64_t seed) {
  return at::make_generator<at::CPUGeneratorImpl>(seed);
}

}  // namespace tdnetgen
