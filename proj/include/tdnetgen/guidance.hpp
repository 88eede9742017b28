#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "tdnetgen/diffusion.hpp"
#include "tdnetgen/dynlearn.hpp"
#include "tdnetgen/predictor.hpp"

namespace tdnetgen::guidance {

using dynsim::Resilience;
using netgen::Graph;

struct GuidanceConfig {
  double lambda = 2000.0;
  /// Gradients are recomputed every `stride` reverse steps and reused between.
  int stride = 1;
  /// Differentiate through the learned rollout as well; otherwise the
  /// trajectories of the hardened graph are a constant input.
  bool through_dynamics = false;
  void validate() const;
};

/// Learned-dynamics settings for trajectories of intermediate graphs.
struct TrajectorySource {
  dynlearn::DynamicsNet* dynamics = nullptr;
  std::vector<dynsim::InitRule> rules;
  dynsim::SimConfig sim;
  int t_obs = 6;
};

/// Gradient of the summed per-graph BCE(f(A, X), y) with respect to the
/// relaxed expanded adjacency, [B, N, N, 2]. Only the edge channel feeds the
/// predictor, so the no-edge channel is zero. X is simulated by the learned
/// dynamics on `adj`; it is a constant unless `through_dynamics` is set.
torch::Tensor guidance_gradient(predictor::Predictor& model, const TrajectorySource& source, const torch::Tensor& adj,
                                const torch::Tensor& mask, const torch::Tensor& target, std::uint64_t seed,
                                bool through_dynamics = false);

/// Same gradient with caller-supplied observations [B, M, N, T].
torch::Tensor guidance_gradient_with(predictor::Predictor& model, const torch::Tensor& adj, const torch::Tensor& mask,
                                     const torch::Tensor& obs, const torch::Tensor& target);

/// Per-pair gradient of an undirected edge state: grad_ij + grad_ji.
torch::Tensor pair_gradient(const torch::Tensor& grad);

/// Rows p(e) * exp(-lambda * grad(e)), renormalized in log space. base and
/// grad are [..., 2].
torch::Tensor guided_posterior(const torch::Tensor& base, const torch::Tensor& grad, double lambda);

struct GuidedSample {
  Graph graph;
  Resilience intended;
};

/// Reverse diffusion tilted toward `target` at every step.
std::vector<GuidedSample> sample_conditional(const diffusion::EdgePredictor& denoiser,
                                             const diffusion::NoiseSchedule& schedule, predictor::Predictor& model,
                                             const TrajectorySource& source, const std::vector<int>& n_nodes,
                                             Resilience target, const GuidanceConfig& cfg, std::uint64_t seed);

}  // namespace tdnetgen::guidance
