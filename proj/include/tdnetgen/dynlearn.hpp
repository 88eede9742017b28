#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "tdnetgen/batch.hpp"
#include "tdnetgen/dataset.hpp"
#include "tdnetgen/dynamics.hpp"

namespace tdnetgen::dynlearn {

using dataset::NetworkSample;
using dataset::Observations;
using netgen::Graph;

struct DynLearnConfig {
  int d_hidden = 32;
  int gnn_layers = 2;
};

/// Learned vector field dx/dt = f_d(GNN(A, f_e(x))). The encoder runs at every
/// evaluation point; integration happens in state space.
class DynamicsNetImpl : public torch::nn::Module {
 public:
  explicit DynamicsNetImpl(const DynLearnConfig& cfg);

  /// x: [B, N] states, adj: [B, N, N], mask: [B, N]. Returns [B, N].
  torch::Tensor derivative(const torch::Tensor& x, const torch::Tensor& adj, const torch::Tensor& mask);

  /// Fixed-step RK4 from x0 ([B, N]) for n_points grid points spaced dt.
  /// Returns [B, N, n_points] with x0 first. Throws SimulationDiverged on
  /// non-finite states.
  torch::Tensor rollout(const torch::Tensor& x0, const torch::Tensor& adj, const torch::Tensor& mask, double dt,
                        int n_points);

  /// Affine state normalization used by the encoder and decoder.
  void set_scale(double shift, double scale);

  /// Zeroes the decoder output layer (the field becomes identically zero).
  void zero_decoder();

  const DynLearnConfig& config() const { return cfg_; }
  /// Time span the model was trained on; rollouts beyond it are refused.
  double trained_span() const { return span_.item<double>(); }
  double dt() const { return dt_.item<double>(); }
  void set_window(double dt, double span);

 private:
  DynLearnConfig cfg_;
  torch::nn::Sequential encoder{nullptr}, decoder{nullptr};
  std::vector<torch::nn::Linear> self_w, nb_w;
  torch::Tensor shift_, scale_, dt_, span_;
};
TORCH_MODULE(DynamicsNet);

/// Simulates one graph from x0 over `horizon` grid points. Requests longer
/// than the trained span throw DomainError unless `allow_extrapolation`.
/// Returns [N][T].
std::vector<std::vector<double>> simulate_latent(DynamicsNet& model, const Graph& g, const std::vector<double>& x0,
                                                 int horizon, double dt, bool allow_extrapolation = false);

struct DynTrainConfig {
  int epochs = 60;
  int batch_size = 16;
  double lr = 3e-3;
  bool smooth_l1 = true;  ///< sqrt(d^2 + 1e-8) instead of |d|
  bool labeled_only = false;
  std::uint64_t seed = 0;
};

struct TrainedDynamics {
  DynamicsNet model{nullptr};
  std::vector<double> loss;
  /// Number of distinct samples that contributed to the loss.
  int n_trained_samples = 0;
};

/// Mean absolute trajectory error of rollouts from each observed x(0).
/// obs: [B, M, N, T].
torch::Tensor trajectory_loss(DynamicsNet& model, const torch::Tensor& adj, const torch::Tensor& mask,
                              const torch::Tensor& obs, double dt, bool smooth = true);

/// Trains on the observations of labeled and (unless labeled_only)
/// unlabeled samples.
TrainedDynamics train_dynlearn(const std::vector<NetworkSample>& labeled, const std::vector<NetworkSample>& unlabeled,
                               double dt, const DynLearnConfig& model_cfg, const DynTrainConfig& cfg);

/// Batched trajectories from the learned field with the simulator's
/// initial-state conventions. adj: [B, N, N]; returns [B, M, N, t_obs].
/// Sample b draws random starts from derive_seed(seed, b).
/// Differentiable with respect to adj when grad mode is on.
torch::Tensor generate_batch(DynamicsNet& model, const torch::Tensor& adj, const torch::Tensor& mask,
                             const std::vector<dynsim::InitRule>& rules, const dynsim::SimConfig& sim, int t_obs,
                             std::uint64_t seed);

/// One graph's learned observations, M x N x t_obs.
Observations generate_trajectories(DynamicsNet& model, const Graph& g, const std::vector<dynsim::InitRule>& rules,
                                   const dynsim::SimConfig& sim, int t_obs, std::uint64_t seed);

/// Copies of `samples` whose observations are replaced by learned
/// trajectories on the same topologies; labels are kept.
std::vector<NetworkSample> with_learned_trajectories(DynamicsNet& model, const std::vector<NetworkSample>& samples,
                                                     const std::vector<dynsim::InitRule>& rules,
                                                     const dynsim::SimConfig& sim, std::uint64_t seed);

/// Mean |learned - observed| over all observed points of `samples`.
double mean_l1_gap(DynamicsNet& model, const std::vector<NetworkSample>& samples, double dt);
/// Same error for the constant prediction x(t) = x(0).
double persistence_l1_gap(const std::vector<NetworkSample>& samples);

}  // namespace tdnetgen::dynlearn
