#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <torch/torch.h>

#include "tdnetgen/batch.hpp"
#include "tdnetgen/graph.hpp"

namespace tdnetgen::diffusion {

using netgen::Graph;

/// Row-stochastic 2x2 transition matrix over {no-edge, edge}; rows index the
/// source state.
using Mat2 = std::array<std::array<double, 2>, 2>;

Mat2 matmul(const Mat2& a, const Mat2& b);
Mat2 identity2();

/// Forward noising schedule. Step s uses Q^s = alpha_s I + (1 - alpha_s) 1 m^T
/// where m = (1 - density, density); cumulative products are stored.
class NoiseSchedule {
 public:
  NoiseSchedule() = default;

  /// Cosine retention schedule with alpha_bar_S = 0.
  static NoiseSchedule cosine(int steps, double density);
  /// Explicit per-step retention coefficients alpha_1..alpha_S, each in [0, 1].
  static NoiseSchedule from_retention(std::vector<double> retention, double density);

  int steps() const { return static_cast<int>(retention_.size()); }
  double density() const { return density_; }
  double retention(int s) const;
  const std::vector<double>& retention_coefficients() const { return retention_; }
  /// Q^s for s in [1, S].
  const Mat2& q(int s) const;
  /// Qbar^s = Q^1 ... Q^s for s in [0, S]; Qbar^0 is the identity.
  const Mat2& q_bar(int s) const;

  bool operator==(const NoiseSchedule&) const = default;

 private:
  double density_ = 0.5;
  std::vector<double> retention_;
  std::vector<Mat2> q_;
  std::vector<Mat2> q_bar_;
};

/// One-hot [N, N, 2] encoding: [1, 0] no edge, [0, 1] edge; diagonal no-edge.
torch::Tensor to_expanded(const Graph& g, torch::Dtype dtype = torch::kFloat32);
/// Inverse of to_expanded; throws DomainError on non one-hot, asymmetric or
/// self-loop inputs.
Graph from_expanded(const torch::Tensor& e);

/// Samples G^s ~ q(G^s | G^0) pair by pair from rows of Qbar^s.
Graph forward_sample(const Graph& g0, int s, const NoiseSchedule& schedule, std::uint64_t seed);

/// Batched forward sample; `steps` holds one s per graph. Padded pairs stay 0.
torch::Tensor forward_sample_batch(const torch::Tensor& adj, const torch::Tensor& mask,
                                   const std::vector<int>& steps, const NoiseSchedule& schedule,
                                   at::Generator& gen);

/// Posterior p(e^{s-1} | G^s) of one pair given the denoiser's clean-edge
/// probability: sum_e q(e^{s-1} | e, e^s) p_hat(e), with impossible (e, e^s)
/// paths contributing nothing.
std::array<double, 2> posterior_single(double p_edge, int e_s, int s, const NoiseSchedule& schedule);

/// Elementwise posterior probability that e^{s-1} = 1 (double precision).
torch::Tensor posterior_edge_prob(const torch::Tensor& p_hat, const torch::Tensor& adj_s, int s,
                                  const NoiseSchedule& schedule);

struct GraphFeatures {
  torch::Tensor cycles;        ///< [B, N, 3] node memberships in 3-, 4- and 5-cycles
  torch::Tensor n_components;  ///< [B]
  torch::Tensor eigvecs;       ///< [B, N, 2]; sqrt(diag(P) / dim) of the eigenspace when no canonical vector exists
};

/// Structural and spectral node features of hard adjacencies.
GraphFeatures compute_node_features(const torch::Tensor& adj, const torch::Tensor& mask);

/// Sinusoidal embedding of normalized time steps `t` ([B]) into `dim` channels.
torch::Tensor time_embedding(const torch::Tensor& t, int dim);

struct DenoiserConfig {
  int layers = 4;
  int heads = 8;
  int d_node = 64;
  int d_edge = 32;
  int d_time = 16;
  int ffn_mult = 2;
};

/// Graph transformer predicting clean-edge logits from a noisy graph.
class DenoiserImpl : public torch::nn::Module {
 public:
  explicit DenoiserImpl(const DenoiserConfig& cfg);

  /// adj: [B, N, N] hard noisy graph; t: [B] time in (0, 1]. Returns
  /// symmetric logits [B, N, N].
  torch::Tensor forward(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& t);
  /// Same, with precomputed node features.
  torch::Tensor forward_with(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& t,
                             const GraphFeatures& feats);

  const DenoiserConfig& config() const { return cfg_; }

 private:
  struct Layer {
    torch::nn::Linear q{nullptr}, p{nullptr}, v{nullptr}, w{nullptr}, o_h{nullptr}, o_e{nullptr};
    torch::nn::LayerNorm ln_h1{nullptr}, ln_h2{nullptr}, ln_e1{nullptr}, ln_e2{nullptr};
    torch::nn::Sequential ffn_h{nullptr}, ffn_e{nullptr};
  };

  DenoiserConfig cfg_;
  torch::nn::Linear node_in{nullptr}, edge_in{nullptr};
  std::vector<Layer> layers_;
  torch::nn::Sequential head{nullptr};
};
TORCH_MODULE(Denoiser);

/// Clean-edge probabilities p_hat [B, N, N] for a noisy batch at step s.
using EdgePredictor =
    std::function<torch::Tensor(const torch::Tensor& adj, const torch::Tensor& mask, int s)>;

EdgePredictor make_edge_predictor(Denoiser model, const NoiseSchedule& schedule);

struct DenoiserTrainConfig {
  int epochs = 60;
  int batch_size = 32;
  double lr = 1e-3;
  double weight_decay = 0.0;
  double val_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct TrainedDenoiser {
  Denoiser model{nullptr};
  NoiseSchedule schedule;
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  double best_val_loss = 0.0;
};

/// Mean per-pair cross-entropy of the denoiser on one noised batch.
torch::Tensor denoiser_loss(Denoiser& model, const GraphBatch& clean, const torch::Tensor& noisy,
                            const std::vector<int>& steps, const NoiseSchedule& schedule);

/// Pooled edge density of a graph collection (edges over node pairs).
double mean_edge_density(const std::vector<Graph>& graphs);

TrainedDenoiser train_denoiser(const std::vector<Graph>& graphs, const NoiseSchedule& schedule,
                               const DenoiserConfig& model_cfg, const DenoiserTrainConfig& train_cfg);

/// Optional adjustment of per-pair edge logits at step s before sampling
/// G^{s-1}; receives the current hard graph and the base posterior logits.
using PosteriorHook = std::function<torch::Tensor(const torch::Tensor& adj, const torch::Tensor& mask,
                                                  int s, const torch::Tensor& logits)>;

/// Reverse chain s = S..1 from the marginal; returns hard [B, N, N] graphs.
torch::Tensor reverse_chain(const EdgePredictor& predictor, const NoiseSchedule& schedule,
                            const torch::Tensor& mask, std::uint64_t seed,
                            const PosteriorHook& hook = nullptr);

std::vector<Graph> sample_unconditional(const EdgePredictor& predictor, const NoiseSchedule& schedule,
                                        const std::vector<int>& n_nodes, std::uint64_t seed);
Graph sample_unconditional(const EdgePredictor& predictor, const NoiseSchedule& schedule, int n_nodes,
                           std::uint64_t seed);

}  // namespace tdnetgen::diffusion
