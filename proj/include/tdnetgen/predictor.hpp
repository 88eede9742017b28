#pragma once

#include <cstdint>
#include <vector>

#include <torch/torch.h>

#include "tdnetgen/batch.hpp"
#include "tdnetgen/dataset.hpp"
#include "tdnetgen/dynlearn.hpp"

namespace tdnetgen::predictor {

using dataset::NetworkSample;

/// Psi = I - D_in^{-1/2} A D_out^{-1/2} for [N, N] or [B, N, N] nonnegative A.
/// Zero-degree normalizers are replaced by 0.
torch::Tensor laplacian_operator(const torch::Tensor& adj);

struct PredictorConfig {
  int d_embed = 64;
  int heads = 4;
  int encoder_layers = 2;
  int gcn_layers = 3;
  int max_time = 16;
  int n_traj = 2;
  int attn_hidden = 8;
};

struct NetworkEmbedding {
  torch::Tensor z_traj; ///< [B, M, N, d] per-trajectory node maps after message passing
  torch::Tensor z;      ///< [B, N, d] fused node embeddings
  torch::Tensor e_net;  ///< [B, d]
  torch::Tensor alpha;  ///< [B, M] trajectory attention weights
};

class PredictorImpl : public torch::nn::Module {
 public:
  explicit PredictorImpl(const PredictorConfig& cfg);

  /// adj may be soft; obs is [B, M, N, T].
  NetworkEmbedding embed(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& obs);
  /// Resilience logits [B].
  torch::Tensor forward(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& obs);

  void set_obs_scale(double shift, double scale);
  const PredictorConfig& config() const { return cfg_; }

 private:
  PredictorConfig cfg_;
  torch::nn::Linear input{nullptr};
  torch::Tensor pos_;
  torch::nn::TransformerEncoder encoder{nullptr};
  std::vector<torch::nn::Linear> f_, g_;
  torch::nn::Sequential attn{nullptr}, classifier{nullptr};
  torch::Tensor shift_, scale_;
};
TORCH_MODULE(Predictor);

/// Padded tensors of a sample list.
struct SampleBatch {
  GraphBatch graphs;
  torch::Tensor obs;     ///< [B, M, N, T]
  torch::Tensor labels;  ///< [B], 1 = resilient; zeros when unlabeled
};

SampleBatch make_sample_batch(const std::vector<const NetworkSample*>& samples, torch::Dtype dtype = torch::kFloat32);
SampleBatch make_sample_batch(const std::vector<NetworkSample>& samples, torch::Dtype dtype = torch::kFloat32);

/// Resilience probabilities, in sample order.
std::vector<double> predict_proba(Predictor& model, const std::vector<NetworkSample>& samples);
std::vector<int> predict_labels(Predictor& model, const std::vector<NetworkSample>& samples);

struct PredictorTrainConfig {
  int epochs = 120;
  int batch_size = 16;
  double lr = 1e-3;
  double weight_decay = 1e-4;
  int patience = 30;  ///< epochs without validation improvement before stopping
  std::uint64_t seed = 0;
};

struct TrainedPredictor {
  Predictor model{nullptr};
  std::vector<double> train_loss;
  std::vector<double> val_f1;
  std::vector<double> val_loss;
  double best_val_f1 = 0.0;
  int best_epoch = -1;
  int n_train = 0;
};

/// BCE training with early stopping on validation F1 (ties go to the lower
/// validation loss); returns the best epoch's weights. `init` warm-starts
/// from a copy of an existing model. Throws ConfigError unless both classes
/// are present in `train`.
TrainedPredictor train_predictor(const PredictorConfig& model_cfg, const std::vector<NetworkSample>& train,
                                 const std::vector<NetworkSample>& validation, const PredictorTrainConfig& cfg,
                                 const Predictor* init = nullptr);

/// Continues training a copy of `model` on learned trajectories of the
/// labeled topologies (labels kept) at the configured (reduced) rate;
/// validation also runs on learned trajectories.
TrainedPredictor finetune_predictor(const Predictor& model, const std::vector<NetworkSample>& labeled,
                                    const std::vector<NetworkSample>& validation, dynlearn::DynamicsNet& dyn,
                                    const std::vector<dynsim::InitRule>& rules, const dynsim::SimConfig& sim,
                                    const PredictorTrainConfig& cfg);

/// Fresh model with copied weights.
Predictor clone(const Predictor& model);

}  // namespace tdnetgen::predictor
