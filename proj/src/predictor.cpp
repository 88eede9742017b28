#include "tdnetgen/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdnetgen/error.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/metrics.hpp"
#include "tdnetgen/module_util.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::predictor {

namespace nn = torch::nn;

torch::Tensor laplacian_operator(const torch::Tensor& adj) {
  if (adj.dim() != 2 && adj.dim() != 3) throw DomainError("laplacian_operator: expected [N, N] or [B, N, N]");
  const auto n = adj.size(-1);
  auto inv_sqrt = [](const torch::Tensor& d) {
    return torch::where(d > 0, d.clamp_min(1e-30).rsqrt(), torch::zeros_like(d));
  };
  auto din = inv_sqrt(adj.sum(-1));
  auto dout = inv_sqrt(adj.sum(-2));
  auto eye = torch::eye(n, adj.options());
  return eye - din.unsqueeze(-1) * adj * dout.unsqueeze(-2);
}

PredictorImpl::PredictorImpl(const PredictorConfig& cfg) : cfg_(cfg) {
  if (cfg.d_embed < 1 || cfg.heads < 1 || cfg.d_embed % cfg.heads != 0 || cfg.encoder_layers < 1 ||
      cfg.gcn_layers < 1 || cfg.max_time < 1 || cfg.n_traj < 1 || cfg.attn_hidden < 1)
    throw ConfigError("predictor: invalid architecture sizes");
  const int d = cfg.d_embed;
  input = register_module("input", nn::Linear(1, d));
  pos_ = register_parameter("pos", torch::randn({cfg.max_time, d}) * 0.02);
  encoder = register_module(
      "encoder", nn::TransformerEncoder(nn::TransformerEncoderOptions(
                                            nn::TransformerEncoderLayerOptions(d, cfg.heads).dim_feedforward(2 * d).dropout(0.0),
                                            cfg.encoder_layers)));
  for (int l = 0; l < cfg.gcn_layers; ++l) {
    f_.push_back(register_module("f" + std::to_string(l), nn::Linear(d, d)));
    g_.push_back(register_module("g" + std::to_string(l), nn::Linear(d, d)));
  }
  attn = register_module("attn", nn::Sequential(nn::Linear(cfg.n_traj, cfg.attn_hidden), nn::ReLU(),
                                                nn::Linear(cfg.attn_hidden, cfg.n_traj)));
  classifier = register_module("classifier", nn::Sequential(nn::Linear(d, d), nn::ReLU(), nn::Linear(d, 1)));
  shift_ = register_buffer("obs_shift", torch::zeros({1}));
  scale_ = register_buffer("obs_scale", torch::ones({1}));
}

void PredictorImpl::set_obs_scale(double shift, double scale) {
  if (!(scale > 0.0) || !std::isfinite(shift)) throw DomainError("predictor: scale must be positive and finite");
  shift_.fill_(shift);
  scale_.fill_(scale);
}

NetworkEmbedding PredictorImpl::embed(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& obs) {
  if (obs.dim() != 4) throw DomainError("predictor: observations must be [B, M, N, T]");
  const auto b = obs.size(0), m = obs.size(1), n = obs.size(2), t = obs.size(3);
  if (m != cfg_.n_traj) throw DomainError("predictor: trajectory count differs from the model's");
  if (t > cfg_.max_time || t < 1) throw DomainError("predictor: observation length outside [1, max_time]");
  if (adj.size(1) != n || mask.size(1) != n) throw DomainError("predictor: node counts differ");
  const int d = cfg_.d_embed;
  const auto dtype = input->weight.scalar_type();
  auto mk = mask.to(dtype);

  // Temporal encoding of every real (trajectory, node) sequence.
  auto node_mask = mk.unsqueeze(1).expand({b, m, n}).reshape({-1});
  auto idx = torch::nonzero(node_mask > 0.5).squeeze(-1);
  auto seq = ((obs.to(dtype) - shift_) / scale_).reshape({b * m * n, t}).index_select(0, idx);
  auto h = input->forward(seq.unsqueeze(-1)) + pos_.narrow(0, 0, t).unsqueeze(0);
  auto enc = encoder->forward(h.transpose(0, 1)).select(0, t - 1);
  auto z = torch::zeros({b * m * n, d}, enc.options()).index_copy(0, idx, enc).reshape({b, m, n, d});

  auto psi = laplacian_operator(adj.to(dtype)).unsqueeze(1);
  auto nm = mk.view({b, 1, n, 1});
  for (std::size_t l = 0; l < f_.size(); ++l) z = torch::tanh(f_[l]->forward(z) + g_[l]->forward(torch::matmul(psi, z))) * nm;

  auto count = (mk.sum(-1) * d).clamp_min(1.0).unsqueeze(-1);
  auto avg = z.sum({2, 3}) / count;
  auto mx = z.masked_fill(nm < 0.5, -1e9).amax({2, 3});
  auto alpha = torch::sigmoid(attn->forward(avg) + attn->forward(mx));

  NetworkEmbedding out;
  out.alpha = alpha;
  out.z_traj = z;
  out.z = (alpha.view({b, m, 1, 1}) * z).sum(1);
  out.e_net = out.z.sum(1) / mk.sum(-1, true).clamp_min(1.0);
  return out;
}

torch::Tensor PredictorImpl::forward(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& obs) {
  return classifier->forward(embed(adj, mask, obs).e_net).squeeze(-1);
}

SampleBatch make_sample_batch(const std::vector<const NetworkSample*>& samples, torch::Dtype dtype) {
  if (samples.empty()) throw DomainError("make_sample_batch: empty batch");
  std::vector<netgen::Graph> graphs;
  std::vector<const dataset::Observations*> obs;
  std::vector<float> labels;
  for (const auto* s : samples) {
    graphs.push_back(s->graph);
    obs.push_back(&s->obs);
    labels.push_back(s->label && *s->label == dynsim::Resilience::RESILIENT ? 1.0f : 0.0f);
  }
  SampleBatch out;
  out.graphs = make_graph_batch(graphs, dtype);
  out.obs = make_obs_batch(obs, out.graphs.n_max(), dtype);
  out.labels = torch::tensor(labels).to(dtype);
  return out;
}

SampleBatch make_sample_batch(const std::vector<NetworkSample>& samples, torch::Dtype dtype) {
  std::vector<const NetworkSample*> ptrs;
  for (const auto& s : samples) ptrs.push_back(&s);
  return make_sample_batch(ptrs, dtype);
}

namespace {

constexpr std::size_t kEvalChunk = 64;

struct Scored {
  std::vector<double> proba;
  double loss = 0.0;
};

Scored score(Predictor& model, const std::vector<NetworkSample>& samples) {
  torch::NoGradGuard guard;
  model->eval();
  Scored out;
  const auto dtype = model->parameters().front().scalar_type();
  double loss = 0.0;
  for (std::size_t lo = 0; lo < samples.size(); lo += kEvalChunk) {
    std::vector<const NetworkSample*> part;
    for (std::size_t k = lo; k < std::min(samples.size(), lo + kEvalChunk); ++k) part.push_back(&samples[k]);
    auto batch = make_sample_batch(part, dtype);
    auto logits = model->forward(batch.graphs.adj, batch.graphs.mask, batch.obs);
    loss += torch::binary_cross_entropy_with_logits(logits, batch.labels, {}, {}, at::Reduction::Sum).item<double>();
    auto p = torch::sigmoid(logits).to(torch::kFloat64).contiguous();
    out.proba.insert(out.proba.end(), p.data_ptr<double>(), p.data_ptr<double>() + p.numel());
  }
  out.loss = loss / static_cast<double>(samples.size());
  return out;
}

std::vector<int> truth(const std::vector<NetworkSample>& samples) {
  std::vector<int> y;
  for (const auto& s : samples) {
    if (!s.label) throw DomainError("predictor: sample " + std::to_string(s.id) + " has no label");
    y.push_back(dynsim::as_int(*s.label));
  }
  return y;
}

std::vector<int> threshold(const std::vector<double>& p) {
  std::vector<int> out;
  for (double v : p) out.push_back(v >= 0.5 ? 1 : 0);
  return out;
}

}  // namespace

std::vector<double> predict_proba(Predictor& model, const std::vector<NetworkSample>& samples) {
  if (samples.empty()) return {};
  return score(model, samples).proba;
}

std::vector<int> predict_labels(Predictor& model, const std::vector<NetworkSample>& samples) {
  return threshold(predict_proba(model, samples));
}

Predictor clone(const Predictor& model) {
  Predictor copy(model->config());
  copy->to(model->parameters().front().scalar_type());
  restore(*copy, snapshot(*model));
  return copy;
}

TrainedPredictor train_predictor(const PredictorConfig& model_cfg, const std::vector<NetworkSample>& train,
                                 const std::vector<NetworkSample>& validation, const PredictorTrainConfig& cfg,
                                 const Predictor* init) {
  if (train.empty()) throw ConfigError("train_predictor: empty training pool");
  const auto y_train = truth(train);
  const int positives = std::accumulate(y_train.begin(), y_train.end(), 0);
  if (positives == 0 || positives == static_cast<int>(y_train.size()))
    throw ConfigError("train_predictor: training pool holds a single class");
  if (validation.empty()) throw ConfigError("train_predictor: empty validation pool");
  const auto y_val = truth(validation);

  seed_torch(derive_seed(cfg.seed, 0x707265));
  TrainedPredictor out;
  out.n_train = static_cast<int>(train.size());
  if (init) {
    out.model = clone(*init);
  } else {
    out.model = Predictor(model_cfg);
    double sum = 0.0, sq = 0.0, count = 0.0;
    for (const auto& s : train)
      for (float v : s.obs.values) {
        sum += v;
        sq += static_cast<double>(v) * v;
        count += 1.0;
      }
    const double mean = sum / count;
    out.model->set_obs_scale(mean, std::max(std::sqrt(std::max(sq / count - mean * mean, 0.0)), 1e-3));
  }
  torch::optim::AdamW opt(out.model->parameters(),
                          torch::optim::AdamWOptions(cfg.lr).weight_decay(cfg.weight_decay));
  Rng rng(derive_seed(cfg.seed, 0x736866));

  std::vector<torch::Tensor> best;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<int> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    out.model->train();
    std::shuffle(idx.begin(), idx.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (std::size_t lo = 0; lo < idx.size(); lo += cfg.batch_size) {
      std::vector<const NetworkSample*> part;
      for (std::size_t k = lo; k < std::min(idx.size(), lo + static_cast<std::size_t>(cfg.batch_size)); ++k)
        part.push_back(&train[idx[k]]);
      auto batch = make_sample_batch(part);
      opt.zero_grad();
      auto loss = torch::binary_cross_entropy_with_logits(
          out.model->forward(batch.graphs.adj, batch.graphs.mask, batch.obs), batch.labels);
      const double lv = loss.item<double>();
      if (!std::isfinite(lv)) throw TrainingError("train_predictor: non-finite loss at epoch " + std::to_string(epoch));
      loss.backward();
      nn::utils::clip_grad_norm_(out.model->parameters(), 1.0);
      opt.step();
      total += lv;
      ++batches;
    }
    out.train_loss.push_back(total / batches);

    const auto scored = score(out.model, validation);
    const double f1 = eval::compute_metrics(threshold(scored.proba), y_val).f1;
    out.val_f1.push_back(f1);
    out.val_loss.push_back(scored.loss);
    if (out.best_epoch < 0 || f1 > out.best_val_f1 || (f1 == out.best_val_f1 && scored.loss < best_loss)) {
      out.best_val_f1 = f1;
      best_loss = scored.loss;
      out.best_epoch = epoch;
      best = snapshot(*out.model);
    }
    log::debug(log::strf("predictor epoch %d loss %.4f val f1 %.4f val loss %.4f", epoch, out.train_loss.back(), f1,
                         scored.loss));
    if (epoch - out.best_epoch >= cfg.patience) break;
  }
  restore(*out.model, best);
  out.model->eval();
  return out;
}

TrainedPredictor finetune_predictor(const Predictor& model, const std::vector<NetworkSample>& labeled,
                                    const std::vector<NetworkSample>& validation, dynlearn::DynamicsNet& dyn,
                                    const std::vector<dynsim::InitRule>& rules, const dynsim::SimConfig& sim,
                                    const PredictorTrainConfig& cfg) {
  const auto learned = dynlearn::with_learned_trajectories(dyn, labeled, rules, sim, derive_seed(cfg.seed, 0x6674));
  const auto learned_val =
      dynlearn::with_learned_trajectories(dyn, validation, rules, sim, derive_seed(cfg.seed, 0x6676));
  return train_predictor(model->config(), learned, learned_val, cfg, &model);
}

}  // namespace tdnetgen::predictor
