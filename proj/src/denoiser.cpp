#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdnetgen/diffusion.hpp"
#include "tdnetgen/error.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/module_util.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::diffusion {

namespace nn = torch::nn;

namespace {

constexpr int kNodeFeatures = 9;

nn::Sequential ffn(int d, int mult) {
  return nn::Sequential(nn::Linear(d, d * mult), nn::SiLU(), nn::Linear(d * mult, d));
}

torch::Tensor node_inputs(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& t,
                          const GraphFeatures& f, int d_time, torch::Dtype dtype) {
  auto m = mask.to(torch::kFloat64);
  auto a = adj.to(torch::kFloat64) * pair_mask(m);
  auto nv = m.sum(-1, true).clamp_min(1.0);
  auto deg = a.sum(-1) / (nv - 1.0).clamp_min(1.0);
  auto density = (a.sum({1, 2}) / (nv.squeeze(-1) * (nv.squeeze(-1) - 1.0)).clamp_min(1.0)).unsqueeze(-1);
  const auto n = adj.size(1);
  auto x = torch::cat({torch::log1p(f.cycles.clamp_min(0.0)), (f.n_components.unsqueeze(-1) / nv).unsqueeze(1).expand({-1, n, 1}),
                       f.eigvecs, deg.unsqueeze(-1), density.unsqueeze(1).expand({-1, n, 1}),
                       torch::log(nv).unsqueeze(1).expand({-1, n, 1})},
                      -1);
  auto temb = time_embedding(t.to(torch::kFloat64), d_time).unsqueeze(1).expand({-1, n, d_time});
  return (torch::cat({x, temb}, -1) * m.unsqueeze(-1)).to(dtype);
}

}  // namespace

DenoiserImpl::DenoiserImpl(const DenoiserConfig& cfg) : cfg_(cfg) {
  if (cfg.layers < 1 || cfg.heads < 1 || cfg.d_node % cfg.heads != 0 || cfg.d_edge < 1 || cfg.d_time < 2)
    throw ConfigError("denoiser: layers, heads >= 1 and d_node divisible by heads required");
  node_in = register_module("node_in", nn::Linear(kNodeFeatures + cfg.d_time, cfg.d_node));
  edge_in = register_module("edge_in", nn::Linear(2, cfg.d_edge));
  for (int l = 0; l < cfg.layers; ++l) {
    Layer layer;
    const std::string p = "layer" + std::to_string(l) + "_";
    layer.q = register_module(p + "q", nn::Linear(cfg.d_node, cfg.d_node));
    layer.p = register_module(p + "p", nn::Linear(cfg.d_node, cfg.d_node));
    layer.v = register_module(p + "v", nn::Linear(cfg.d_node, cfg.d_node));
    layer.w = register_module(p + "w", nn::Linear(cfg.d_edge, cfg.heads));
    layer.o_h = register_module(p + "o_h", nn::Linear(cfg.d_node, cfg.d_node));
    layer.o_e = register_module(p + "o_e", nn::Linear(cfg.heads, cfg.d_edge));
    layer.ln_h1 = register_module(p + "ln_h1", nn::LayerNorm(nn::LayerNormOptions({cfg.d_node})));
    layer.ln_h2 = register_module(p + "ln_h2", nn::LayerNorm(nn::LayerNormOptions({cfg.d_node})));
    layer.ln_e1 = register_module(p + "ln_e1", nn::LayerNorm(nn::LayerNormOptions({cfg.d_edge})));
    layer.ln_e2 = register_module(p + "ln_e2", nn::LayerNorm(nn::LayerNormOptions({cfg.d_edge})));
    layer.ffn_h = register_module(p + "ffn_h", ffn(cfg.d_node, cfg.ffn_mult));
    layer.ffn_e = register_module(p + "ffn_e", ffn(cfg.d_edge, cfg.ffn_mult));
    layers_.push_back(layer);
  }
  head = register_module("head", nn::Sequential(nn::Linear(cfg.d_edge, cfg.d_edge), nn::SiLU(),
                                                nn::Linear(cfg.d_edge, 1)));
}

torch::Tensor DenoiserImpl::forward(const torch::Tensor& adj, const torch::Tensor& mask, const torch::Tensor& t) {
  return forward_with(adj, mask, t, compute_node_features(adj, mask));
}

torch::Tensor DenoiserImpl::forward_with(const torch::Tensor& adj, const torch::Tensor& mask,
                                         const torch::Tensor& t, const GraphFeatures& feats) {
  const auto dtype = node_in->weight.scalar_type();
  const auto b = adj.size(0), n = adj.size(1);
  const int k = cfg_.heads, dk = cfg_.d_node / cfg_.heads;
  auto m = mask.to(dtype);
  auto pm = pair_mask(m).unsqueeze(-1);
  auto a = adj.to(dtype) * pm.squeeze(-1);

  auto h = node_in->forward(node_inputs(adj, mask, t, feats, cfg_.d_time, dtype)) * m.unsqueeze(-1);
  auto e = edge_in->forward(torch::stack({1.0 - a, a}, -1)) * pm;
  auto key_mask = (m < 0.5).view({b, 1, n, 1});
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  for (auto& L : layers_) {
    auto q = L.q->forward(h).view({b, n, k, dk});
    auto p = L.p->forward(h).view({b, n, k, dk});
    auto v = L.v->forward(h).view({b, n, k, dk});
    auto logits = torch::einsum("bikd,bjkd->bijk", {q, p}) * scale + L.w->forward(e);
    auto attn = torch::softmax(logits.masked_fill(key_mask, -1e9), 2);
    auto h_att = torch::einsum("bijk,bjkd->bikd", {attn, v}).reshape({b, n, cfg_.d_node});
    h = L.ln_h1->forward(h + L.o_h->forward(h_att));
    h = L.ln_h2->forward(h + L.ffn_h->forward(h)) * m.unsqueeze(-1);
    e = L.ln_e1->forward(e + L.o_e->forward(logits));
    e = L.ln_e2->forward(e + L.ffn_e->forward(e)) * pm;
  }
  auto sym = 0.5 * (e + e.transpose(1, 2));
  return head->forward(sym).squeeze(-1);
}

EdgePredictor make_edge_predictor(Denoiser model, const NoiseSchedule& schedule) {
  const int steps = schedule.steps();
  return [model, steps](const torch::Tensor& adj, const torch::Tensor& mask, int s) mutable {
    torch::NoGradGuard guard;
    model->eval();
    auto t = torch::full({adj.size(0)}, static_cast<double>(s) / steps, torch::kFloat64);
    return torch::sigmoid(model->forward(adj, mask, t)).to(torch::kFloat64);
  };
}

double mean_edge_density(const std::vector<Graph>& graphs) {
  double edges = 0.0, pairs = 0.0;
  for (const auto& g : graphs) {
    edges += static_cast<double>(g.n_edges());
    pairs += 0.5 * g.n_nodes() * (g.n_nodes() - 1.0);
  }
  if (pairs == 0.0) throw DomainError("mean_edge_density: no node pairs");
  return edges / pairs;
}

torch::Tensor denoiser_loss(Denoiser& model, const GraphBatch& clean, const torch::Tensor& noisy,
                            const std::vector<int>& steps, const NoiseSchedule& schedule) {
  const auto dtype = model->parameters().front().scalar_type();
  auto t = torch::empty({clean.size()}, torch::kFloat64);
  for (int k = 0; k < clean.size(); ++k) t[k] = static_cast<double>(steps[k]) / schedule.steps();
  auto logits = model->forward(noisy, clean.mask, t);
  auto weight = pair_mask(clean.mask.to(dtype)).triu(1);
  auto target = clean.adj.to(dtype);
  auto ce = torch::binary_cross_entropy_with_logits(logits, target, {}, {}, at::Reduction::None);
  return (ce * weight).sum() / weight.sum().clamp_min(1.0);
}

TrainedDenoiser train_denoiser(const std::vector<Graph>& graphs, const NoiseSchedule& schedule,
                               const DenoiserConfig& model_cfg, const DenoiserTrainConfig& cfg) {
  if (graphs.empty()) throw DomainError("train_denoiser: no training graphs");
  seed_torch(derive_seed(cfg.seed, 0x64656e));
  Rng rng(derive_seed(cfg.seed, 0x64747261));
  auto gen = make_generator(derive_seed(cfg.seed, 0x6e6f6973));

  std::vector<int> order(graphs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  int n_val = graphs.size() >= 2 ? std::max(1, static_cast<int>(std::lround(cfg.val_fraction * graphs.size()))) : 0;
  n_val = std::min<int>(n_val, static_cast<int>(graphs.size()) - 1);
  std::vector<Graph> val, train;
  for (std::size_t k = 0; k < order.size(); ++k)
    (static_cast<int>(k) < n_val ? val : train).push_back(graphs[order[k]]);

  TrainedDenoiser out;
  out.schedule = schedule;
  out.model = Denoiser(model_cfg);
  torch::optim::Adam opt(out.model->parameters(),
                         torch::optim::AdamOptions(cfg.lr).weight_decay(cfg.weight_decay));

  // Fixed noise draws make validation losses comparable across epochs.
  std::vector<int> val_steps;
  for (std::size_t k = 0; k < val.size(); ++k) val_steps.push_back(1 + static_cast<int>((k * 7919 + 13) % schedule.steps()));
  std::vector<std::pair<GraphBatch, torch::Tensor>> val_batches;
  std::vector<std::vector<int>> val_batch_steps;
  for (std::size_t lo = 0; lo < val.size(); lo += cfg.batch_size) {
    const std::size_t hi = std::min(val.size(), lo + cfg.batch_size);
    std::vector<Graph> part(val.begin() + lo, val.begin() + hi);
    std::vector<int> st(val_steps.begin() + lo, val_steps.begin() + hi);
    auto batch = make_graph_batch(part);
    auto vgen = make_generator(derive_seed(cfg.seed, 0x76616c, lo));
    auto noisy = forward_sample_batch(batch.adj, batch.mask, st, schedule, vgen);
    val_batches.emplace_back(std::move(batch), noisy);
    val_batch_steps.push_back(std::move(st));
  }

  std::vector<torch::Tensor> best;
  out.best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<int> idx(train.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    out.model->train();
    std::shuffle(idx.begin(), idx.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (std::size_t lo = 0; lo < idx.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(idx.size(), lo + cfg.batch_size);
      std::vector<Graph> part;
      std::vector<int> steps;
      for (std::size_t k = lo; k < hi; ++k) {
        part.push_back(train[idx[k]]);
        steps.push_back(uniform_int(rng, 1, schedule.steps()));
      }
      auto batch = make_graph_batch(part);
      auto noisy = forward_sample_batch(batch.adj, batch.mask, steps, schedule, gen);
      opt.zero_grad();
      auto loss = denoiser_loss(out.model, batch, noisy, steps, schedule);
      const double lv = loss.item<double>();
      if (!std::isfinite(lv))
        throw TrainingError("train_denoiser: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(batches));
      loss.backward();
      torch::nn::utils::clip_grad_norm_(out.model->parameters(), 1.0);
      opt.step();
      total += lv;
      ++batches;
    }
    out.train_loss.push_back(total / std::max(1, batches));

    double vl = out.train_loss.back();
    if (!val_batches.empty()) {
      torch::NoGradGuard guard;
      out.model->eval();
      double sum = 0.0, count = 0.0;
      for (std::size_t k = 0; k < val_batches.size(); ++k) {
        auto& [batch, noisy] = val_batches[k];
        sum += denoiser_loss(out.model, batch, noisy, val_batch_steps[k], schedule).item<double>() * batch.size();
        count += batch.size();
      }
      vl = sum / count;
    }
    out.val_loss.push_back(vl);
    if (vl < out.best_val_loss) {
      out.best_val_loss = vl;
      best = snapshot(*out.model);
    }
    log::debug(log::strf("denoiser epoch %d train %.4f val %.4f", epoch, out.train_loss.back(), vl));
  }
  if (!best.empty()) restore(*out.model, best);
  out.model->eval();
  return out;
}

}  // namespace tdnetgen::diffusion
