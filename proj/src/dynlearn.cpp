#include "tdnetgen/dynlearn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdnetgen/error.hpp"
#include "tdnetgen/log.hpp"
#include "tdnetgen/module_util.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::dynlearn {

namespace nn = torch::nn;

DynamicsNetImpl::DynamicsNetImpl(const DynLearnConfig& cfg) : cfg_(cfg) {
  if (cfg.d_hidden < 1 || cfg.gnn_layers < 1) throw ConfigError("dynlearn: d_hidden and gnn_layers must be >= 1");
  const int d = cfg.d_hidden;
  encoder = register_module("encoder", nn::Sequential(nn::Linear(1, d), nn::Tanh(), nn::Linear(d, d)));
  for (int l = 0; l < cfg.gnn_layers; ++l) {
    self_w.push_back(register_module("self" + std::to_string(l), nn::Linear(d, d)));
    nb_w.push_back(register_module("nb" + std::to_string(l), nn::Linear(nn::LinearOptions(d, d).bias(false))));
  }
  decoder = register_module("decoder", nn::Sequential(nn::Linear(d, d), nn::Tanh(), nn::Linear(d, 1)));
  shift_ = register_buffer("shift", torch::zeros({1}));
  scale_ = register_buffer("scale", torch::ones({1}));
  dt_ = register_buffer("dt", torch::zeros({1}));
  span_ = register_buffer("span", torch::zeros({1}));
}

void DynamicsNetImpl::set_scale(double shift, double scale) {
  if (!(scale > 0.0) || !std::isfinite(shift)) throw DomainError("dynlearn: scale must be positive and finite");
  shift_.fill_(shift);
  scale_.fill_(scale);
}

void DynamicsNetImpl::set_window(double dt, double span) {
  dt_.fill_(dt);
  span_.fill_(span);
}

void DynamicsNetImpl::zero_decoder() {
  torch::NoGradGuard guard;
  auto last = decoder->ptr(2)->as<nn::LinearImpl>();
  last->weight.zero_();
  last->bias.zero_();
}

torch::Tensor DynamicsNetImpl::derivative(const torch::Tensor& x, const torch::Tensor& adj, const torch::Tensor& mask) {
  auto m = mask.to(x.scalar_type());
  auto z = encoder->forward(((x - shift_) / scale_).unsqueeze(-1));
  for (std::size_t l = 0; l < self_w.size(); ++l)
    z = torch::tanh(self_w[l]->forward(z) + nb_w[l]->forward(torch::bmm(adj, z)));
  return decoder->forward(z).squeeze(-1) * scale_ * m;
}

torch::Tensor DynamicsNetImpl::rollout(const torch::Tensor& x0, const torch::Tensor& adj, const torch::Tensor& mask,
                                       double dt, int n_points) {
  if (n_points < 1) throw DomainError("dynlearn: rollout needs at least one grid point");
  auto a = adj.to(x0.scalar_type());
  std::vector<torch::Tensor> states{x0};
  auto x = x0;
  for (int t = 1; t < n_points; ++t) {
    auto k1 = derivative(x, a, mask);
    auto k2 = derivative(x + 0.5 * dt * k1, a, mask);
    auto k3 = derivative(x + 0.5 * dt * k2, a, mask);
    auto k4 = derivative(x + dt * k3, a, mask);
    x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!torch::isfinite(x).all().item<bool>())
      throw SimulationDiverged(static_cast<std::size_t>(t), "dynlearn: learned field diverged");
    states.push_back(x);
  }
  return torch::stack(states, -1);
}

namespace {

void check_horizon(DynamicsNet& model, int n_points, double dt) {
  const double span = (n_points - 1) * dt;
  if (span > model->trained_span() + 1e-9)
    throw DomainError(log::strf("dynlearn: horizon %.4g exceeds the trained window %.4g", span,
                                model->trained_span()));
}

}  // namespace

std::vector<std::vector<double>> simulate_latent(DynamicsNet& model, const Graph& g, const std::vector<double>& x0,
                                                 int horizon, double dt, bool allow_extrapolation) {
  if (static_cast<int>(x0.size()) != g.n_nodes()) throw DomainError("simulate_latent: x0 length differs from N");
  for (double v : x0)
    if (!std::isfinite(v)) throw DomainError("simulate_latent: non-finite initial state");
  if (!allow_extrapolation) check_horizon(model, horizon, dt);
  torch::NoGradGuard guard;
  const auto dtype = model->parameters().front().scalar_type();
  auto b = make_graph_batch({g}, dtype);
  auto x = torch::tensor(x0, torch::kFloat64).to(dtype).unsqueeze(0);
  auto path = model->rollout(x, b.adj, b.mask, dt, horizon)[0].to(torch::kFloat64).contiguous();
  auto acc = path.accessor<double, 2>();
  std::vector<std::vector<double>> out(g.n_nodes(), std::vector<double>(horizon));
  for (int i = 0; i < g.n_nodes(); ++i)
    for (int t = 0; t < horizon; ++t) out[i][t] = acc[i][t];
  return out;
}

torch::Tensor trajectory_loss(DynamicsNet& model, const torch::Tensor& adj, const torch::Tensor& mask,
                              const torch::Tensor& obs, double dt, bool smooth) {
  const auto b = obs.size(0), m = obs.size(1), n = obs.size(2), t = obs.size(3);
  auto flat = obs.reshape({b * m, n, t});
  auto a = adj.unsqueeze(1).expand({b, m, n, n}).reshape({b * m, n, n});
  auto mk = mask.unsqueeze(1).expand({b, m, n}).reshape({b * m, n});
  auto pred = model->rollout(flat.select(-1, 0), a, mk, dt, static_cast<int>(t));
  auto d = (pred - flat).narrow(-1, 1, t - 1);
  auto err = smooth ? torch::sqrt(d * d + 1e-8) : d.abs();
  auto w = mk.to(err.scalar_type()).unsqueeze(-1).expand_as(err);
  return (err * w).sum() / w.sum().clamp_min(1.0);
}

TrainedDynamics train_dynlearn(const std::vector<NetworkSample>& labeled, const std::vector<NetworkSample>& unlabeled,
                               double dt, const DynLearnConfig& model_cfg, const DynTrainConfig& cfg) {
  std::vector<const NetworkSample*> pool;
  for (const auto& s : labeled) pool.push_back(&s);
  if (!cfg.labeled_only)
    for (const auto& s : unlabeled) pool.push_back(&s);
  if (pool.empty()) throw DomainError("train_dynlearn: no trajectories");
  if (!(dt > 0.0)) throw DomainError("train_dynlearn: dt must be positive");
  const int t_len = pool.front()->obs.n_time;
  if (t_len < 2) throw DomainError("train_dynlearn: need at least two observed time points");

  double sum = 0.0, sq = 0.0, count = 0.0;
  for (const auto* s : pool) {
    if (s->obs.n_time != t_len) throw DomainError("train_dynlearn: observation lengths differ");
    for (float v : s->obs.values) {
      sum += v;
      sq += static_cast<double>(v) * v;
      count += 1.0;
    }
  }
  const double mean = sum / count;
  const double sd = std::sqrt(std::max(sq / count - mean * mean, 0.0));

  seed_torch(derive_seed(cfg.seed, 0x64796e));
  TrainedDynamics out;
  out.model = DynamicsNet(model_cfg);
  out.model->set_scale(mean, std::max(sd, 1e-3));
  out.model->set_window(dt, (t_len - 1) * dt);
  out.n_trained_samples = static_cast<int>(pool.size());
  torch::optim::Adam opt(out.model->parameters(), torch::optim::AdamOptions(cfg.lr));
  Rng rng(derive_seed(cfg.seed, 0x6f7264));

  std::vector<int> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(idx.begin(), idx.end(), rng);
    double total = 0.0;
    int batches = 0;
    for (std::size_t lo = 0; lo < idx.size(); lo += cfg.batch_size) {
      const std::size_t hi = std::min(idx.size(), lo + static_cast<std::size_t>(cfg.batch_size));
      std::vector<Graph> graphs;
      std::vector<const Observations*> obs;
      for (std::size_t k = lo; k < hi; ++k) {
        graphs.push_back(pool[idx[k]]->graph);
        obs.push_back(&pool[idx[k]]->obs);
      }
      auto batch = make_graph_batch(graphs);
      auto x = make_obs_batch(obs, batch.n_max());
      opt.zero_grad();
      auto loss = trajectory_loss(out.model, batch.adj, batch.mask, x, dt, cfg.smooth_l1);
      const double lv = loss.item<double>();
      if (!std::isfinite(lv)) throw TrainingError("train_dynlearn: non-finite loss at epoch " + std::to_string(epoch));
      loss.backward();
      nn::utils::clip_grad_norm_(out.model->parameters(), 1.0);
      opt.step();
      total += lv;
      ++batches;
    }
    out.loss.push_back(total / batches);
    log::debug(log::strf("dynlearn epoch %d loss %.5f", epoch, out.loss.back()));
  }
  out.model->eval();
  return out;
}

torch::Tensor generate_batch(DynamicsNet& model, const torch::Tensor& adj, const torch::Tensor& mask,
                             const std::vector<dynsim::InitRule>& rules, const dynsim::SimConfig& sim, int t_obs,
                             std::uint64_t seed) {
  if (rules.empty()) throw DomainError("generate_batch: no initialization rules");
  if (t_obs < 1) throw DomainError("generate_batch: t_obs must be >= 1");
  check_horizon(model, t_obs, sim.dt);
  const auto dtype = model->parameters().front().scalar_type();
  const auto b = adj.size(0), n = adj.size(1);
  const auto m = static_cast<std::int64_t>(rules.size());
  auto counts = mask.sum(-1).to(torch::kInt64).contiguous();
  auto x0 = torch::zeros({b, m, n}, torch::kFloat64);
  auto acc = x0.accessor<double, 3>();
  for (std::int64_t k = 0; k < b; ++k) {
    const int nk = static_cast<int>(counts[k].item<std::int64_t>());
    for (std::int64_t r = 0; r < m; ++r) {
      const auto x = dynsim::initial_state(rules[r], nk, sim, derive_seed(derive_seed(seed, k), 0x696e6974, r));
      for (int i = 0; i < nk; ++i) acc[k][r][i] = x[i];
    }
  }
  auto a = adj.to(dtype).unsqueeze(1).expand({b, m, n, n}).reshape({b * m, n, n});
  auto mk = mask.to(dtype).unsqueeze(1).expand({b, m, n}).reshape({b * m, n});
  auto path = model->rollout(x0.to(dtype).reshape({b * m, n}), a, mk, sim.dt, t_obs);
  return (path * mk.unsqueeze(-1)).reshape({b, m, n, t_obs});
}

Observations generate_trajectories(DynamicsNet& model, const Graph& g, const std::vector<dynsim::InitRule>& rules,
                                   const dynsim::SimConfig& sim, int t_obs, std::uint64_t seed) {
  torch::NoGradGuard guard;
  auto batch = make_graph_batch({g});
  auto x = generate_batch(model, batch.adj, batch.mask, rules, sim, t_obs, seed)[0].to(torch::kFloat32).contiguous();
  Observations obs(static_cast<int>(rules.size()), g.n_nodes(), t_obs);
  std::copy(x.data_ptr<float>(), x.data_ptr<float>() + x.numel(), obs.values.begin());
  return obs;
}

std::vector<NetworkSample> with_learned_trajectories(DynamicsNet& model, const std::vector<NetworkSample>& samples,
                                                     const std::vector<dynsim::InitRule>& rules,
                                                     const dynsim::SimConfig& sim, std::uint64_t seed) {
  std::vector<NetworkSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    NetworkSample copy = s;
    copy.obs = generate_trajectories(model, s.graph, rules, sim, s.obs.n_time,
                                     derive_seed(seed, static_cast<std::uint64_t>(s.id)));
    copy.full_trajectory.reset();
    out.push_back(std::move(copy));
  }
  return out;
}

double mean_l1_gap(DynamicsNet& model, const std::vector<NetworkSample>& samples, double dt) {
  if (samples.empty()) throw DomainError("mean_l1_gap: no samples");
  torch::NoGradGuard guard;
  const auto dtype = model->parameters().front().scalar_type();
  double total = 0.0, weight = 0.0;
  for (const auto& s : samples) {
    auto b = make_graph_batch({s.graph}, dtype);
    auto x = make_obs_batch({&s.obs}, b.n_max(), dtype);
    const double w = static_cast<double>(s.obs.n_traj) * s.obs.n_nodes * (s.obs.n_time - 1);
    total += trajectory_loss(model, b.adj, b.mask, x, dt, false).item<double>() * w;
    weight += w;
  }
  return total / weight;
}

double persistence_l1_gap(const std::vector<NetworkSample>& samples) {
  if (samples.empty()) throw DomainError("persistence_l1_gap: no samples");
  double total = 0.0, weight = 0.0;
  for (const auto& s : samples)
    for (int m = 0; m < s.obs.n_traj; ++m)
      for (int i = 0; i < s.obs.n_nodes; ++i)
        for (int t = 1; t < s.obs.n_time; ++t) {
          total += std::abs(s.obs.at(m, i, t) - s.obs.at(m, i, 0));
          weight += 1.0;
        }
  return total / weight;
}

}  // namespace tdnetgen::dynlearn
