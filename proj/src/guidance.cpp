#include "tdnetgen/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tdnetgen/error.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::guidance {

namespace {
constexpr std::size_t kChunk = 128;
}

void GuidanceConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("guidance: lambda must be finite and >= 0");
  if (stride < 1) throw ConfigError("guidance: stride must be >= 1");
}

namespace {

torch::Tensor adjacency_gradient(predictor::Predictor& model, const torch::Tensor& adj, const torch::Tensor& mask,
                                 const torch::Tensor& target,
                                 const std::function<torch::Tensor(const torch::Tensor&)>& observe) {
  torch::AutoGradMode enable(true);
  model->eval();
  const auto dtype = model->parameters().front().scalar_type();
  auto a = adj.detach().to(dtype).clone().requires_grad_(true);
  auto logits = model->forward(a, mask.to(dtype), observe(a).to(dtype));
  auto loss = torch::binary_cross_entropy_with_logits(logits, target.to(dtype), {}, {}, at::Reduction::Sum);
  auto g = torch::autograd::grad({loss}, {a})[0];
  if (!torch::isfinite(g).all().item<bool>()) throw NumericError("guidance_gradient: non-finite gradient");
  return torch::stack({torch::zeros_like(g), g}, -1);
}

}  // namespace

torch::Tensor guidance_gradient_with(predictor::Predictor& model, const torch::Tensor& adj, const torch::Tensor& mask,
                                     const torch::Tensor& obs, const torch::Tensor& target) {
  return adjacency_gradient(model, adj, mask, target, [&](const torch::Tensor&) { return obs.detach(); });
}

torch::Tensor guidance_gradient(predictor::Predictor& model, const TrajectorySource& source, const torch::Tensor& adj,
                                const torch::Tensor& mask, const torch::Tensor& target, std::uint64_t seed,
                                bool through_dynamics) {
  if (!source.dynamics) throw DomainError("guidance_gradient: no dynamics model");
  auto& dyn = *source.dynamics;
  dyn->eval();
  if (through_dynamics) {
    return adjacency_gradient(model, adj, mask, target, [&](const torch::Tensor& a) {
      const auto dtype = dyn->parameters().front().scalar_type();
      return dynlearn::generate_batch(dyn, a.to(dtype), mask, source.rules, source.sim, source.t_obs, seed);
    });
  }
  torch::Tensor obs;
  {
    torch::NoGradGuard guard;
    auto hard = (adj.detach() > 0.5).to(torch::kFloat32);
    obs = dynlearn::generate_batch(dyn, hard, mask, source.rules, source.sim, source.t_obs, seed);
  }
  return guidance_gradient_with(model, adj, mask, obs, target);
}

torch::Tensor pair_gradient(const torch::Tensor& grad) { return grad + grad.transpose(-3, -2); }

torch::Tensor guided_posterior(const torch::Tensor& base, const torch::Tensor& grad, double lambda) {
  if (lambda == 0.0) return base.clone();
  auto logp = torch::log(base.to(torch::kFloat64)) - lambda * grad.to(torch::kFloat64);
  return torch::softmax(logp, -1).to(base.scalar_type());
}

std::vector<GuidedSample> sample_conditional(const diffusion::EdgePredictor& denoiser,
                                             const diffusion::NoiseSchedule& schedule, predictor::Predictor& model,
                                             const TrajectorySource& source, const std::vector<int>& n_nodes,
                                             Resilience target, const GuidanceConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  std::vector<GuidedSample> out;
  for (std::size_t lo = 0; lo < n_nodes.size(); lo += kChunk) {
    const std::size_t hi = std::min(n_nodes.size(), lo + kChunk);
    const int n_max = *std::max_element(n_nodes.begin() + lo, n_nodes.begin() + hi);
    const auto b = static_cast<std::int64_t>(hi - lo);
    auto mask = torch::zeros({b, n_max}, torch::kFloat64);
    for (std::size_t k = lo; k < hi; ++k) mask[k - lo].narrow(0, 0, n_nodes[k]).fill_(1.0);
    auto y = torch::full({b}, static_cast<double>(dynsim::as_int(target)));
    const std::uint64_t chunk_seed = derive_seed(seed, lo);

    torch::Tensor tilt;
    int since = 0;
    auto hook = [&](const torch::Tensor& adj, const torch::Tensor& m, int s, const torch::Tensor& logits) {
      if (!tilt.defined() || since % cfg.stride == 0) {
        auto g = pair_gradient(guidance_gradient(model, source, adj, m, y, derive_seed(chunk_seed, 0x67, s),
                                                        cfg.through_dynamics));
        tilt = (g.select(-1, 1) - g.select(-1, 0)).to(torch::kFloat64) * pair_mask(m);
      }
      ++since;
      return logits - cfg.lambda * tilt;
    };
    auto x = diffusion::reverse_chain(denoiser, schedule, mask, chunk_seed, hook);
    for (std::size_t k = lo; k < hi; ++k) out.push_back({graph_from_adjacency(x[k - lo], n_nodes[k]), target});
  }
  return out;
}

}  // namespace tdnetgen::guidance
