#include "tdnetgen/module_util.hpp"

#include <cmath>

#include "tdnetgen/error.hpp"

namespace tdnetgen {

std::vector<torch::Tensor> snapshot(const torch::nn::Module& module) {
  torch::NoGradGuard guard;
  std::vector<torch::Tensor> out;
  for (const auto& p : module.parameters()) out.push_back(p.detach().clone());
  for (const auto& b : module.buffers()) out.push_back(b.detach().clone());
  return out;
}

void restore(torch::nn::Module& module, const std::vector<torch::Tensor>& state) {
  torch::NoGradGuard guard;
  auto params = module.parameters();
  auto buffers = module.buffers();
  if (state.size() != params.size() + buffers.size())
    throw DomainError("restore: snapshot does not match the module layout");
  std::size_t k = 0;
  for (auto& p : params) p.copy_(state[k++]);
  for (auto& b : buffers) b.copy_(state[k++]);
}

double grad_norm(const torch::nn::Module& module) {
  double total = 0.0;
  for (const auto& p : module.parameters())
    if (p.grad().defined()) total += p.grad().pow(2).sum().item<double>();
  return std::sqrt(total);
}

void seed_torch(std::uint64_t seed) { torch::manual_seed(seed & 0x7fffffffffffffffULL); }

}  // namespace tdnetgen
