#pragma once

#include <vector>

#include <torch/torch.h>

namespace tdnetgen {

/// Deep copy of every parameter and buffer, in registration order.
std::vector<torch::Tensor> snapshot(const torch::nn::Module& module);
void restore(torch::nn::Module& module, const std::vector<torch::Tensor>& state);

/// Sum of squared gradient norms; NaN when any gradient is non-finite.
double grad_norm(const torch::nn::Module& module);

/// Deterministic parameter initialization from a seed.
void seed_torch(std::uint64_t seed);

}  // namespace tdnetgen
