#pragma once

// Model files: "TDCK" magic, u32 format version, u64 header length, a JSON
// header (kind + hyperparameters), then the libtorch archive bytes.

#include <filesystem>
#include <string>

#include <json.hpp>
#include <torch/torch.h>

#include "tdnetgen/diffusion.hpp"
#include "tdnetgen/dynlearn.hpp"
#include "tdnetgen/predictor.hpp"

namespace tdnetgen::checkpoint {

inline constexpr std::uint32_t kFormatVersion = 1;

void save_module(const std::filesystem::path& path, const std::string& kind, const nlohmann::json& meta,
                 const torch::nn::Module& module);
/// Reads only the header; throws IoError on a bad magic, version or size.
nlohmann::json read_header(const std::filesystem::path& path);
/// Loads weights into `module`; throws IoError when the kind differs.
nlohmann::json load_module(const std::filesystem::path& path, const std::string& kind, torch::nn::Module& module);

void save_denoiser(const std::filesystem::path& path, const diffusion::Denoiser& model,
                   const diffusion::NoiseSchedule& schedule);
struct LoadedDenoiser {
  diffusion::Denoiser model{nullptr};
  diffusion::NoiseSchedule schedule;
};
LoadedDenoiser load_denoiser(const std::filesystem::path& path);

void save_dynamics(const std::filesystem::path& path, const dynlearn::DynamicsNet& model);
dynlearn::DynamicsNet load_dynamics(const std::filesystem::path& path);

void save_predictor(const std::filesystem::path& path, const predictor::Predictor& model);
predictor::Predictor load_predictor(const std::filesystem::path& path);

}  // namespace tdnetgen::checkpoint
