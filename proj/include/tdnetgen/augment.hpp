#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "tdnetgen/diffusion.hpp"
#include "tdnetgen/dynlearn.hpp"
#include "tdnetgen/guidance.hpp"
#include "tdnetgen/metrics.hpp"
#include "tdnetgen/predictor.hpp"

namespace tdnetgen::augment {

using dataset::DatasetSplit;
using dataset::NetworkSample;

struct PipelineConfig {
  int n_per_class = 100;
  double use_fraction = 0.5;
  guidance::GuidanceConfig guidance;
  bool no_guidance = false;
  bool no_finetune = false;
  bool labeled_only_dynlearn = false;
  std::uint64_t seed = 0;

  int diffusion_steps = 200;
  diffusion::DenoiserConfig denoiser;
  diffusion::DenoiserTrainConfig denoiser_train;
  dynlearn::DynLearnConfig dynamics;
  dynlearn::DynTrainConfig dynamics_train;
  predictor::PredictorConfig predictor;
  predictor::PredictorTrainConfig predictor_train;
  predictor::PredictorTrainConfig finetune;
  predictor::PredictorTrainConfig retrain;

  void validate() const;
};

/// Desk-scale defaults used by the CLI and the acceptance run.
PipelineConfig desk_config();

nlohmann::json to_json(const PipelineConfig& cfg);
/// Overrides fields present in `j`; throws ConfigError naming the bad path.
PipelineConfig pipeline_from_json(const nlohmann::json& j, PipelineConfig base = desk_config());

inline constexpr const char* kStageNames[7] = {"train_dynamics", "train_denoiser", "train_vanilla", "finetune",
                                               "generate",       "subsample",      "retrain"};

struct PipelineResult {
  predictor::Predictor vanilla{nullptr};
  predictor::Predictor guide{nullptr};  ///< predictor used for guidance or labeling
  predictor::Predictor final_model{nullptr};
  dynlearn::DynamicsNet dynamics{nullptr};
  std::vector<NetworkSample> generated;
  std::vector<NetworkSample> used;
  eval::Metrics vanilla_test;
  eval::Metrics final_test;
  nlohmann::json report;
};

/// Runs the seven stages. With a non-empty `artifacts` directory each stage
/// stores its output under a key derived from its inputs, and later runs
/// (including other ablation variants) reuse matching artifacts.
PipelineResult run_pipeline(const DatasetSplit& data, const PipelineConfig& cfg,
                            const std::filesystem::path& artifacts = {});

// Stage building blocks; run_pipeline adds caching and the report. Seeds are
// derived from cfg.seed.
dynlearn::TrainedDynamics stage_train_dynamics(const DatasetSplit& data, const PipelineConfig& cfg);
/// Labeled plus unlabeled topologies, the denoiser's training set.
std::vector<netgen::Graph> training_topologies(const DatasetSplit& data);
/// Cosine schedule whose marginal is the training edge density.
diffusion::TrainedDenoiser stage_train_denoiser(const DatasetSplit& data, const PipelineConfig& cfg);
/// cfg.predictor with the trajectory count of the dataset's dynamics family.
predictor::PredictorConfig predictor_config(const DatasetSplit& data, const PipelineConfig& cfg);
predictor::TrainedPredictor stage_train_vanilla(const DatasetSplit& data, const PipelineConfig& cfg);
predictor::TrainedPredictor stage_finetune(const predictor::Predictor& vanilla, const DatasetSplit& data,
                                           dynlearn::DynamicsNet& dynamics, const PipelineConfig& cfg);
/// 2 * n_per_class graphs with node counts drawn from the unlabeled pool,
/// ids from kFirstGeneratedId, trajectories from the learned dynamics.
std::vector<NetworkSample> stage_generate(const diffusion::Denoiser& denoiser, const diffusion::NoiseSchedule& schedule,
                                          predictor::Predictor& guide, dynlearn::DynamicsNet& dynamics,
                                          const DatasetSplit& data, const PipelineConfig& cfg);
std::vector<NetworkSample> stage_subsample(const std::vector<NetworkSample>& generated, const PipelineConfig& cfg);
predictor::TrainedPredictor stage_retrain(const predictor::Predictor& vanilla, const DatasetSplit& data,
                                          const std::vector<NetworkSample>& used, const PipelineConfig& cfg);
/// Counts, mean density and (with a guide) the guide's agreement with the
/// intended labels.
nlohmann::json generation_summary(const std::vector<NetworkSample>& generated, predictor::Predictor* guide);

inline constexpr std::int64_t kFirstGeneratedId = 1'000'000;

/// Generated samples in the dataset container format; labels carry the
/// intended (guided) or predictor-assigned origin.
std::vector<NetworkSample> label_generated(predictor::Predictor& model, std::vector<NetworkSample> samples);

/// Stage hash used for artifact names (FNV-1a over the text).
std::string stage_key(const std::string& text);

}  // namespace tdnetgen::augment
