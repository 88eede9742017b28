#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "tdnetgen/predictor.hpp"

namespace tdnetgen::baselines {

using dataset::NetworkSample;
using dynsim::Resilience;

enum class ConfidencePolicy { TOP_CONFIDENCE, THRESHOLD };

struct SelfTrainConfig {
  int n_pseudo = 100;
  ConfidencePolicy policy = ConfidencePolicy::TOP_CONFIDENCE;
  /// Minimum |p - 0.5| under the threshold policy.
  double threshold = 0.4;
  int rounds = 1;
};

struct SelfTrainResult {
  predictor::Predictor model{nullptr};
  /// Pseudo-labeled samples added over all rounds, tagged PSEUDO.
  std::vector<NetworkSample> pseudo;
  /// Fraction of pseudo-labels that disagree with withheld simulation labels;
  /// unset when no audit labels were given.
  std::optional<double> pseudo_error_rate;
};

/// Indices of `proba` chosen by the policy: largest |p - 0.5| first, ties by
/// ascending sample id.
std::vector<std::size_t> select_confident(const std::vector<double>& proba, const std::vector<NetworkSample>& pool,
                                          const SelfTrainConfig& cfg);

/// Pseudo-labels confident unlabeled samples with the current model and
/// retrains (warm start) on labeled + pseudo-labeled samples.
SelfTrainResult self_train(const predictor::Predictor& vanilla, const std::vector<NetworkSample>& labeled,
                           const std::vector<NetworkSample>& unlabeled, const std::vector<NetworkSample>& validation,
                           const SelfTrainConfig& cfg, const predictor::PredictorTrainConfig& train_cfg,
                           const std::map<std::int64_t, Resilience>& audit = {});

struct TheoryAugmentResult {
  predictor::Predictor model{nullptr};
  std::vector<NetworkSample> added;
};

/// Theory-labeled augmentation: labels unlabeled samples outside the
/// threshold band, keeps at most `n_added` (random subset), and retrains.
TheoryAugmentResult theory_augment(const predictor::Predictor& vanilla, const std::vector<NetworkSample>& labeled,
                                   const std::vector<NetworkSample>& unlabeled,
                                   const std::vector<NetworkSample>& validation, int n_added,
                                   const predictor::PredictorTrainConfig& train_cfg);

}  // namespace tdnetgen::baselines
