#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdnetgen/augment.hpp"
#include "tdnetgen/baselines.hpp"

namespace tdnetgen::eval {

/// Everything needed to rebuild the datasets and run every method.
struct ExperimentConfig {
  netgen::TopologySpec topology;
  dynsim::DynamicsSpec dynamics;
  dynsim::SimConfig sim;
  dynsim::LabelRule rule;
  dataset::PoolCounts counts;
  int t_obs = 6;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  augment::PipelineConfig pipeline = augment::desk_config();
  baselines::SelfTrainConfig self_train;
  /// Adds the "w/o CG" and "w/o FT" rows.
  bool ablations = true;
  /// Stage cache shared by all runs; empty disables reuse.
  std::filesystem::path cache;

  void validate() const;
};

inline constexpr const char* kVanilla = "vanilla";
inline constexpr const char* kSelfTrain = "ST";
inline constexpr const char* kTheory = "TRY";
inline constexpr const char* kFull = "TDNetGen";
inline constexpr const char* kNoTrajectories = "TDNetGen w/o trajectories";
inline constexpr const char* kNoGuidance = "TDNetGen w/o CG";
inline constexpr const char* kNoFinetune = "TDNetGen w/o FT";

/// Test-set metrics of one method on one seed.
struct SeedResult {
  std::string method;
  std::uint64_t seed = 0;
  Metrics test;
  int n_added = 0;
  nlohmann::json details;
};

struct BenchmarkResult {
  std::vector<MetricReport> rows;
  std::vector<SeedResult> per_seed;
};

/// One seed: dataset build, the full pipeline and every comparison method.
std::vector<SeedResult> run_seed(const ExperimentConfig& cfg, std::uint64_t seed);

BenchmarkResult run_benchmark(const ExperimentConfig& cfg);

/// Per-seed table: method,seed,f1,accuracy,precision,recall,n_added.
std::string per_seed_table(const std::vector<SeedResult>& rows);

/// Writes summary.csv, per_seed.csv, f1.svg and report.json into `dir`.
void write_benchmark(const BenchmarkResult& result, const std::filesystem::path& dir);

enum class SweepAxis { N_LABELED, T_OBS, N_GENERATED };
SweepAxis parse_sweep_axis(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepPoint {
  double value = 0.0;
  MetricReport vanilla;
  MetricReport augmented;
};

/// Vanilla and full-pipeline reports per axis value. n_generated values are
/// total counts split evenly across the two classes.
std::vector<SweepPoint> sweep(SweepAxis axis, const std::vector<double>& values, const ExperimentConfig& cfg);

/// Writes sweep.csv (axis,value,method,f1_mean,f1_std,accuracy_mean,
/// accuracy_std,f1_per_seed) and sweep.svg into `dir`.
void write_sweep(SweepAxis axis, const std::vector<SweepPoint>& points, const std::filesystem::path& dir);

}  // namespace tdnetgen::eval
