#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tdnetgen/dynamics.hpp"
#include "tdnetgen/graph.hpp"

namespace tdnetgen::dataset {

using dynsim::Resilience;
using netgen::Graph;

/// Observed prefix of M nodal-state trajectories, stored [m][node][t] in
/// single precision (the on-disk precision).
struct Observations {
  int n_traj = 0;
  int n_nodes = 0;
  int n_time = 0;
  std::vector<float> values;

  Observations() = default;
  Observations(int m, int n, int t)
      : n_traj(m), n_nodes(n), n_time(t), values(static_cast<std::size_t>(m) * n * t, 0.0f) {}

  float& at(int m, int node, int t) {
    return values[(static_cast<std::size_t>(m) * n_nodes + node) * n_time + t];
  }
  float at(int m, int node, int t) const {
    return values[(static_cast<std::size_t>(m) * n_nodes + node) * n_time + t];
  }
  bool operator==(const Observations&) const = default;
};

/// First `t_obs` time points of a simulated trajectory.
Observations observe(const dynsim::Trajectory& traj, int t_obs);

/// Where a sample's label came from. Only SIMULATED labels are ground truth.
enum class LabelSource : std::uint8_t { NONE = 0, SIMULATED, PSEUDO, THEORY, GUIDED };

std::string_view to_string(LabelSource source);
LabelSource label_source_from_string(std::string_view name);

struct NetworkSample {
  std::int64_t id = 0;
  Graph graph;
  Observations obs;
  std::optional<Resilience> label;
  LabelSource label_source = LabelSource::NONE;
  /// Ground-truth trajectory over the full horizon; evaluation only.
  std::optional<dynsim::Trajectory> full_trajectory;

  bool operator==(const NetworkSample&) const = default;
};

/// Copy of `sample` with observations cut to the first `t_obs` points.
/// Throws DomainError when t_obs exceeds the stored length or is < 1.
NetworkSample truncate_observations(const NetworkSample& sample, int t_obs);

struct PoolCounts {
  int n_unlabeled = 400;
  int n_labeled = 50;
  int n_val = 100;
  int n_test = 100;
  int total() const { return n_unlabeled + n_labeled + n_val + n_test; }
  bool operator==(const PoolCounts&) const = default;
};

/// Everything needed to rebuild the split bit-for-bit.
struct Provenance {
  netgen::TopologySpec topology;
  dynsim::DynamicsSpec dynamics;
  dynsim::SimConfig sim;
  dynsim::LabelRule rule;
  PoolCounts counts;
  int t_obs = 6;
  std::uint64_t seed = 0;
  /// Per-sample simulation seed actually used (after divergence retries).
  std::map<std::int64_t, std::uint64_t> sample_seeds;
  /// Simulated labels of the unlabeled pool, withheld from training.
  std::map<std::int64_t, Resilience> audit_labels;

  bool operator==(const Provenance&) const = default;
};

struct DatasetSplit {
  std::vector<NetworkSample> labeled;
  std::vector<NetworkSample> unlabeled;
  std::vector<NetworkSample> validation;
  std::vector<NetworkSample> test;
  Provenance provenance;

  bool operator==(const DatasetSplit&) const = default;
};

struct BuildOptions {
  int max_retries = 5;
  bool keep_full_trajectories = true;
};

/// Simulates, labels and splits a dataset. Deterministic in
/// (specs, counts, t_obs, seed).
DatasetSplit build_dataset(const netgen::TopologySpec& topology, const dynsim::DynamicsSpec& dynamics,
                           const dynsim::SimConfig& sim, const dynsim::LabelRule& rule,
                           const PoolCounts& counts, int t_obs, std::uint64_t seed,
                           const BuildOptions& options = {});

/// Re-simulates one sample from the stored provenance.
NetworkSample resimulate(const Provenance& prov, std::int64_t id);

struct ClassBalance {
  int resilient = 0;
  int non_resilient = 0;
};
ClassBalance class_balance(const std::vector<NetworkSample>& samples);

inline constexpr int kDatasetSchemaVersion = 1;

/// Writes `manifest.json` plus `samples/<id>/{graph.edges, obs.f32, label.txt,
/// traj.f64}` under `dir`.
void save_dataset(const DatasetSplit& split, const std::filesystem::path& dir);
DatasetSplit load_dataset(const std::filesystem::path& dir);

/// Pool of generated or pseudo-labeled samples (same on-disk layout, no
/// provenance; each label carries its source).
void save_samples(const std::vector<NetworkSample>& samples, const std::filesystem::path& dir,
                  const std::string& kind);
std::vector<NetworkSample> load_samples(const std::filesystem::path& dir);

// Little-endian array files with a shape header.
void write_array_f32(const std::filesystem::path& path, const std::vector<std::int64_t>& shape,
                     const std::vector<float>& data);
void write_array_f64(const std::filesystem::path& path, const std::vector<std::int64_t>& shape,
                     const std::vector<double>& data);
std::vector<float> read_array_f32(const std::filesystem::path& path, std::vector<std::int64_t>& shape);
std::vector<double> read_array_f64(const std::filesystem::path& path, std::vector<std::int64_t>& shape);

}  // namespace tdnetgen::dataset
