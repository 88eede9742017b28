#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "tdnetgen/graph.hpp"

namespace tdnetgen::dynsim {

using netgen::Graph;

enum class DynamicsFamily { MUTUALISTIC, REGULATORY, NEURONAL };

std::string_view to_string(DynamicsFamily family);
DynamicsFamily dynamics_family_from_string(std::string_view name);

/// Coupled nodal dynamics dx_i/dt = F(x_i) + sum_j A_ij G(x_i, x_j).
struct DynamicsSpec {
  DynamicsFamily family = DynamicsFamily::MUTUALISTIC;

  // mutualistic: B + x(1 - x/K)(x/C - 1) + sum_j A_ij x_i x_j / (D + E x_i + H x_j)
  double mut_b = 0.1;
  double mut_k = 5.0;
  double mut_c = 1.0;
  double mut_d = 2.5;
  double mut_e = 0.9;
  double mut_h = 0.1;

  // regulatory: -B x^f + sum_j A_ij x_j^h / (x_j^h + 1)
  double reg_b = 1.0;
  int reg_f = 1;
  double reg_h = 2.0;

  // neuronal: -x + sum_j A_ij / (1 + exp(mu - delta x_j))
  double neu_mu = 1.5;
  double neu_delta = 2.0;

  void validate() const;

  /// Self term F(x).
  double self_term(double x) const;
  /// Interaction term G(x_i, x_j).
  double interaction(double xi, double xj) const;
  bool operator==(const DynamicsSpec&) const = default;
};

enum class InitRule { CONSTANT_HIGH, CONSTANT_LOW, UNIFORM_RANDOM };

struct SimConfig {
  double t_max = 50.0;
  double dt = 0.5;  ///< sampling interval of the stored trajectory
  int substeps = 10; ///< RK4 steps per sampling interval
  double high_value = 5.0;
  double low_value = 0.0;
  double random_lo = 1.0;
  double random_hi = 5.0;

  /// Number of integration steps; throws ConfigError unless t_max/dt is a
  /// positive integer.
  int n_steps() const;
  int n_time_points() const { return n_steps() + 1; }
  void validate() const { (void)n_steps(); }
  bool operator==(const SimConfig&) const = default;
};

/// Initial-state rules per family: high/low constants for mutualistic and
/// neuronal dynamics, a single uniform random start for regulatory.
std::vector<InitRule> default_init_rules(DynamicsFamily family);

/// M trajectories of N nodes over T time points, stored [m][node][t].
struct Trajectory {
  int n_traj = 0;
  int n_nodes = 0;
  int n_time = 0;
  std::vector<double> states;
  std::vector<double> times;

  double& at(int m, int node, int t) {
    return states[(static_cast<std::size_t>(m) * n_nodes + node) * n_time + t];
  }
  double at(int m, int node, int t) const {
    return states[(static_cast<std::size_t>(m) * n_nodes + node) * n_time + t];
  }
  /// Node-averaged state <x> of trajectory m at time index t.
  double mean_state(int m, int t) const;
  bool operator==(const Trajectory&) const = default;
};

enum class Resilience : std::uint8_t { NON_RESILIENT = 0, RESILIENT = 1 };

inline int as_int(Resilience r) { return static_cast<int>(r); }
inline Resilience resilience_from_int(int v) {
  return v != 0 ? Resilience::RESILIENT : Resilience::NON_RESILIENT;
}

struct LabelRule {
  double r = 3.5;        ///< separation threshold between high/low starts
  double m = 3.0;        ///< high-equilibrium floor (neuronal)
  double epsilon = 0.05; ///< zero tolerance (regulatory)
  void validate() const;
  bool operator==(const LabelRule&) const = default;
};

/// Right-hand side f(x) written into dxdt.
using VectorField = std::function<void(std::span<const double> x, std::span<double> dxdt)>;

/// Classic fixed-step RK4. Returns n_steps+1 states (row-major [t][i]),
/// starting with x0. Throws SimulationDiverged when a state turns non-finite.
std::vector<std::vector<double>> rk4_integrate(std::span<const double> x0, double dt, int n_steps,
                                               const VectorField& field);

/// dx/dt of the networked dynamics at state x.
std::vector<double> eval_derivative(std::span<const double> x, const Graph& g,
                                    const DynamicsSpec& spec);

/// One trajectory [node][t] from x0 under the ground-truth dynamics.
std::vector<std::vector<double>> integrate_rk4(std::span<const double> x0, const Graph& g,
                                               const DynamicsSpec& spec, const SimConfig& cfg);

/// Initial state for a rule. Random starts draw from `rng_seed`.
std::vector<double> initial_state(InitRule rule, int n_nodes, const SimConfig& cfg,
                                  std::uint64_t rng_seed);

/// Simulates the family's standard set of initializations.
Trajectory simulate_sample(const Graph& g, const DynamicsSpec& spec, const SimConfig& cfg,
                           std::uint64_t seed);

Resilience label_resilience(const Trajectory& traj, DynamicsFamily family, const LabelRule& rule);

}  // namespace tdnetgen::dynsim
