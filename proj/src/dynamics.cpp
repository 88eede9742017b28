#include "tdnetgen/dynamics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tdnetgen/error.hpp"
#include "tdnetgen/random.hpp"

namespace tdnetgen::dynsim {

std::string_view to_string(DynamicsFamily family) {
  switch (family) {
    case DynamicsFamily::MUTUALISTIC: return "MUTUALISTIC";
    case DynamicsFamily::REGULATORY: return "REGULATORY";
    case DynamicsFamily::NEURONAL: return "NEURONAL";
  }
  return "?";
}

DynamicsFamily dynamics_family_from_string(std::string_view name) {
  for (auto f : {DynamicsFamily::MUTUALISTIC, DynamicsFamily::REGULATORY, DynamicsFamily::NEURONAL})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown dynamics family '" + std::string(name) + "'");
}

void DynamicsSpec::validate() const {
  switch (family) {
    case DynamicsFamily::MUTUALISTIC:
      if (!(mut_k > mut_c && mut_c > 0.0)) throw ConfigError("mutualistic: need K > C > 0");
      if (mut_d <= 0.0 || mut_e < 0.0 || mut_h < 0.0)
        throw ConfigError("mutualistic: need D > 0 and E, H >= 0");
      break;
    case DynamicsFamily::REGULATORY:
      if (reg_f != 1 && reg_f != 2) throw ConfigError("regulatory: f must be 1 or 2");
      if (reg_h < 1.0) throw ConfigError("regulatory: Hill coefficient must be >= 1");
      if (reg_b <= 0.0) throw ConfigError("regulatory: B must be positive");
      break;
    case DynamicsFamily::NEURONAL:
      if (neu_delta <= 0.0) throw ConfigError("neuronal: delta must be positive");
      break;
  }
}

double DynamicsSpec::self_term(double x) const {
  switch (family) {
    case DynamicsFamily::MUTUALISTIC:
      return mut_b + x * (1.0 - x / mut_k) * (x / mut_c - 1.0);
    case DynamicsFamily::REGULATORY:
      return -reg_b * (reg_f == 1 ? x : x * x);
    case DynamicsFamily::NEURONAL:
      return -x;
  }
  return 0.0;
}

double DynamicsSpec::interaction(double xi, double xj) const {
  switch (family) {
    case DynamicsFamily::MUTUALISTIC: {
      const double den = mut_d + mut_e * xi + mut_h * xj;
      if (den == 0.0) throw NumericError("mutualistic: zero interaction denominator");
      return xi * xj / den;
    }
    case DynamicsFamily::REGULATORY: {
      const double p = std::pow(xj, reg_h);
      return p / (p + 1.0);
    }
    case DynamicsFamily::NEURONAL:
      return 1.0 / (1.0 + std::exp(neu_mu - neu_delta * xj));
  }
  return 0.0;
}

int SimConfig::n_steps() const {
  if (!(dt > 0.0) || !(t_max > 0.0)) throw ConfigError("sim: t_max and dt must be positive");
  const double ratio = t_max / dt;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio) || rounded < 1.0)
    throw ConfigError("sim: t_max / dt must be a positive integer");
  return static_cast<int>(rounded);
}

std::vector<InitRule> default_init_rules(DynamicsFamily family) {
  if (family == DynamicsFamily::REGULATORY) return {InitRule::UNIFORM_RANDOM};
  return {InitRule::CONSTANT_HIGH, InitRule::CONSTANT_LOW};
}

double Trajectory::mean_state(int m, int t) const {
  if (n_nodes == 0) return 0.0;
  double s = 0.0;
  for (int i = 0; i < n_nodes; ++i) s += at(m, i, t);
  return s / n_nodes;
}

void LabelRule::validate() const {
  if (!(r > 0.0 && m > 0.0 && epsilon > 0.0))
    throw ConfigError("label rule: r, m and epsilon must be positive");
}

// =============================================================================
// Integration
// =============================================================================

std::vector<std::vector<double>> rk4_integrate(std::span<const double> x0, double dt, int n_steps,
                                               const VectorField& field) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> out;
  out.reserve(n_steps + 1);
  out.emplace_back(x0.begin(), x0.end());
  for (double v : out.front())
    if (!std::isfinite(v)) throw SimulationDiverged(0, "rk4: non-finite initial state");

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (int step = 0; step < n_steps; ++step) {
    const auto& x = out.back();
    field(x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k1[i];
    field(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * dt * k2[i];
    field(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + dt * k3[i];
    field(tmp, k4);
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(next[i]) || std::abs(next[i]) > 1e12)
        throw SimulationDiverged(step + 1, "rk4: state left the finite range");
    }
    out.push_back(std::move(next));
  }
  return out;
}

namespace {

VectorField network_field(const Graph& g, const DynamicsSpec& spec) {
  std::vector<std::vector<int>> nbrs(g.n_nodes());
  for (int i = 0; i < g.n_nodes(); ++i) nbrs[i] = g.neighbors(i);
  return [nbrs = std::move(nbrs), spec](std::span<const double> x, std::span<double> dxdt) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double v = spec.self_term(x[i]);
      for (int j : nbrs[i]) v += spec.interaction(x[i], x[j]);
      dxdt[i] = v;
    }
  };
}

}  // namespace

std::vector<double> eval_derivative(std::span<const double> x, const Graph& g,
                                    const DynamicsSpec& spec) {
  if (static_cast<int>(x.size()) != g.n_nodes())
    throw DomainError("eval_derivative: state size does not match graph");
  std::vector<double> out(x.size());
  network_field(g, spec)(x, out);
  return out;
}

std::vector<std::vector<double>> integrate_rk4(std::span<const double> x0, const Graph& g,
                                               const DynamicsSpec& spec, const SimConfig& cfg) {
  if (static_cast<int>(x0.size()) != g.n_nodes())
    throw DomainError("integrate_rk4: state size does not match graph");
  if (cfg.substeps < 1) throw ConfigError("sim: substeps must be >= 1");
  const int n_steps = cfg.n_steps();
  const auto fine = rk4_integrate(x0, cfg.dt / cfg.substeps, n_steps * cfg.substeps,
                                  network_field(g, spec));
  std::vector<std::vector<double>> by_node(x0.size(), std::vector<double>(n_steps + 1));
  for (int t = 0; t <= n_steps; ++t)
    for (std::size_t i = 0; i < x0.size(); ++i)
      by_node[i][t] = fine[static_cast<std::size_t>(t) * cfg.substeps][i];
  return by_node;
}

std::vector<double> initial_state(InitRule rule, int n_nodes, const SimConfig& cfg,
                                  std::uint64_t rng_seed) {
  switch (rule) {
    case InitRule::CONSTANT_HIGH: return std::vector<double>(n_nodes, cfg.high_value);
    case InitRule::CONSTANT_LOW: return std::vector<double>(n_nodes, cfg.low_value);
    case InitRule::UNIFORM_RANDOM: {
      Rng rng(rng_seed);
      std::vector<double> x(n_nodes);
      for (auto& v : x) v = cfg.random_lo + (cfg.random_hi - cfg.random_lo) * uniform01(rng);
      return x;
    }
  }
  return {};
}

Trajectory simulate_sample(const Graph& g, const DynamicsSpec& spec, const SimConfig& cfg,
                           std::uint64_t seed) {
  spec.validate();
  const auto rules = default_init_rules(spec.family);
  Trajectory traj;
  traj.n_traj = static_cast<int>(rules.size());
  traj.n_nodes = g.n_nodes();
  traj.n_time = cfg.n_time_points();
  traj.states.resize(static_cast<std::size_t>(traj.n_traj) * traj.n_nodes * traj.n_time);
  traj.times.resize(traj.n_time);
  for (int t = 0; t < traj.n_time; ++t) traj.times[t] = t * cfg.dt;

  for (int m = 0; m < traj.n_traj; ++m) {
    const auto x0 = initial_state(rules[m], g.n_nodes(), cfg, derive_seed(seed, 0x696e6974, m));
    const auto path = integrate_rk4(x0, g, spec, cfg);
    for (int i = 0; i < traj.n_nodes; ++i)
      for (int t = 0; t < traj.n_time; ++t) traj.at(m, i, t) = path[i][t];
  }
  return traj;
}

Resilience label_resilience(const Trajectory& traj, DynamicsFamily family, const LabelRule& rule) {
  rule.validate();
  if (traj.n_time < 1) throw DomainError("label_resilience: empty trajectory");
  const int last = traj.n_time - 1;
  switch (family) {
    case DynamicsFamily::MUTUALISTIC: {
      if (traj.n_traj != 2) throw DomainError("label_resilience: mutualistic needs 2 trajectories");
      const double gap = std::abs(traj.mean_state(0, last) - traj.mean_state(1, last));
      return gap > rule.r ? Resilience::NON_RESILIENT : Resilience::RESILIENT;
    }
    case DynamicsFamily::REGULATORY: {
      if (traj.n_traj != 1) throw DomainError("label_resilience: regulatory needs 1 trajectory");
      return traj.mean_state(0, last) > rule.epsilon ? Resilience::RESILIENT
                                                     : Resilience::NON_RESILIENT;
    }
    case DynamicsFamily::NEURONAL: {
      if (traj.n_traj != 2) throw DomainError("label_resilience: neuronal needs 2 trajectories");
      const double high = traj.mean_state(0, last);
      const double low = traj.mean_state(1, last);
      const bool bistable = std::abs(high - low) > rule.r;
      const bool both_low = high < rule.m && low < rule.m;
      return (bistable || both_low) ? Resilience::NON_RESILIENT : Resilience::RESILIENT;
    }
  }
  throw DomainError("label_resilience: unknown family");
}

}  // namespace tdnetgen::dynsim
