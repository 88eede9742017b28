#pragma once

#include <vector>

#include "tdnetgen/dataset.hpp"
#include "tdnetgen/dynamics.hpp"
#include "tdnetgen/graph.hpp"

namespace tdnetgen::theory {

using dataset::NetworkSample;
using dynsim::DynamicsSpec;
using dynsim::Resilience;
using netgen::Graph;

/// Mean-field effective coupling <s_out s_in> / <s>; for an undirected graph
/// this is sum(d_i^2) / sum(d_i). Throws DomainError on an edgeless graph.
double beta_eff(const Graph& g);

/// beta_eff with the edgeless graph mapped to 0 (no coupling at all).
double beta_eff_or_zero(const Graph& g);

/// Right-hand side of the reduced one-dimensional system
/// dx/dt = F(x) + beta G(x, x).
double reduced_rhs(const DynamicsSpec& spec, double beta, double x);

struct Equilibrium {
  double x = 0.0;
  bool stable = false;
};

struct BifurcationOptions {
  double beta_lo = 0.0;
  double beta_hi = 50.0;
  double beta_step = 0.05;
  /// Spacing of the x-grid used to bracket equilibria.
  double x_spacing = 1e-3;
  /// Bisection tolerance on beta.
  double tol = 1e-4;
  /// Slopes smaller than this in magnitude are treated as marginal (not stable).
  double slope_tol = 1e-6;
};

/// Upper end of the x-grid: a family scale, doubled until the reduced field
/// is negative there.
double x_upper(const DynamicsSpec& spec, double beta);

/// Equilibria of the reduced system on [0, x_upper], sorted by x.
std::vector<Equilibrium> reduced_equilibria(const DynamicsSpec& spec, double beta,
                                            const BifurcationOptions& opts = {});

/// Family criterion on the reduced system. Mutualistic and neuronal: the only
/// stable equilibrium is the high one. Regulatory: a stable positive
/// equilibrium exists.
bool reduced_resilient(const DynamicsSpec& spec, double beta, const BifurcationOptions& opts = {});

/// Smallest beta at which the reduced system turns resilient, located by a
/// grid scan and refined by bisection. Throws AnalysisError when the scan
/// window holds no transition.
double bifurcation_point(const DynamicsSpec& spec, const BifurcationOptions& opts = {});

/// Edgeless graphs have beta_eff 0 and come out non-resilient.
Resilience theory_predict(const Graph& g, double beta_crit);

struct TheoryThresholds {
  double beta_plus = 0.0;   ///< min beta_eff over resilient labeled samples
  double beta_minus = 0.0;  ///< max beta_eff over non-resilient labeled samples
  bool consistent = true;   ///< beta_plus >= beta_minus
};

/// Throws DomainError unless both classes are present.
TheoryThresholds theory_thresholds(const std::vector<NetworkSample>& labeled);

/// Labels unlabeled samples whose beta_eff lies outside the ambiguous band
/// spanned by the labeled thresholds. Returns only the newly labeled samples,
/// tagged with LabelSource::THEORY.
std::vector<NetworkSample> theory_label_unlabeled(const std::vector<NetworkSample>& labeled,
                                                  const std::vector<NetworkSample>& unlabeled);

}  // namespace tdnetgen::theory
