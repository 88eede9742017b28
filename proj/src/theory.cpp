#include "tdnetgen/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "tdnetgen/error.hpp"

namespace tdnetgen::theory {

using dynsim::DynamicsFamily;

double beta_eff(const Graph& g) {
  double s = 0.0, s2 = 0.0;
  for (int d : g.degrees()) {
    s += d;
    s2 += static_cast<double>(d) * d;
  }
  if (s == 0.0) throw DomainError("beta_eff: graph has no edges");
  return s2 / s;
}

double beta_eff_or_zero(const Graph& g) { return g.n_edges() == 0 ? 0.0 : beta_eff(g); }

double reduced_rhs(const DynamicsSpec& spec, double beta, double x) {
  return spec.self_term(x) + beta * spec.interaction(x, x);
}

double x_upper(const DynamicsSpec& spec, double beta) {
  double hi = 10.0;
  switch (spec.family) {
    case DynamicsFamily::MUTUALISTIC: hi = 2.0 * spec.mut_k; break;
    // Positive equilibria satisfy B x^f <= beta, and the neuronal input is capped by beta.
    case DynamicsFamily::REGULATORY: hi = std::max(10.0, 2.0 * beta / spec.reg_b + 2.0); break;
    case DynamicsFamily::NEURONAL: hi = std::max(10.0, 2.0 * beta + 2.0); break;
  }
  // Every family decays at large x; widen until the field points inward.
  while (reduced_rhs(spec, beta, hi) >= 0.0 && hi < 1e6) hi *= 2.0;
  return hi;
}

std::vector<Equilibrium> reduced_equilibria(const DynamicsSpec& spec, double beta,
                                            const BifurcationOptions& opts) {
  auto f = [&](double x) { return reduced_rhs(spec, beta, x); };
  const double hi = x_upper(spec, beta);
  const int n = static_cast<int>(std::ceil(hi / opts.x_spacing));
  std::vector<double> roots;

  double x_prev = 0.0, f_prev = f(0.0);
  if (f_prev == 0.0) roots.push_back(0.0);
  for (int k = 1; k <= n; ++k) {
    const double x = std::min(hi, k * opts.x_spacing);
    const double fx = f(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if (f_prev != 0.0 && (f_prev < 0.0) != (fx < 0.0)) {
      double a = x_prev, b = x, fa = f_prev;
      for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, b); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    x_prev = x;
    f_prev = fx;
  }

  std::vector<Equilibrium> out;
  for (double r : roots) {
    const double h = std::max(1e-7, 1e-7 * r);
    const double slope = r - h < 0.0 ? (f(r + h) - f(r)) / h : (f(r + h) - f(r - h)) / (2.0 * h);
    out.push_back({r, slope < -opts.slope_tol});
  }
  return out;
}

bool reduced_resilient(const DynamicsSpec& spec, double beta, const BifurcationOptions& opts) {
  const auto eq = reduced_equilibria(spec, beta, opts);
  std::vector<double> stable;
  for (const auto& e : eq)
    if (e.stable) stable.push_back(e.x);
  switch (spec.family) {
    case DynamicsFamily::MUTUALISTIC:
      return stable.size() == 1 && stable.front() > spec.mut_c;
    case DynamicsFamily::NEURONAL:
      return stable.size() == 1 && stable.front() > spec.neu_mu / spec.neu_delta;
    case DynamicsFamily::REGULATORY:
      return std::any_of(stable.begin(), stable.end(), [](double x) { return x > 1e-3; });
  }
  return false;
}

double bifurcation_point(const DynamicsSpec& spec, const BifurcationOptions& opts) {
  spec.validate();
  if (!(opts.beta_step > 0.0) || !(opts.beta_hi > opts.beta_lo))
    throw ConfigError("bifurcation_point: empty beta window");
  double prev = opts.beta_lo;
  bool prev_res = reduced_resilient(spec, prev, opts);
  if (prev_res)
    throw AnalysisError("bifurcation_point: reduced system already resilient at beta_lo; lower the window");
  const int n = static_cast<int>(std::ceil((opts.beta_hi - opts.beta_lo) / opts.beta_step));
  for (int k = 1; k <= n; ++k) {
    const double beta = std::min(opts.beta_hi, opts.beta_lo + k * opts.beta_step);
    if (reduced_resilient(spec, beta, opts)) {
      double a = prev, b = beta;
      while (b - a > opts.tol) {
        const double mid = 0.5 * (a + b);
        if (reduced_resilient(spec, mid, opts)) b = mid;
        else a = mid;
      }
      return 0.5 * (a + b);
    }
    prev = beta;
  }
  throw AnalysisError("bifurcation_point: no transition in [" + std::to_string(opts.beta_lo) + ", " +
                      std::to_string(opts.beta_hi) + "]; widen the scan window");
}

Resilience theory_predict(const Graph& g, double beta_crit) {
  return beta_eff_or_zero(g) > beta_crit ? Resilience::RESILIENT : Resilience::NON_RESILIENT;
}

TheoryThresholds theory_thresholds(const std::vector<NetworkSample>& labeled) {
  double plus = std::numeric_limits<double>::infinity();
  double minus = -std::numeric_limits<double>::infinity();
  bool any_pos = false, any_neg = false;
  for (const auto& s : labeled) {
    if (!s.label) continue;
    const double b = beta_eff_or_zero(s.graph);
    if (*s.label == Resilience::RESILIENT) {
      plus = std::min(plus, b);
      any_pos = true;
    } else {
      minus = std::max(minus, b);
      any_neg = true;
    }
  }
  if (!any_pos || !any_neg) throw DomainError("theory_thresholds: labeled pool needs both classes");
  return {plus, minus, plus >= minus};
}

std::vector<NetworkSample> theory_label_unlabeled(const std::vector<NetworkSample>& labeled,
                                                  const std::vector<NetworkSample>& unlabeled) {
  const auto t = theory_thresholds(labeled);
  if (!t.consistent)
    spdlog::warn("theory labeling: beta+ = {:.4f} < beta- = {:.4f}; labeling only outside the envelope",
                 t.beta_plus, t.beta_minus);
  const double upper = std::max(t.beta_plus, t.beta_minus);
  const double lower = std::min(t.beta_plus, t.beta_minus);
  std::vector<NetworkSample> out;
  for (const auto& s : unlabeled) {
    const double b = beta_eff_or_zero(s.graph);
    if (b <= upper && b >= lower) continue;
    NetworkSample copy = s;
    copy.label = b > upper ? Resilience::RESILIENT : Resilience::NON_RESILIENT;
    copy.label_source = dataset::LabelSource::THEORY;
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace tdnetgen::theory
