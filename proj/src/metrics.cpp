#include "tdnetgen/metrics.hpp"

#include <cmath>
#include <numeric>

#include "tdnetgen/error.hpp"

namespace tdnetgen::eval {

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size())
    throw DomainError("compute_metrics: " + std::to_string(predictions.size()) + " predictions vs " +
                      std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw DomainError("compute_metrics: no samples");

  Metrics m;
  Confusion& c = m.confusion;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] != 0;
    const bool y = labels[i] != 0;
    if (p && y) ++c.tp;
    else if (p) ++c.fp;
    else if (y) ++c.fn;
    else ++c.tn;
  }
  m.accuracy = static_cast<double>(c.tp + c.tn) / c.total();
  if (c.tp + c.fp > 0) m.precision = static_cast<double>(c.tp) / (c.tp + c.fp);
  else m.zero_division = true;
  if (c.tp + c.fn > 0) m.recall = static_cast<double>(c.tp) / (c.tp + c.fn);
  else m.zero_division = true;
  if (m.precision + m.recall > 0.0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  else m.zero_division = true;
  return m;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

MetricReport summarize(const std::string& tag, const std::vector<Metrics>& per_seed) {
  MetricReport r;
  r.tag = tag;
  for (const auto& m : per_seed) {
    r.f1.push_back(m.f1);
    r.accuracy.push_back(m.accuracy);
  }
  r.f1_mean = mean(r.f1);
  r.f1_std = sample_std(r.f1);
  r.accuracy_mean = mean(r.accuracy);
  r.accuracy_std = sample_std(r.accuracy);
  return r;
}

}  // namespace tdnetgen::eval
