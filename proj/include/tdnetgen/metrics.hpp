#pragma once

#include <span>
#include <string>
#include <vector>

namespace tdnetgen::eval {

/// Binary confusion counts with resilient (1) as the positive class.
struct Confusion {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int tn = 0;
  int total() const { return tp + fp + fn + tn; }
};

struct Metrics {
  double f1 = 0.0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  /// Set when precision, recall or F1 had a zero denominator and was reported as 0.
  bool zero_division = false;
  Confusion confusion;
};

/// F1 and accuracy of 0/1 predictions; throws DomainError on length mismatch
/// or empty input.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

/// Per-seed values with their mean and (sample) standard deviation.
struct MetricReport {
  std::string tag;
  std::vector<double> f1;
  std::vector<double> accuracy;
  double f1_mean = 0.0;
  double f1_std = 0.0;
  double accuracy_mean = 0.0;
  double accuracy_std = 0.0;
};

MetricReport summarize(const std::string& tag, const std::vector<Metrics>& per_seed);

double mean(std::span<const double> v);
/// Sample standard deviation (n-1 denominator); 0 for fewer than two values.
double sample_std(std::span<const double> v);

}  // namespace tdnetgen::eval
