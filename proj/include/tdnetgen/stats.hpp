#pragma once

#include <span>
#include <vector>

namespace tdnetgen::stats {

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Homogeneity test of two samples of integer-valued observations. Adjacent
/// values are pooled until every bin holds at least `min_bin_total`
/// observations across both samples.
ChiSquareResult chi_square_two_sample(std::span<const int> a, std::span<const int> b,
                                      int min_bin_total = 10);

/// Chi-square goodness of fit of observed counts against expected counts.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected);

/// Pearson correlation between a continuous variable and a 0/1 variable.
double point_biserial(std::span<const double> values, std::span<const int> labels);

}  // namespace tdnetgen::stats
