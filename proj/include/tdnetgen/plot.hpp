#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tdnetgen/metrics.hpp"

namespace tdnetgen::eval {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  ///< optional symmetric error bars
};

struct Bar {
  std::string label;
  double value = 0.0;
  double err = 0.0;
};

/// Minimal standalone SVG charts.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);
std::string bar_chart_svg(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars);

/// Summary table, one row per report:
/// method,n_seeds,f1_mean,f1_std,accuracy_mean,accuracy_std,f1_per_seed,accuracy_per_seed
/// with per-seed values joined by ';'.
std::string summary_table(const std::vector<MetricReport>& reports);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tdnetgen::eval
