#include "tdnetgen/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "tdnetgen/error.hpp"

namespace tdnetgen::stats {

namespace {

double upper_tail(double statistic, int dof) {
  if (dof < 1) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, statistic));
}

}  // namespace

ChiSquareResult chi_square_two_sample(std::span<const int> a, std::span<const int> b,
                                      int min_bin_total) {
  if (a.empty() || b.empty()) throw DomainError("chi_square_two_sample: empty sample");
  std::map<int, std::pair<double, double>> hist;
  for (int v : a) hist[v].first += 1.0;
  for (int v : b) hist[v].second += 1.0;

  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> acc{0.0, 0.0};
  for (const auto& [value, counts] : hist) {
    acc.first += counts.first;
    acc.second += counts.second;
    if (acc.first + acc.second >= min_bin_total) {
      bins.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.first + acc.second > 0.0) {
    if (bins.empty()) bins.push_back(acc);
    else {
      bins.back().first += acc.first;
      bins.back().second += acc.second;
    }
  }

  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  ChiSquareResult r;
  for (const auto& [ca, cb] : bins) {
    const double col = ca + cb;
    const double ea = na * col / n;
    const double eb = nb * col / n;
    r.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
  }
  r.dof = static_cast<int>(bins.size()) - 1;
  r.p_value = upper_tail(r.statistic, r.dof);
  return r;
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> expected) {
  if (observed.size() != expected.size() || observed.size() < 2)
    throw DomainError("chi_square_gof: need matching counts over at least two cells");
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw DomainError("chi_square_gof: expected counts must be positive");
    r.statistic += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  r.dof = static_cast<int>(observed.size()) - 1;
  r.p_value = upper_tail(r.statistic, r.dof);
  return r;
}

double point_biserial(std::span<const double> values, std::span<const int> labels) {
  if (values.size() != labels.size() || values.size() < 2)
    throw DomainError("point_biserial: need matching vectors of length >= 2");
  const double n = static_cast<double>(values.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    mx += values[i];
    my += labels[i] != 0 ? 1.0 : 0.0;
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dx = values[i] - mx;
    const double dy = (labels[i] != 0 ? 1.0 : 0.0) - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("point_biserial: constant variable");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace tdnetgen::stats
