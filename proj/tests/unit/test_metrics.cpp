#include <doctest.h>

#include <random>

#include "tdnetgen/error.hpp"
#include "tdnetgen/metrics.hpp"
#include "tdnetgen/stats.hpp"

using namespace tdnetgen;
using namespace tdnetgen::eval;

TEST_CASE("metric examples") {
  const std::vector<int> y{1, 0, 1, 1, 0};
  auto m = compute_metrics(y, y);
  CHECK(m.f1 == 1.0);
  CHECK(m.accuracy == 1.0);
  CHECK(!m.zero_division);

  m = compute_metrics(std::vector<int>(5, 0), y);
  CHECK(m.f1 == 0.0);
  CHECK(m.zero_division);

  // (TP, FP, FN, TN) = (3, 1, 2, 4)
  const std::vector<int> pred{1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
  const std::vector<int> lab{1, 1, 1, 0, 1, 1, 0, 0, 0, 0};
  m = compute_metrics(pred, lab);
  CHECK(m.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(m.accuracy == doctest::Approx(0.7).epsilon(1e-15));

  CHECK_THROWS_AS(compute_metrics(std::vector<int>{1}, std::vector<int>{1, 0}), DomainError);
  CHECK_THROWS_AS(compute_metrics(std::vector<int>{}, std::vector<int>{}), DomainError);
}

TEST_CASE("metrics agree with a brute-force confusion matrix") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    std::vector<int> p(n), y(n);
    for (int i = 0; i < n; ++i) {
      p[i] = static_cast<int>(rng() % 2);
      y[i] = static_cast<int>(rng() % 2);
    }
    int cm[2][2] = {{0, 0}, {0, 0}};
    for (int i = 0; i < n; ++i) cm[y[i]][p[i]]++;
    const double tp = cm[1][1], fp = cm[0][1], fn = cm[1][0];
    const double f1 = tp == 0 ? 0.0 : 2.0 * tp / (2.0 * tp + fp + fn);
    const auto m = compute_metrics(p, y);
    CHECK(m.f1 == doctest::Approx(f1).epsilon(1e-15));
    CHECK(m.accuracy == doctest::Approx((cm[0][0] + cm[1][1]) / static_cast<double>(n)).epsilon(1e-15));
  }
}

TEST_CASE("summaries carry per-seed values") {
  Metrics a, b;
  a.f1 = 0.5;
  b.f1 = 0.7;
  a.accuracy = 0.6;
  b.accuracy = 0.6;
  const auto r = summarize("x", {a, b});
  CHECK(r.f1.size() == 2);
  CHECK(r.f1_mean == doctest::Approx(0.6));
  CHECK(r.f1_std == doctest::Approx(std::sqrt(0.02)));
  CHECK(r.accuracy_std == 0.0);
}

TEST_CASE("chi-square two-sample test") {
  std::mt19937_64 rng(1);
  std::binomial_distribution<int> bin(40, 0.3);
  std::vector<int> a, b, c;
  for (int i = 0; i < 400; ++i) {
    a.push_back(bin(rng));
    b.push_back(bin(rng));
    c.push_back(bin(rng) + 3);
  }
  CHECK(stats::chi_square_two_sample(a, b).p_value > 0.001);
  CHECK(stats::chi_square_two_sample(a, c).p_value < 1e-6);
  // Identical samples give a zero statistic.
  const auto same = stats::chi_square_two_sample(a, a);
  CHECK(same.statistic == doctest::Approx(0.0));
  CHECK(same.p_value == doctest::Approx(1.0));
}

TEST_CASE("point-biserial equals Pearson on a hand example") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<int> y{0, 0, 1, 1};
  // Pearson of (1,2,3,4) and (0,0,1,1): cov 0.5, sds sqrt(1.25), 0.5 (population) -> 0.8944.
  CHECK(stats::point_biserial(x, y) == doctest::Approx(2.0 / std::sqrt(5.0)));
}
