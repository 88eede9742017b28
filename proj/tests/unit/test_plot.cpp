#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tdnetgen/error.hpp"
#include "tdnetgen/plot.hpp"

using namespace tdnetgen;
using namespace tdnetgen::eval;

namespace {

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
  return n;
}

Metrics with(double f1, double acc) {
  Metrics m;
  m.f1 = f1;
  m.accuracy = acc;
  return m;
}

}  // namespace

TEST_CASE("summary table rows") {
  const auto a = summarize("vanilla", {with(0.5, 0.6), with(0.7, 0.8)});
  const auto b = summarize("TDNetGen", {with(0.9, 0.9)});
  const auto t = summary_table({a, b});
  std::istringstream in(t);
  std::string header, row1, row2, extra;
  std::getline(in, header);
  std::getline(in, row1);
  std::getline(in, row2);
  CHECK(header == "method,n_seeds,f1_mean,f1_std,accuracy_mean,accuracy_std,f1_per_seed,accuracy_per_seed");
  // std of {0.5, 0.7} with n-1 denominator is sqrt(0.02)
  CHECK(row1 == "vanilla,2,0.600000,0.141421,0.700000,0.141421,0.500000;0.700000,0.600000;0.800000");
  CHECK(row2 == "TDNetGen,1,0.900000,0.000000,0.900000,0.000000,0.900000,0.900000");
  CHECK(!std::getline(in, extra));
}

TEST_CASE("line chart draws one marker per point") {
  Series s1{"a<b", {1, 2, 3}, {0.5, 0.6, 0.7}, {0.1, 0.0, 0.1}};
  Series s2{"c", {1, 3}, {0.4, 0.8}, {}};
  const auto svg = line_chart_svg("t & u", "x", "y", {s1, s2});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<circle") == 5);
  CHECK(count(svg, "<polyline") == 2);
  CHECK(svg.find("a&lt;b") != std::string::npos);
  CHECK(svg.find("t &amp; u") != std::string::npos);
  CHECK(svg.find("a<b") == std::string::npos);

  Series bad{"bad", {1, 2}, {0.1}, {}};
  CHECK_THROWS_AS(line_chart_svg("t", "x", "y", {bad}), DomainError);
  CHECK(line_chart_svg("empty", "x", "y", {}).find("</svg>") != std::string::npos);
}

TEST_CASE("bar chart has a bar and a label per entry") {
  const auto svg = bar_chart_svg("F1", "F1", {{"vanilla", 0.8, 0.05}, {"ST", 0.85, 0.0}, {"TDNetGen", 0.9, 0.02}});
  CHECK(count(svg, "<rect") == 4);  // background plus three bars
  CHECK(svg.find(">0.850<") != std::string::npos);
  CHECK(svg.find(">TDNetGen<") != std::string::npos);
}

TEST_CASE("write_text creates parent directories") {
  const auto dir = std::filesystem::temp_directory_path() / "tdnetgen_plot_test";
  std::filesystem::remove_all(dir);
  write_text(dir / "a" / "b.txt", "hello\n");
  std::ifstream in(dir / "a" / "b.txt");
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(write_text("/proc/nonexistent_dir/x.txt", "x"), std::exception);
}
