#include "tdnetgen/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "tdnetgen/error.hpp"

namespace tdnetgen::eval {

namespace {

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 170, kTop = 40, kBottom = 60;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const { return hi > lo ? a + (v - lo) / (hi - lo) * (b - a) : (a + b) / 2; }
};

Axis padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void frame(std::ostringstream& o, const std::string& title, const std::string& x_label, const std::string& y_label,
           const Axis& y) {
  o << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif" font-size="12">)",
                   kW, kH)
    << '\n';
  o << fmt::format(R"(<rect width="{}" height="{}" fill="white"/>)", kW, kH) << '\n';
  o << fmt::format(R"(<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>)", (kW - kRight + kLeft) / 2,
                   escape(title))
    << '\n';
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  o << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>)", x0, y0, x1, y0) << '\n';
  o << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>)", x0, y0, x0, y1) << '\n';
  for (int k = 0; k <= 4; ++k) {
    const double v = y.lo + k * (y.hi - y.lo) / 4;
    const double py = y.map(v, y0, y1);
    o << fmt::format(R"(<line x1="{}" y1="{:.1f}" x2="{}" y2="{:.1f}" stroke="#ddd"/>)", x0, py, x1, py) << '\n';
    o << fmt::format(R"(<text x="{}" y="{:.1f}" text-anchor="end">{:.3g}</text>)", x0 - 6, py + 4, v) << '\n';
  }
  o << fmt::format(R"(<text x="{}" y="{}" text-anchor="middle">{}</text>)", (x0 + x1) / 2, kH - 15, escape(x_label))
    << '\n';
  o << fmt::format(R"svg(<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>)svg",
                   (y0 + y1) / 2, (y0 + y1) / 2, escape(y_label))
    << '\n';
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size()))
      throw DomainError("line_chart_svg: series '" + s.name + "' has mismatched lengths");
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double e = s.err.empty() ? 0.0 : s.err[k];
      xlo = std::min(xlo, s.x[k]);
      xhi = std::max(xhi, s.x[k]);
      ylo = std::min(ylo, s.y[k] - e);
      yhi = std::max(yhi, s.y[k] + e);
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  const Axis x = padded(xlo, xhi), y = padded(ylo, yhi);
  std::ostringstream o;
  frame(o, title, x_label, y_label, y);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;

  std::vector<double> ticks;
  for (const auto& s : series) ticks.insert(ticks.end(), s.x.begin(), s.x.end());
  std::sort(ticks.begin(), ticks.end());
  ticks.erase(std::unique(ticks.begin(), ticks.end()), ticks.end());
  for (double t : ticks)
    o << fmt::format(R"(<text x="{:.1f}" y="{}" text-anchor="middle">{:g}</text>)", x.map(t, x0, x1), y0 + 18, t)
      << '\n';

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string pts;
    for (std::size_t k = 0; k < s.x.size(); ++k)
      pts += fmt::format("{:.1f},{:.1f} ", x.map(s.x[k], x0, x1), y.map(s.y[k], y0, y1));
    o << fmt::format(R"(<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>)", color, pts) << '\n';
    for (std::size_t k = 0; k < s.x.size(); ++k) {
      const double px = x.map(s.x[k], x0, x1), py = y.map(s.y[k], y0, y1);
      o << fmt::format(R"(<circle cx="{:.1f}" cy="{:.1f}" r="3" fill="{}"/>)", px, py, color) << '\n';
      if (!s.err.empty() && s.err[k] > 0)
        o << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="{}"/>)", px,
                         y.map(s.y[k] - s.err[k], y0, y1), px, y.map(s.y[k] + s.err[k], y0, y1), color)
          << '\n';
    }
    const double ly = kTop + 10 + 20 * i;
    o << fmt::format(R"(<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{}" stroke-width="2"/>)", x1 + 15, ly, x1 + 35,
                     ly, color)
      << '\n';
    o << fmt::format(R"(<text x="{}" y="{}">{}</text>)", x1 + 40, ly + 4, escape(s.name)) << '\n';
  }
  o << "</svg>\n";
  return o.str();
}

std::string bar_chart_svg(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars) {
  double hi = 0.0, lo = 0.0;
  for (const auto& b : bars) {
    hi = std::max(hi, b.value + b.err);
    lo = std::min(lo, b.value - b.err);
  }
  const Axis y{lo, hi > lo ? hi * 1.05 : 1.0};
  std::ostringstream o;
  frame(o, title, "", y_label, y);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  const double slot = bars.empty() ? 0.0 : (x1 - x0) / bars.size();
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto& b = bars[i];
    const double cx = x0 + slot * (i + 0.5), w = slot * 0.6;
    const double top = y.map(b.value, y0, y1), base = y.map(0.0, y0, y1);
    o << fmt::format(R"(<rect x="{:.1f}" y="{:.1f}" width="{:.1f}" height="{:.1f}" fill="{}"/>)", cx - w / 2,
                     std::min(top, base), w, std::abs(base - top), kColors[i % std::size(kColors)])
      << '\n';
    if (b.err > 0)
      o << fmt::format(R"(<line x1="{:.1f}" y1="{:.1f}" x2="{:.1f}" y2="{:.1f}" stroke="black"/>)", cx,
                       y.map(b.value - b.err, y0, y1), cx, y.map(b.value + b.err, y0, y1))
        << '\n';
    o << fmt::format(R"(<text x="{:.1f}" y="{:.1f}" text-anchor="middle">{:.3f}</text>)", cx, top - 6, b.value)
      << '\n';
    o << fmt::format(R"(<text x="{:.1f}" y="{}" text-anchor="middle" font-size="10">{}</text>)", cx, y0 + 16,
                     escape(b.label))
      << '\n';
  }
  o << "</svg>\n";
  return o.str();
}

std::string summary_table(const std::vector<MetricReport>& reports) {
  auto joined = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + fmt::format("{:.6f}", v[k]);
    return s;
  };
  std::string out = "method,n_seeds,f1_mean,f1_std,accuracy_mean,accuracy_std,f1_per_seed,accuracy_per_seed\n";
  for (const auto& r : reports)
    out += fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.tag, r.f1.size(), r.f1_mean, r.f1_std,
                       r.accuracy_mean, r.accuracy_std, joined(r.f1), joined(r.accuracy));
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace tdnetgen::eval
