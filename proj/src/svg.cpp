#include "cmc/svg.hpp"

#include <algorithm>
#include <cstdio>

namespace cmc {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string sweep_chart_svg(const SweepCurve& curve, int c0, const std::string& title) {
  constexpr double width = 640, height = 400;
  constexpr double left = 60, right = 150, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const int n = static_cast<int>(curve.points.size());
  const double x_max = std::max(2, n);

  auto px = [&](double k) { return left + (k - 1.0) / (x_max - 1.0) * plot_w; };
  auto py = [&](double v) { return top + (1.0 - v) * plot_h; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" + escape(title) + "</text>\n";

  // Grid and y ticks.
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0;
    s += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(v)) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
         num(py(v)) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + num(left - 8) + "\" y=\"" + num(py(v) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(v) + "</text>\n";
  }
  const int step = std::max(1, n / 10);
  for (int k = 1; k <= n; k += step) {
    s += "<line x1=\"" + num(px(k)) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(px(k)) + "\" y2=\"" +
         num(top + plot_h + 5) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    s += "<text x=\"" + num(px(k)) + "\" y=\"" + num(top + plot_h + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(k) + "</text>\n";
  }
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + plot_h) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" +
       num(top + plot_h) + "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<line x1=\"" + num(left) + "\" y1=\"" + num(top) + "\" x2=\"" + num(left) + "\" y2=\"" + num(top + plot_h) +
       "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  s += "<text x=\"" + num(left + plot_w / 2) + "\" y=\"" + num(height - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">Principal components</text>\n";
  s += "<text x=\"16\" y=\"" + num(top + plot_h / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\" transform=\"rotate(-90 16 " + num(top + plot_h / 2) + ")\">Mean across folds</text>\n";

  // Operating point marker.
  if (c0 >= 1 && c0 <= n)
    s += "<line x1=\"" + num(px(c0)) + "\" y1=\"" + num(top) + "\" x2=\"" + num(px(c0)) + "\" y2=\"" +
         num(top + plot_h) + "\" stroke=\"red\" stroke-width=\"2\"/>\n";

  struct Series {
    const char* label;
    const char* color;
    double (*get)(const SweepPoint&);
  };
  const Series series[] = {
      {"Accuracy", "#1f77b4", [](const SweepPoint& p) { return p.accuracy.mean; }},
      {"Recall", "#2ca02c", [](const SweepPoint& p) { return p.recall.mean; }},
      {"Specificity", "#ff7f0e", [](const SweepPoint& p) { return p.specificity.mean; }},
  };
  for (const auto& ser : series) {
    s += "<polyline fill=\"none\" stroke=\"" + std::string(ser.color) + "\" stroke-width=\"2\" points=\"";
    for (int i = 0; i < n; ++i) {
      const auto& p = curve.points[static_cast<std::size_t>(i)];
      s += (i ? " " : "") + num(px(p.component_count)) + "," + num(py(ser.get(p)));
    }
    s += "\"/>\n";
  }

  // Legend.
  double ly = top + 10;
  for (const auto& ser : series) {
    s += "<line x1=\"" + num(left + plot_w + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + plot_w + 40) +
         "\" y2=\"" + num(ly) + "\" stroke=\"" + ser.color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + num(left + plot_w + 46) + "\" y=\"" + num(ly + 4) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + ser.label + "</text>\n";
    ly += 20;
  }
  s += "<line x1=\"" + num(left + plot_w + 15) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(left + plot_w + 40) +
       "\" y2=\"" + num(ly) + "\" stroke=\"red\" stroke-width=\"2\"/>\n";
  s += "<text x=\"" + num(left + plot_w + 46) + "\" y=\"" + num(ly + 4) +
       "\" font-family=\"sans-serif\" font-size=\"12\">C0 = " + std::to_string(c0) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace cmc
