#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "pacbayes/experiment.hpp"

namespace pacbayes {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 460;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 170;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

std::string fmt(double v, const char* spec = "%.2f") {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), spec, v);
  return buffer;
}

struct Series {
  const char* label;
  const char* color;
  std::vector<double> values;
};

}  // namespace

std::string results_svg(const ExperimentResult& result) {
  std::vector<double> ms;
  for (const ExperimentRow& row : result.rows) ms.push_back(row.n_samples);

  std::vector<Series> series{
      {"train risk", "#1f77b4", {}}, {"test risk", "#ff7f0e", {}},
      {"UC bound", "#2ca02c", {}},   {"WPB bound", "#d62728", {}},
      {"KLPB bound", "#9467bd", {}}};
  for (const ExperimentRow& row : result.rows) {
    series[0].values.push_back(row.train_risk.mean);
    series[1].values.push_back(row.test_risk.mean);
    series[2].values.push_back(row.uc_bound.mean);
    series[3].values.push_back(row.wpb_bound.mean);
    if (row.klpb_bound) series[4].values.push_back(row.klpb_bound->mean);
  }
  if (series[4].values.size() != ms.size()) series[4].values.clear();  // undefined column

  double y_max = 0.0;
  for (const Series& s : series) {
    for (double v : s.values) y_max = std::max(y_max, v);
  }
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.05;
  const double x_min = ms.front();
  const double x_max = ms.back() > ms.front() ? ms.back() : ms.front() + 1.0;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double m) {
    return kMarginLeft + (m - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double v) { return kMarginTop + (1.0 - v / y_max) * plot_h; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kWidth) +
         "\" height=\"" + std::to_string(kHeight) + "\" viewBox=\"0 0 " +
         std::to_string(kWidth) + " " + std::to_string(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  svg += "<line x1=\"" + fmt(sx(x_min)) + "\" y1=\"" + fmt(sy(0)) + "\" x2=\"" +
         fmt(sx(x_max)) + "\" y2=\"" + fmt(sy(0)) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(sx(x_min)) + "\" y1=\"" + fmt(sy(0)) + "\" x2=\"" +
         fmt(sx(x_min)) + "\" y2=\"" + fmt(sy(y_max)) + "\" stroke=\"black\"/>\n";

  // x ticks at the m values
  for (double m : ms) {
    svg += "<line x1=\"" + fmt(sx(m)) + "\" y1=\"" + fmt(sy(0)) + "\" x2=\"" + fmt(sx(m)) +
           "\" y2=\"" + fmt(sy(0) + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(sx(m)) + "\" y=\"" + fmt(sy(0) + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + fmt(m, "%.0f") + "</text>\n";
  }
  svg += "<text x=\"" + fmt(kMarginLeft + plot_w / 2) + "\" y=\"" +
         fmt(static_cast<double>(kHeight) - 10) +
         "\" font-size=\"13\" text-anchor=\"middle\">number of samples</text>\n";

  // y ticks, 5 divisions
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = y_max * tick / 5.0;
    svg += "<line x1=\"" + fmt(sx(x_min) - 5) + "\" y1=\"" + fmt(sy(v)) + "\" x2=\"" +
           fmt(sx(x_min)) + "\" y2=\"" + fmt(sy(v)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(sx(x_min) - 9) + "\" y=\"" + fmt(sy(v) + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + fmt(v, "%.3f") + "</text>\n";
  }

  int legend_slot = 0;
  for (const Series& s : series) {
    if (s.values.empty()) continue;
    std::string points;
    for (std::size_t i = 0; i < ms.size(); ++i) {
      if (!points.empty()) points += " ";
      points += fmt(sx(ms[i])) + "," + fmt(sy(s.values[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(s.color) +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    for (std::size_t i = 0; i < ms.size(); ++i) {
      svg += "<circle cx=\"" + fmt(sx(ms[i])) + "\" cy=\"" + fmt(sy(s.values[i])) +
             "\" r=\"3\" fill=\"" + std::string(s.color) + "\"/>\n";
    }
    const double ly = kMarginTop + 18.0 * legend_slot;
    const double lx = kWidth - kMarginRight + 16.0;
    svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 22) +
           "\" y2=\"" + fmt(ly) + "\" stroke=\"" + std::string(s.color) +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt(lx + 28) + "\" y=\"" + fmt(ly + 4) + "\" font-size=\"12\">" +
           std::string(s.label) + "</text>\n";
    ++legend_slot;
  }

  svg += "</svg>\n";
  return svg;
}

}  // namespace pacbayes
