#include "entikit/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace entikit::plotting {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                                    "#d62728", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f"};
constexpr int kMarginLeft = 72;
constexpr int kMarginRight = 24;
constexpr int kMarginTop = 42;
constexpr int kMarginBottom = 54;

std::string num(double v) { return format_fixed(v, 2); }

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string render_line_chart(std::span<const Series> series,
                              const PlotOptions& options) {
  if (series.empty()) throw ValidationError("plot: no series given");
  for (const auto& s : series)
    if (s.points.empty()) throw ValidationError("plot: series '" + s.name + "' is empty");

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      double x = p[0];
      if (options.log_x) {
        if (!(x > 0.0))
          throw ValidationError("plot: log_x requires strictly positive x");
        x = std::log10(x);
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, p[1]);
      y_max = std::max(y_max, p[1]);
    }
  }
  if (x_max - x_min < 1e-12) { x_min -= 1.0; x_max += 1.0; }
  if (y_max - y_min < 1e-12) { y_min -= 1.0; y_max += 1.0; }
  double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = options.width - kMarginLeft - kMarginRight;
  const double plot_h = options.height - kMarginTop - kMarginBottom;
  auto sx = [&](double x) {
    if (options.log_x) x = std::log10(x);
    return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w;
  };
  auto sy = [&](double y) {
    return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h;
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(options.width) + "\" height=\"" +
         std::to_string(options.height) + "\" viewBox=\"0 0 " +
         std::to_string(options.width) + " " + std::to_string(options.height) +
         "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg += "<text x=\"" + num(options.width / 2.0) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + escape_xml(options.title) + "</text>\n";
  }

  // Axes frame and ticks.
  svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) +
         "\" width=\"" + num(plot_w) + "\" height=\"" + num(plot_h) +
         "\" fill=\"none\" stroke=\"#333333\"/>\n";
  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    double fx = x_min + (x_max - x_min) * i / ticks;
    double px = kMarginLeft + plot_w * i / ticks;
    double label = options.log_x ? std::pow(10.0, fx) : fx;
    svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kMarginTop + plot_h) +
           "\" x2=\"" + num(px) + "\" y2=\"" + num(kMarginTop + plot_h + 5) +
           "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + num(px) + "\" y=\"" + num(kMarginTop + plot_h + 20) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           tick_label(label) + "</text>\n";
    double fy = y_min + (y_max - y_min) * i / ticks;
    double py = kMarginTop + plot_h - plot_h * i / ticks;
    svg += "<line x1=\"" + num(kMarginLeft - 5) + "\" y1=\"" + num(py) +
           "\" x2=\"" + num(kMarginLeft) + "\" y2=\"" + num(py) +
           "\" stroke=\"#333333\"/>\n";
    svg += "<text x=\"" + num(kMarginLeft - 8) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           tick_label(fy) + "</text>\n";
  }
  svg += "<text x=\"" + num(kMarginLeft + plot_w / 2) + "\" y=\"" +
         num(options.height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         escape_xml(options.x_label) + (options.log_x ? " (log scale)" : "") +
         "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(kMarginTop + plot_h / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 16 " + num(kMarginTop + plot_h / 2) + ")\">" +
         escape_xml(options.y_label) + "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    std::string pts;
    for (const auto& p : series[s].points) {
      if (!pts.empty()) pts += ' ';
      pts += num(sx(p[0])) + "," + num(sy(p[1]));
    }
    svg += "<polyline fill=\"none\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"1.6\" points=\"" + pts + "\"/>\n";
  }

  // Legend, top-right inside the frame.
  double lx = kMarginLeft + plot_w - 170;
  double ly = kMarginTop + 12;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % std::size(kPalette)];
    double y = ly + 16.0 * static_cast<double>(s);
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(lx + 22) + "\" y2=\"" + num(y) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(y + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" +
           escape_xml(series[s].name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void plot_curves(std::span<const Series> series,
                 const std::filesystem::path& output,
                 const PlotOptions& options) {
  std::string svg = render_line_chart(series, options);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw Error("plot: cannot open output path " + output.string());
  out << svg;
  out.flush();
  if (!out) throw Error("plot: write failed for " + output.string());
}

}  // namespace entikit::plotting
