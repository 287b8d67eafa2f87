#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "entikit/common.hpp"

namespace entikit::plotting {

struct Series {
  std::string name;
  std::vector<std::array<double, 2>> points;
};

struct PlotOptions {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "y";
  bool log_x = false;
  int width = 860;
  int height = 520;
};

/// Self-contained SVG line chart with axes, ticks and a legend. Output is
/// byte-deterministic for identical inputs. Throws ValidationError on an
/// empty series list, an empty series, or nonpositive x with log_x.
std::string render_line_chart(std::span<const Series> series,
                              const PlotOptions& options);

/// Renders and writes the chart; throws Error if the path is unwritable.
void plot_curves(std::span<const Series> series,
                 const std::filesystem::path& output,
                 const PlotOptions& options);

}  // namespace entikit::plotting
