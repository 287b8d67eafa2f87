#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "entikit/svg_plot.hpp"

using namespace entikit;
using namespace entikit::plotting;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("empty input rejected") {
  std::vector<Series> none;
  CHECK_THROWS_AS(render_line_chart(none, {}), ValidationError);
  std::vector<Series> has_empty{{"a", {}}};
  CHECK_THROWS_AS(render_line_chart(has_empty, {}), ValidationError);
}

TEST_CASE("two points give a single polyline") {
  std::vector<Series> series{{"line", {{0.0, 1.0}, {2.0, 3.0}}}};
  auto svg = render_line_chart(series, {});
  std::size_t count = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    ++count;
    ++pos;
  }
  CHECK(count == 1);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("log x requires positive values") {
  PlotOptions opts;
  opts.log_x = true;
  std::vector<Series> series{{"bad", {{0.0, 1.0}, {2.0, 3.0}}}};
  CHECK_THROWS_AS(render_line_chart(series, opts), ValidationError);
}

TEST_CASE("unwritable path raises") {
  std::vector<Series> series{{"line", {{0.0, 1.0}, {2.0, 3.0}}}};
  CHECK_THROWS_AS(plot_curves(series, "/nonexistent-dir/out.svg", {}), Error);
}

TEST_CASE("fixed input matches the reviewed golden file") {
  std::vector<Series> series{
      {"analytical", {{1.0, 0.03}, {10.0, 0.12}, {100.0, 0.65}, {1000.0, 0.88}}},
      {"simulated", {{1.0, 0.031}, {10.0, 0.1}, {100.0, 0.6}, {1000.0, 0.885}}},
  };
  PlotOptions opts;
  opts.title = "link density";
  opts.x_label = "steps";
  opts.y_label = "accuracy";
  opts.log_x = true;
  auto svg = render_line_chart(series, opts);
  auto golden_path = std::filesystem::path(ENTIKIT_GOLDEN_DIR) / "chart.svg";
  CHECK(svg == read_file(golden_path));
}
