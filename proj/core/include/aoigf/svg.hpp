#pragma once

#include <string>
#include <utility>
#include <vector>

namespace aoigf {

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // non-finite y are skipped
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
};

// Static line chart, written directly; no plotting dependency.
void write_svg_chart(const std::string& path, const SvgChart& chart);

}  // namespace aoigf
