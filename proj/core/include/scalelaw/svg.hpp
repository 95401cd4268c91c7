#pragma once

#include <string>
#include <vector>

namespace scalelaw::svg {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  double yerr_lo = 0.0;  // absolute offsets; 0 means no bar
  double yerr_hi = 0.0;
};

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  bool line = true;
  bool markers = true;
  bool dashed = false;
  std::vector<DataPoint> points;
};

/// Minimal self-contained chart renderer: log or linear axes, decade
/// ticks, error bars, legend. Output is deterministic; the generator
/// comment can be suppressed for byte-stable artifacts.
struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  bool log_y = true;
  int width = 720;
  int height = 480;
  std::vector<Series> series;
  std::vector<std::string> annotations;  // extra legend lines

  std::string render(bool with_timestamp = false) const;
};

}  // namespace scalelaw::svg
