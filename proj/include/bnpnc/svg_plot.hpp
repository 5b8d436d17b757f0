#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace bnpnc {
namespace svg_plot {

// One exposure-response curve with optional nested credible bands
// (levels ascending; lower/upper rows align with levels).
struct PlotCurve {
  std::string label;
  std::string color;  // CSS color, e.g. "#1f77b4"
  Eigen::VectorXd grid;
  Eigen::VectorXd median;
  std::vector<double> levels;
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;
};

struct PlotSpec {
  std::vector<PlotCurve> curves;
  Eigen::VectorXd truth_grid;  // size 0 = no truth curve
  Eigen::VectorXd truth;
  std::string truth_label = "truth";
  std::string x_label = "exposure";
  std::string y_label = "E[Y(x)]";
  std::string title;
  int width = 860;
  int height = 560;
};

// Writes a self-contained static SVG: shaded nested bands, median polylines,
// optional truth curve, axes with tick labels, legend. Axis ranges cover the
// data extent padded by 5%.
void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace svg_plot
}  // namespace bnpnc
