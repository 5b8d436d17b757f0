#include "bnpnc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "bnpnc/errors.hpp"

namespace bnpnc {
namespace svg_plot {

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void include(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad(double fraction) {
    if (!(hi > lo)) {
      const double c = std::isfinite(lo) ? lo : 0.0;
      lo = c - 1.0;
      hi = c + 1.0;
      return;
    }
    const double span = hi - lo;
    lo -= fraction * span;
    hi += fraction * span;
  }
};

double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double mult = 10.0;
  if (norm <= 1.0) {
    mult = 1.0;
  } else if (norm <= 2.0) {
    mult = 2.0;
  } else if (norm <= 5.0) {
    mult = 5.0;
  }
  return mult * mag;
}

std::string tick_label(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

std::string band_fill(const std::string& color, double opacity) {
  std::ostringstream out;
  out << "fill=\"" << color << "\" fill-opacity=\"" << opacity << "\" stroke=\"none\"";
  return out.str();
}

}  // namespace

void write_svg(const std::string& path, const PlotSpec& spec) {
  if (spec.curves.empty() && spec.truth.size() == 0) {
    throw ValidationError("nothing to plot");
  }
  Range xr, yr;
  for (const auto& curve : spec.curves) {
    if (curve.grid.size() == 0) {
      throw ValidationError("curve '" + curve.label + "' has an empty grid");
    }
    for (Eigen::Index g = 0; g < curve.grid.size(); ++g) {
      xr.include(curve.grid[g]);
      yr.include(curve.median[g]);
    }
    for (Eigen::Index l = 0; l < curve.lower.rows(); ++l) {
      for (Eigen::Index g = 0; g < curve.grid.size(); ++g) {
        yr.include(curve.lower(l, g));
        yr.include(curve.upper(l, g));
      }
    }
  }
  for (Eigen::Index g = 0; g < spec.truth_grid.size(); ++g) {
    xr.include(spec.truth_grid[g]);
    yr.include(spec.truth[g]);
  }
  xr.pad(0.05);
  yr.pad(0.05);

  const double ml = 70, mr = 20, mt = spec.title.empty() ? 20 : 44, mb = 52;
  const double pw = spec.width - ml - mr;
  const double ph = spec.height - mt - mb;
  auto px = [&](double x) { return ml + pw * (x - xr.lo) / (xr.hi - xr.lo); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - yr.lo) / (yr.hi - yr.lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
      << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!spec.title.empty()) {
    svg << "<text x=\"" << spec.width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << spec.title << "</text>\n";
  }

  // gridlines + ticks
  const double xstep = nice_step(xr.hi - xr.lo, 6);
  const double ystep = nice_step(yr.hi - yr.lo, 6);
  svg << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
  for (double t = std::ceil(xr.lo / xstep) * xstep; t <= xr.hi + 1e-9 * xstep; t += xstep) {
    const double gx = px(t);
    svg << "<line x1=\"" << gx << "\" y1=\"" << mt << "\" x2=\"" << gx << "\" y2=\"" << mt + ph
        << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << gx << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">"
        << tick_label(t) << "</text>\n";
  }
  for (double t = std::ceil(yr.lo / ystep) * ystep; t <= yr.hi + 1e-9 * ystep; t += ystep) {
    const double gy = py(t);
    svg << "<line x1=\"" << ml << "\" y1=\"" << gy << "\" x2=\"" << ml + pw << "\" y2=\"" << gy
        << "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    svg << "<text x=\"" << ml - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
        << tick_label(t) << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";

  // bands widest-first so narrower levels sit on top
  for (const auto& curve : spec.curves) {
    std::vector<size_t> order(curve.levels.size());
    for (size_t l = 0; l < order.size(); ++l) {
      order[l] = l;
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return curve.levels[a] > curve.levels[b];
    });
    for (size_t rank = 0; rank < order.size(); ++rank) {
      const auto l = static_cast<Eigen::Index>(order[rank]);
      svg << "<path d=\"";
      for (Eigen::Index g = 0; g < curve.grid.size(); ++g) {
        svg << (g == 0 ? 'M' : 'L') << px(curve.grid[g]) << ' ' << py(curve.lower(l, g)) << ' ';
      }
      for (Eigen::Index g = curve.grid.size() - 1; g >= 0; --g) {
        svg << 'L' << px(curve.grid[g]) << ' ' << py(curve.upper(l, g)) << ' ';
      }
      svg << "Z\" " << band_fill(curve.color, 0.10 + 0.07 * static_cast<double>(rank)) << "/>\n";
    }
  }

  auto polyline = [&](const Eigen::VectorXd& grid, const Eigen::VectorXd& values,
                      const std::string& style) {
    svg << "<path d=\"";
    bool pen_down = false;
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
      if (!std::isfinite(values[g])) {
        pen_down = false;
        continue;
      }
      svg << (pen_down ? 'L' : 'M') << px(grid[g]) << ' ' << py(values[g]) << ' ';
      pen_down = true;
    }
    svg << "\" fill=\"none\" " << style << "/>\n";
  };
  for (const auto& curve : spec.curves) {
    polyline(curve.grid, curve.median,
             "stroke=\"" + curve.color + "\" stroke-width=\"2\"");
  }
  if (spec.truth.size() > 0) {
    polyline(spec.truth_grid, spec.truth, "stroke=\"#d62728\" stroke-width=\"2\"");
  }

  // axis labels
  svg << "<text x=\"" << ml + pw / 2 << "\" y=\"" << spec.height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << spec.x_label
      << "</text>\n";
  svg << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << spec.y_label << "</text>\n";

  // legend
  double ly = mt + 14;
  const double lx = ml + pw - 150;
  auto legend_entry = [&](const std::string& color, const std::string& label) {
    svg << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 26 << "\" y2=\""
        << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    svg << "<text x=\"" << lx + 32 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << label << "</text>\n";
    ly += 18;
  };
  for (const auto& curve : spec.curves) {
    legend_entry(curve.color, curve.label);
  }
  if (spec.truth.size() > 0) {
    legend_entry("#d62728", spec.truth_label);
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << svg.str();
  if (!out) {
    throw IoError("write to '" + path + "' failed");
  }
}

}  // namespace svg_plot
}  // namespace bnpnc
