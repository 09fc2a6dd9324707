// Hand-emitted SVG log-log plots for convergence and sweep curves.

#ifndef HDGFLOW_PLOT_SVG_HPP
#define HDGFLOW_PLOT_SVG_HPP

#include <string>
#include <vector>

namespace hdgflow {

struct PlotSeries {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x;
  std::vector<double> y;
};

/// Log-log plot with decade ticks; reference slopes are drawn as annotated
/// guide lines anchored at the last point of the first series.
void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series,
                      const std::vector<double>& reference_slopes = {});

}  // namespace hdgflow

#endif
