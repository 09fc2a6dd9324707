#include "hdgflow/plot_svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hdgflow {

void write_loglog_svg(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<PlotSeries>& series,
                      const std::vector<double>& reference_slopes) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_loglog_svg: cannot open " + path);

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const PlotSeries& s : series)
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (xmin > xmax || ymin > ymax) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  xmin = std::floor(xmin - 0.05);
  xmax = std::ceil(xmax + 0.05);
  ymin = std::floor(ymin - 0.05);
  ymax = std::ceil(ymax + 0.05);

  const double W = 640, H = 480, ml = 70, mr = 140, mt = 40, mb = 55;
  const auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
  const auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";

  // frame and decade grid
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
      << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d) {
    out << "<line x1=\"" << px(d) << "\" y1=\"" << py(ymin) << "\" x2=\"" << px(d) << "\" y2=\""
        << py(ymax) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << px(d) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
    out << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(d) << "\" x2=\"" << px(xmax)
        << "\" y2=\"" << py(d) << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << py(d) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">1e" << d << "</text>\n";
  }
  out << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
  out << "<text x=\"18\" y=\"" << (mt + H - mb) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (mt + H - mb) / 2 << ")\">" << ylabel << "</text>\n";

  int legend_row = 0;
  for (const PlotSeries& s : series) {
    std::ostringstream poly;
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      poly << px(std::log10(s.x[i])) << "," << py(std::log10(s.y[i])) << " ";
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\""
        << poly.str() << "\"/>\n";
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (s.x[i] <= 0 || s.y[i] <= 0) continue;
      out << "<circle cx=\"" << px(std::log10(s.x[i])) << "\" cy=\"" << py(std::log10(s.y[i]))
          << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    }
    const double ly = mt + 14 + 16 * legend_row++;
    out << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr + 30
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << W - mr + 35 << "\" y=\"" << ly << "\" font-size=\"11\">" << s.label
        << "</text>\n";
  }

  // reference slope guides anchored near the first series' finest point
  if (!series.empty() && series[0].x.size() >= 2) {
    double x1 = 1e300, y1 = 0;
    for (size_t i = 0; i < series[0].x.size(); ++i)
      if (series[0].x[i] > 0 && series[0].x[i] < x1) {
        x1 = series[0].x[i];
        y1 = series[0].y[i];
      }
    for (double slope : reference_slopes) {
      const double lx1 = std::log10(x1), lx2 = lx1 + 0.5;
      const double ly1 = std::log10(y1 * 0.5), ly2 = ly1 + slope * 0.5;
      out << "<line x1=\"" << px(lx1) << "\" y1=\"" << py(ly1) << "\" x2=\"" << px(lx2)
          << "\" y2=\"" << py(ly2) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
      out << "<text x=\"" << px(lx2) + 4 << "\" y=\"" << py(ly2)
          << "\" font-size=\"10\" fill=\"#555555\">slope " << slope << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace hdgflow
