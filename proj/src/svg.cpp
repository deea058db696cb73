#include "sparsedyn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace sparsedyn {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<SvgSeries>& series,
                           bool log_y) {
  const double width = 720, height = 440;
  const double ml = 70, mr = 160, mt = 40, mb = 55;
  const double pw = width - ml - mr, ph = height - mt - mb;

  auto usable = [&](double y) { return std::isfinite(y) && (!log_y || y > 0.0); };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !usable(y)) continue;
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      const double yv = log_y ? std::log10(y) : y;
      ymin = std::min(ymin, yv);
      ymax = std::max(ymax, yv);
    }
  }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) {
    xmax += 0.5;
    xmin -= 0.5;
  }
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) {
    const double yv = log_y ? std::log10(y) : y;
    return mt + ph - (yv - ymin) / (ymax - ymin) * ph;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << (ml + pw / 2) << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\">"
      << title << "</text>\n";

  // axes
  out << "<line x1=\"" << ml << "\" y1=\"" << (mt + ph) << "\" x2=\"" << (ml + pw) << "\" y2=\""
      << (mt + ph) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << (mt + ph)
      << "\" stroke=\"black\"/>\n";

  const int n_ticks = 5;
  for (int i = 0; i <= n_ticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / n_ticks;
    const double gx = px(fx);
    out << "<line x1=\"" << gx << "\" y1=\"" << (mt + ph) << "\" x2=\"" << gx << "\" y2=\""
        << (mt + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << gx << "\" y=\"" << (mt + ph + 20)
        << "\" font-size=\"11\" text-anchor=\"middle\" font-family=\"sans-serif\">" << fmt(fx)
        << "</text>\n";

    const double fyv = ymin + (ymax - ymin) * i / n_ticks;
    const double fy = log_y ? std::pow(10.0, fyv) : fyv;
    const double gy = mt + ph - (fyv - ymin) / (ymax - ymin) * ph;
    out << "<line x1=\"" << (ml - 5) << "\" y1=\"" << gy << "\" x2=\"" << ml << "\" y2=\"" << gy
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (ml - 8) << "\" y=\"" << (gy + 4)
        << "\" font-size=\"11\" text-anchor=\"end\" font-family=\"sans-serif\">" << fmt(fy)
        << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << gy << "\" x2=\"" << (ml + pw) << "\" y2=\"" << gy
        << "\" stroke=\"#dddddd\" stroke-dasharray=\"3,3\"/>\n";
  }

  out << "<text x=\"" << (ml + pw / 2) << "\" y=\"" << (height - 12)
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">" << x_label
      << "</text>\n";
  out << "<text x=\"16\" y=\"" << (mt + ph / 2)
      << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 "
      << (mt + ph / 2) << ")\">" << y_label << (log_y ? " (log scale)" : "") << "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::ostringstream pts;
    for (const auto& [x, y] : series[si].points) {
      if (!std::isfinite(x) || !usable(y)) continue;
      pts << px(x) << "," << py(y) << " ";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
        << pts.str() << "\"/>\n";
    for (const auto& [x, y] : series[si].points) {
      if (!std::isfinite(x) || !usable(y)) continue;
      out << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = mt + 16 + 18 * static_cast<double>(si);
    out << "<line x1=\"" << (ml + pw + 12) << "\" y1=\"" << ly << "\" x2=\"" << (ml + pw + 36)
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << (ml + pw + 42) << "\" y=\"" << (ly + 4)
        << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[si].label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sparsedyn
