#include "scc5g/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "scc5g/errors.hpp"

namespace scc5g::plot {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const Series& s) {
  if (s.x.empty() || s.x.size() != s.y.size())
    throw Error(ErrorClass::InvalidArgument, "series must be non-empty and aligned");

  double xmin = *std::min_element(s.x.begin(), s.x.end());
  double xmax = *std::max_element(s.x.begin(), s.x.end());
  double ymin = *std::min_element(s.y.begin(), s.y.end());
  double ymax = *std::max_element(s.y.begin(), s.y.end());
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  // Headroom so the curve does not sit on the frame.
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
         fmt(kHeight) + "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";

  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop + ph) + "\" x2=\"" + fmt(kLeft + pw) +
         "\" y2=\"" + fmt(kTop + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) +
         "\" y2=\"" + fmt(kTop + ph) + "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double tx = xmin + (xmax - xmin) * i / 4;
    const double ty = ymin + (ymax - ymin) * i / 4;
    svg += "<text x=\"" + fmt(px(tx)) + "\" y=\"" + fmt(kTop + ph + 18) +
           "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" + fmt(tx) +
           "</text>\n";
    svg += "<text x=\"" + fmt(kLeft - 8) + "\" y=\"" + fmt(py(ty) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" + fmt(ty) +
           "</text>\n";
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py(ty)) + "\" x2=\"" + fmt(kLeft + pw) +
           "\" y2=\"" + fmt(py(ty)) + "\" stroke=\"#dddddd\"/>\n";
  }

  svg += "<text x=\"" + fmt(kLeft + pw / 2) + "\" y=\"" + fmt(kHeight - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">" + x_label +
         "</text>\n";
  svg += "<text x=\"16\" y=\"" + fmt(kTop + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" transform=\"rotate(-90 16 " +
         fmt(kTop + ph / 2) + ")\">" + y_label + "</text>\n";

  std::string points;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    if (i) points += " ";
    points += fmt(px(s.x[i])) + "," + fmt(py(s.y[i]));
  }
  svg += "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" points=\"" + points +
         "\"/>\n";
  for (std::size_t i = 0; i < s.x.size(); ++i)
    svg += "<circle cx=\"" + fmt(px(s.x[i])) + "\" cy=\"" + fmt(py(s.y[i])) +
           "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace scc5g::plot
