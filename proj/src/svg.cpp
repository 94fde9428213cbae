#include "plap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace plap {
namespace {

constexpr double kWidth = 720.0, kHeight = 480.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 55.0;

const char* kPalette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                           "#9467bd", "#ff7f0e", "#17becf"};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

struct AxisRange {
  double lo = 0.0, hi = 1.0;
  bool log = false;

  // Transformed coordinate of a data value; NaN when not plottable.
  double t(double v) const {
    if (log) return v > 0.0 ? std::log10(v) : std::numeric_limits<double>::quiet_NaN();
    return v;
  }
  double unit(double v) const { return (t(v) - lo) / (hi - lo); }
  double tick_value(double tt) const { return log ? std::pow(10.0, tt) : tt; }
};

AxisRange fit_range(const std::vector<SvgSeries>& series, bool take_x,
                    bool log) {
  AxisRange r;
  r.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const SvgSeries& s : series) {
    const std::vector<double>& v = take_x ? s.x : s.y;
    for (double q : v) {
      const double tt = r.t(q);
      if (!std::isfinite(tt)) continue;
      lo = std::min(lo, tt);
      hi = std::max(hi, tt);
    }
  }
  if (!(lo <= hi)) {  // nothing plottable
    lo = log ? 0.0 : 0.0;
    hi = log ? 1.0 : 1.0;
  }
  if (hi - lo < 1e-12) {
    const double pad = std::max(1.0, std::fabs(lo)) * 0.05;
    lo -= pad;
    hi += pad;
  } else {
    const double pad = (hi - lo) * 0.05;
    lo -= pad;
    hi += pad;
  }
  r.lo = lo;
  r.hi = hi;
  return r;
}

}  // namespace

std::string line_plot_svg(const std::string& title, const SvgAxes& axes,
                          const std::vector<SvgSeries>& series) {
  const AxisRange rx = fit_range(series, true, axes.log_x);
  const AxisRange ry = fit_range(series, false, axes.log_y);
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto px = [&](double v) { return kLeft + rx.unit(v) * plot_w; };
  const auto py = [&](double v) {
    return kTop + (1.0 - ry.unit(v)) * plot_h;
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       fmt("%g", kWidth) + "\" height=\"" + fmt("%g", kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt("%g", kWidth / 2) +
       "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">" +
       xml_escape(title) + "</text>\n";

  // Frame and ticks.
  s += "<rect x=\"" + fmt("%g", kLeft) + "\" y=\"" + fmt("%g", kTop) +
       "\" width=\"" + fmt("%g", plot_w) + "\" height=\"" + fmt("%g", plot_h) +
       "\" fill=\"none\" stroke=\"black\"/>\n";
  const int nticks = 5;
  for (int k = 0; k < nticks; ++k) {
    const double f = static_cast<double>(k) / (nticks - 1);
    const double tx = rx.lo + f * (rx.hi - rx.lo);
    const double ty = ry.lo + f * (ry.hi - ry.lo);
    const double xp = kLeft + f * plot_w;
    const double yp = kTop + (1.0 - f) * plot_h;
    s += "<line x1=\"" + fmt("%.2f", xp) + "\" y1=\"" +
         fmt("%.2f", kTop + plot_h) + "\" x2=\"" + fmt("%.2f", xp) +
         "\" y2=\"" + fmt("%.2f", kTop + plot_h + 5) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt("%.2f", xp) + "\" y=\"" +
         fmt("%.2f", kTop + plot_h + 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"11\">" +
         fmt("%.4g", rx.tick_value(tx)) + "</text>\n";
    s += "<line x1=\"" + fmt("%.2f", kLeft - 5) + "\" y1=\"" +
         fmt("%.2f", yp) + "\" x2=\"" + fmt("%.2f", kLeft) + "\" y2=\"" +
         fmt("%.2f", yp) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt("%.2f", kLeft - 8) + "\" y=\"" +
         fmt("%.2f", yp + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" "
         "font-size=\"11\">" +
         fmt("%.4g", ry.tick_value(ty)) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%g", kLeft + plot_w / 2) + "\" y=\"" +
       fmt("%g", kHeight - 12) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\">" +
       xml_escape(axes.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt("%g", kTop + plot_h / 2) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"13\" transform=\"rotate(-90 16 " +
       fmt("%g", kTop + plot_h / 2) + ")\">" + xml_escape(axes.y_label) +
       "</text>\n";

  // Series.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const SvgSeries& sr = series[si];
    const char* color = kPalette[si % 6];
    std::string pts;
    for (std::size_t k = 0; k < sr.x.size() && k < sr.y.size(); ++k) {
      const double tx = rx.t(sr.x[k]), ty = ry.t(sr.y[k]);
      if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
      const double xp = px(sr.x[k]), yp = py(sr.y[k]);
      pts += fmt("%.2f", xp) + "," + fmt("%.2f", yp) + " ";
      s += "<circle cx=\"" + fmt("%.2f", xp) + "\" cy=\"" + fmt("%.2f", yp) +
           "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
    }
    if (!pts.empty()) {
      pts.pop_back();
      s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    }
    // Legend entry.
    const double ly = kTop + 14 + 16 * static_cast<double>(si);
    s += "<line x1=\"" + fmt("%g", kLeft + plot_w - 150) + "\" y1=\"" +
         fmt("%.2f", ly - 4) + "\" x2=\"" + fmt("%g", kLeft + plot_w - 130) +
         "\" y2=\"" + fmt("%.2f", ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt("%g", kLeft + plot_w - 125) + "\" y=\"" +
         fmt("%.2f", ly) +
         "\" font-family=\"sans-serif\" font-size=\"11\">" +
         xml_escape(sr.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace plap
