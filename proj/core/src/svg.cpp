#include "scalelaw/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>

namespace scalelaw::svg {

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = true;
  double lo = 0.0, hi = 1.0;   // data range (transformed if log)
  double p0 = 0.0, p1 = 1.0;   // pixel range

  double transform(double v) const { return log ? std::log10(v) : v; }
  double to_px(double v) const {
    double t = transform(v);
    if (hi == lo) return 0.5 * (p0 + p1);
    return p0 + (t - lo) / (hi - lo) * (p1 - p0);
  }
};

std::string tick_label(bool log, double t) {
  if (log) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "1e%d", int(std::lround(t)));
    return buf;
  }
  return fmt(t);
}

}  // namespace

std::string Chart::render(bool with_timestamp) const {
  const double ml = 70, mr = 20, mt = title.empty() ? 20 : 40, mb = 50;
  Axis xa, ya;
  xa.log = log_x;
  ya.log = log_y;

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      double tx = xa.transform(p.x);
      xlo = std::min(xlo, tx);
      xhi = std::max(xhi, tx);
      double lo_v = p.y - p.yerr_lo, hi_v = p.y + p.yerr_hi;
      if (log_y) lo_v = std::max(lo_v, 1e-300);
      ylo = std::min(ylo, ya.transform(lo_v));
      yhi = std::max(yhi, ya.transform(hi_v));
    }
  }
  if (!(xlo <= xhi)) { xlo = 0; xhi = 1; }
  if (!(ylo <= yhi)) { ylo = 0; yhi = 1; }
  double xpad = (xhi - xlo) * 0.05 + 1e-12;
  double ypad = (yhi - ylo) * 0.08 + 1e-12;
  xa.lo = xlo - xpad; xa.hi = xhi + xpad;
  ya.lo = ylo - ypad; ya.hi = yhi + ypad;
  xa.p0 = ml; xa.p1 = width - mr;
  ya.p0 = height - mb; ya.p1 = mt;   // y grows downward in SVG

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  if (with_timestamp) {
    std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    out << "<!-- generated " << buf << " -->\n";
  }
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";

  // Frame.
  out << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\""
      << fmt(width - ml - mr) << "\" height=\"" << fmt(height - mt - mb)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // Ticks: decades on log axes, ~6 round steps otherwise.
  auto emit_ticks = [&](const Axis& axis, bool horizontal) {
    double span = axis.hi - axis.lo;
    double step;
    if (axis.log) {
      step = std::max(1.0, std::ceil(span / 8.0));
    } else {
      double raw = span / 6.0;
      double mag = std::pow(10.0, std::floor(std::log10(raw)));
      step = std::ceil(raw / mag) * mag;
    }
    double first = std::ceil(axis.lo / step) * step;
    for (double t = first; t <= axis.hi + 1e-12 * span; t += step) {
      double px = axis.p0 + (t - axis.lo) / span * (axis.p1 - axis.p0);
      if (horizontal) {
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(height - mb)
            << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(height - mb + 5)
            << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(height - mb + 18)
            << "\" font-size=\"11\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\">"
            << escape(tick_label(axis.log, t)) << "</text>\n";
      } else {
        out << "<line x1=\"" << fmt(ml - 5) << "\" y1=\"" << fmt(px)
            << "\" x2=\"" << fmt(ml) << "\" y2=\"" << fmt(px)
            << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << fmt(ml - 8) << "\" y=\"" << fmt(px + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" "
               "font-family=\"sans-serif\">"
            << escape(tick_label(axis.log, t)) << "</text>\n";
      }
    }
  };
  emit_ticks(xa, true);
  emit_ticks(ya, false);

  // Series.
  for (const auto& s : series) {
    if (s.points.size() > 1 && s.line) {
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\"";
      if (s.dashed) out << " stroke-dasharray=\"6 4\"";
      out << " points=\"";
      for (const auto& p : s.points) {
        out << fmt(xa.to_px(p.x)) << "," << fmt(ya.to_px(p.y)) << " ";
      }
      out << "\"/>\n";
    }
    for (const auto& p : s.points) {
      double px = xa.to_px(p.x), py = ya.to_px(p.y);
      if (p.yerr_lo > 0.0 || p.yerr_hi > 0.0) {
        double lo_v = p.y - p.yerr_lo;
        if (log_y) lo_v = std::max(lo_v, 1e-300);
        double y0 = ya.to_px(lo_v), y1 = ya.to_px(p.y + p.yerr_hi);
        out << "<line x1=\"" << fmt(px) << "\" y1=\"" << fmt(y0)
            << "\" x2=\"" << fmt(px) << "\" y2=\"" << fmt(y1)
            << "\" stroke=\"" << s.color << "\"/>\n";
        out << "<line x1=\"" << fmt(px - 3) << "\" y1=\"" << fmt(y0)
            << "\" x2=\"" << fmt(px + 3) << "\" y2=\"" << fmt(y0)
            << "\" stroke=\"" << s.color << "\"/>\n";
        out << "<line x1=\"" << fmt(px - 3) << "\" y1=\"" << fmt(y1)
            << "\" x2=\"" << fmt(px + 3) << "\" y2=\"" << fmt(y1)
            << "\" stroke=\"" << s.color << "\"/>\n";
      }
      if (s.markers) {
        out << "<circle cx=\"" << fmt(px) << "\" cy=\"" << fmt(py)
            << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
      }
    }
  }

  // Title, axis labels, legend.
  if (!title.empty()) {
    out << "<text x=\"" << fmt(width / 2.0)
        << "\" y=\"22\" font-size=\"15\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << escape(title) << "</text>\n";
  }
  if (!x_label.empty()) {
    out << "<text x=\"" << fmt((ml + width - mr) / 2.0) << "\" y=\""
        << fmt(height - 12)
        << "\" font-size=\"12\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">"
        << escape(x_label) << "</text>\n";
  }
  if (!y_label.empty()) {
    out << "<text x=\"16\" y=\"" << fmt((mt + height - mb) / 2.0)
        << "\" font-size=\"12\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" transform=\"rotate(-90 16 "
        << fmt((mt + height - mb) / 2.0) << ")\">" << escape(y_label)
        << "</text>\n";
  }
  double ly = mt + 16;
  for (const auto& s : series) {
    if (s.label.empty()) continue;
    out << "<line x1=\"" << fmt(ml + 10) << "\" y1=\"" << fmt(ly - 4)
        << "\" x2=\"" << fmt(ml + 30) << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) out << " stroke-dasharray=\"6 4\"";
    out << "/>\n";
    out << "<text x=\"" << fmt(ml + 36) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"11\" font-family=\"sans-serif\">"
        << escape(s.label) << "</text>\n";
    ly += 15;
  }
  for (const auto& note : annotations) {
    out << "<text x=\"" << fmt(ml + 10) << "\" y=\"" << fmt(ly)
        << "\" font-size=\"11\" font-family=\"sans-serif\">" << escape(note)
        << "</text>\n";
    ly += 15;
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace scalelaw::svg
