#pragma once

// Static SVG rendering of robot routes: nodes as dots, one closed polyline per robot.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "sine/format.hpp"
#include "sine/instance.hpp"
#include "sine/solver.hpp"

namespace sine {

namespace detail {

// Plot coordinates: planar (x, -y); geographic (lon, -lat). North/up stays up.
inline std::pair<double, double> plot_xy(const Instance& inst, const NodeCoord& c) {
  if (inst.metric() == Metric::GreatCircle) return {c.y, -c.x};
  return {c.x, -c.y};
}

inline std::string route_color(std::size_t k, std::size_t m) {
  const double hue = 360.0 * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(m, 1));
  return "hsl(" + format_double(std::round(hue * 100.0) / 100.0) + ",75%,42%)";
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_svg_routes(const SolveReport& report, const Instance& inst) {
  double minx = std::numeric_limits<double>::infinity();
  double miny = minx;
  double maxx = -minx;
  double maxy = -minx;
  for (const auto& c : inst.nodes()) {
    const auto [x, y] = detail::plot_xy(inst, c);
    minx = std::min(minx, x);
    maxx = std::max(maxx, x);
    miny = std::min(miny, y);
    maxy = std::max(maxy, y);
  }
  double w = maxx - minx;
  double h = maxy - miny;
  const double span = std::max({w, h, 1e-9});
  if (w <= 0.0) w = span;
  if (h <= 0.0) h = span;
  const double mx = 0.05 * w;
  const double my = 0.05 * h;
  const double vx = minx - mx;
  const double vy = miny - my;
  const double vw = w + 2 * mx;
  const double vh = h + 2 * my;
  const double stroke = span * 0.004;
  const double radius = span * 0.008;

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\""
      << format_double(std::round(800.0 * vh / vw)) << "\" viewBox=\"" << format_double(vx) << ' '
      << format_double(vy) << ' ' << format_double(vw) << ' ' << format_double(vh) << "\">\n";
  out << "<title>" << detail::xml_escape(inst.name()) << " routes, " << report.tours.size() << " robots</title>\n";
  const std::size_t m = report.tours.size();
  for (std::size_t k = 0; k < m; ++k) {
    const auto& order = report.tours[k].order;
    if (order.empty()) continue;
    out << "<polyline class=\"route\" fill=\"none\" stroke=\"" << detail::route_color(k, m)
        << "\" stroke-width=\"" << format_double(stroke) << "\" points=\"";
    for (std::size_t i = 0; i <= order.size(); ++i) {
      const auto [x, y] = detail::plot_xy(inst, inst.node(order[i % order.size()]));
      out << (i ? " " : "") << format_double(x) << ',' << format_double(y);
    }
    out << "\"/>\n";
  }
  for (const auto& c : inst.nodes()) {
    const auto [x, y] = detail::plot_xy(inst, c);
    out << "<circle cx=\"" << format_double(x) << "\" cy=\"" << format_double(y) << "\" r=\""
        << format_double(radius) << "\" fill=\"#222\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace sine
