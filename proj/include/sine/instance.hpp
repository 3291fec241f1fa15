#pragma once

// Problem instances: coordinates, distance semantics and file ingestion.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sine/error.hpp"
#include "sine/format.hpp"

namespace sine {

enum class Metric { Euclidean2D, GreatCircle };

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr std::size_t kDefaultDimensionCap = 4000;

inline std::string_view to_string(Metric m) {
  return m == Metric::Euclidean2D ? "Euclidean2D" : "GreatCircle";
}

/// A point. For GreatCircle instances `x` is latitude and `y` longitude, both in degrees.
struct NodeCoord {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NodeCoord&, const NodeCoord&) = default;
};

/// Immutable problem definition. Construction validates every invariant.
class Instance {
 public:
  Instance(std::string name, std::vector<NodeCoord> nodes, Metric metric)
      : name_(std::move(name)), nodes_(std::move(nodes)), metric_(metric) {
    if (nodes_.size() < 2) {
      throw DomainError("instance '" + name_ + "' needs at least 2 nodes, got " +
                        std::to_string(nodes_.size()));
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const auto& c = nodes_[i];
      if (!std::isfinite(c.x) || !std::isfinite(c.y)) {
        throw DomainError("node " + std::to_string(i) + " has a non-finite coordinate");
      }
      if (metric_ == Metric::GreatCircle &&
          (c.x < -90.0 || c.x > 90.0 || c.y < -180.0 || c.y > 180.0)) {
        throw DomainError("node " + std::to_string(i) + " is outside latitude/longitude bounds");
      }
    }
  }

  const std::string& name() const noexcept { return name_; }
  const std::vector<NodeCoord>& nodes() const noexcept { return nodes_; }
  const NodeCoord& node(std::size_t i) const { return nodes_.at(i); }
  Metric metric() const noexcept { return metric_; }
  std::size_t dimension() const noexcept { return nodes_.size(); }

 private:
  std::string name_;
  std::vector<NodeCoord> nodes_;
  Metric metric_;
};

inline double euclidean_distance(const NodeCoord& a, const NodeCoord& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Great-circle distance in kilometres between two (lat, lon) points in degrees.
inline double haversine_distance(const NodeCoord& a, const NodeCoord& b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double phi1 = a.x * rad;
  const double phi2 = b.x * rad;
  const double dphi = (b.x - a.x) * rad;
  const double dlambda = (b.y - a.y) * rad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

inline double distance(Metric metric, const NodeCoord& a, const NodeCoord& b) {
  return metric == Metric::Euclidean2D ? euclidean_distance(a, b) : haversine_distance(a, b);
}

/// Dense symmetric distance table with a zero diagonal.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * dim_ + j]; }

  void set(std::size_t i, std::size_t j, double v) noexcept {
    data_[i * dim_ + j] = v;
    data_[j * dim_ + i] = v;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

inline DistanceMatrix build_distance_matrix(const Instance& inst,
                                            std::size_t dimension_cap = kDefaultDimensionCap) {
  const std::size_t n = inst.dimension();
  if (n > dimension_cap) {
    throw DomainError("instance '" + inst.name() + "' has " + std::to_string(n) +
                      " nodes, above the distance-matrix cap of " + std::to_string(dimension_cap));
  }
  DistanceMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d.set(i, j, distance(inst.metric(), inst.nodes()[i], inst.nodes()[j]));
    }
  }
  return d;
}

using WarningSink = std::function<void(const std::string&)>;

inline void warn_stderr(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

/// Drops nodes whose coordinates repeat an earlier node, so that every d(i, j) > 0.
inline Instance collapse_duplicates(const Instance& inst, const WarningSink& warn = warn_stderr) {
  std::vector<NodeCoord> kept;
  kept.reserve(inst.dimension());
  std::map<std::pair<double, double>, std::size_t> seen;
  for (std::size_t i = 0; i < inst.dimension(); ++i) {
    const auto& c = inst.nodes()[i];
    auto [it, inserted] = seen.emplace(std::pair{c.x, c.y}, i);
    if (!inserted) {
      if (warn) {
        warn("node " + std::to_string(i) + " duplicates node " + std::to_string(it->second) +
             " in '" + inst.name() + "'; collapsed");
      }
      continue;
    }
    kept.push_back(c);
  }
  if (kept.size() == inst.dimension()) return inst;
  return Instance(inst.name(), std::move(kept), inst.metric());
}

namespace detail {

// TSPLIB GEO coordinates are written DDD.MM (degrees, then minutes).
inline double tsplib_geo_to_degrees(double v) {
  const double deg = std::trunc(v);
  const double min = v - deg;
  return deg + 5.0 * min / 3.0;
}

inline double degrees_to_tsplib_geo(double v) {
  const double deg = std::trunc(v);
  return deg + (v - deg) * 3.0 / 5.0;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

}  // namespace detail

/// Reads the EUC_2D / GEO subset of TSPLIB. Planar distances are not rounded.
inline Instance parse_tsplib(std::istream& in, const WarningSink& warn = warn_stderr) {
  std::string name;
  std::optional<std::size_t> dimension;
  std::optional<Metric> metric;
  std::vector<NodeCoord> nodes;
  bool in_coords = false;
  std::vector<bool> index_seen;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view == "EOF") break;

    if (in_coords) {
      const auto tok = detail::split_ws(view);
      if (tok.size() != 3) {
        // Section finished early; anything else here is a header key we do not expect.
        if (!tok.empty() && !parse_double(tok[0])) {
          throw ParseError("line " + std::to_string(line_no) + ": unexpected key '" +
                           std::string(tok[0]) + "' inside NODE_COORD_SECTION");
        }
        throw ParseError("line " + std::to_string(line_no) +
                         ": coordinate line needs 'index x y'");
      }
      const auto idx = parse_int<long long>(tok[0]);
      const auto x = parse_double(tok[1]);
      const auto y = parse_double(tok[2]);
      if (!idx || !x || !y) {
        throw ParseError("line " + std::to_string(line_no) + ": malformed coordinate line");
      }
      if (*idx < 1 || static_cast<std::size_t>(*idx) > *dimension ||
          index_seen[static_cast<std::size_t>(*idx - 1)]) {
        throw ParseError("line " + std::to_string(line_no) + ": node index " +
                         std::to_string(*idx) + " out of range or repeated");
      }
      if (nodes.size() == *dimension) {
        throw ParseError("NODE_COORD_SECTION: expected " + std::to_string(*dimension) +
                         " coordinates, got more");
      }
      index_seen[static_cast<std::size_t>(*idx - 1)] = true;
      if (*metric == Metric::GreatCircle) {
        nodes.push_back({detail::tsplib_geo_to_degrees(*x), detail::tsplib_geo_to_degrees(*y)});
      } else {
        nodes.push_back({*x, *y});
      }
      continue;
    }

    std::string_view key = view;
    std::string_view value;
    if (const auto colon = view.find(':'); colon != std::string_view::npos) {
      key = trim(view.substr(0, colon));
      value = trim(view.substr(colon + 1));
    } else if (const auto sp = view.find_first_of(" \t"); sp != std::string_view::npos) {
      key = trim(view.substr(0, sp));
      value = trim(view.substr(sp));
    }

    if (key == "NAME") {
      name = std::string(value);
    } else if (key == "COMMENT") {
    } else if (key == "TYPE") {
      if (value != "TSP") throw UnsupportedFormat("TYPE '" + std::string(value) + "' is not supported");
    } else if (key == "DIMENSION") {
      const auto dim = parse_int<std::size_t>(value);
      if (!dim || *dim < 2) throw ParseError("DIMENSION: expected an integer >= 2, got '" + std::string(value) + "'");
      dimension = *dim;
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value == "EUC_2D") {
        metric = Metric::Euclidean2D;
      } else if (value == "GEO") {
        metric = Metric::GreatCircle;
      } else {
        throw UnsupportedFormat("EDGE_WEIGHT_TYPE '" + std::string(value) + "' is not supported");
      }
    } else if (key == "NODE_COORD_SECTION") {
      if (name.empty()) throw ParseError("NAME: missing before NODE_COORD_SECTION");
      if (!dimension) throw ParseError("DIMENSION: missing before NODE_COORD_SECTION");
      if (!metric) throw ParseError("EDGE_WEIGHT_TYPE: missing before NODE_COORD_SECTION");
      in_coords = true;
      index_seen.assign(*dimension, false);
      nodes.reserve(*dimension);
    } else {
      throw ParseError("unknown header key '" + std::string(key) + "' at line " + std::to_string(line_no));
    }
  }

  if (!in_coords) throw ParseError("NODE_COORD_SECTION: missing");
  if (nodes.size() != *dimension) {
    throw ParseError("NODE_COORD_SECTION: expected " + std::to_string(*dimension) +
                     " coordinates, got " + std::to_string(nodes.size()));
  }
  std::vector<NodeCoord> ordered = std::move(nodes);
  Instance parsed = [&] {
    try {
      return Instance(name, std::move(ordered), *metric);
    } catch (const DomainError& e) {
      throw ParseError(e.what());
    }
  }();
  return collapse_duplicates(parsed, warn);
}

inline Instance parse_tsplib(std::string_view text, const WarningSink& warn = warn_stderr) {
  std::istringstream in{std::string(text)};
  return parse_tsplib(in, warn);
}

/// Geo CSV: header "id,lat,lon", one node per line, decimal degrees.
inline Instance parse_geo_csv(std::istream& in, std::string name, const WarningSink& warn = warn_stderr) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "id,lat,lon") {
    throw ParseError("geo CSV: expected header 'id,lat,lon'");
  }
  std::vector<NodeCoord> nodes;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      cells.push_back(trim(view.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 3) {
      throw ParseError("geo CSV line " + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(cells.size()));
    }
    const auto lat = parse_double(cells[1]);
    const auto lon = parse_double(cells[2]);
    if (!lat || !lon) throw ParseError("geo CSV line " + std::to_string(line_no) + ": malformed lat/lon");
    nodes.push_back({*lat, *lon});
  }
  Instance parsed = [&] {
    try {
      return Instance(std::move(name), std::move(nodes), Metric::GreatCircle);
    } catch (const DomainError& e) {
      throw ParseError(e.what());
    }
  }();
  return collapse_duplicates(parsed, warn);
}

/// Writes TSPLIB text; planar coordinates use shortest round-trip decimals.
inline std::string write_tsplib(const Instance& inst) {
  std::ostringstream out;
  out << "NAME : " << inst.name() << '\n'
      << "TYPE : TSP\n"
      << "DIMENSION : " << inst.dimension() << '\n'
      << "EDGE_WEIGHT_TYPE : " << (inst.metric() == Metric::Euclidean2D ? "EUC_2D" : "GEO") << '\n'
      << "NODE_COORD_SECTION\n";
  for (std::size_t i = 0; i < inst.dimension(); ++i) {
    const auto& c = inst.nodes()[i];
    if (inst.metric() == Metric::Euclidean2D) {
      out << (i + 1) << ' ' << format_double(c.x) << ' ' << format_double(c.y) << '\n';
    } else {
      out << (i + 1) << ' ' << format_double(detail::degrees_to_tsplib_geo(c.x)) << ' '
          << format_double(detail::degrees_to_tsplib_geo(c.y)) << '\n';
    }
  }
  out << "EOF\n";
  return out.str();
}

/// Loads by extension: ".csv" is the geo format, anything else TSPLIB.
inline Instance load_instance(const std::string& path, const WarningSink& warn = warn_stderr) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path + "'");
  try {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0) {
      auto stem = path.substr(path.find_last_of('/') + 1);
      stem = stem.substr(0, stem.size() - 4);
      return parse_geo_csv(in, stem, warn);
    }
    return parse_tsplib(in, warn);
  } catch (const UnsupportedFormat& e) {
    throw UnsupportedFormat(path + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace sine
