#pragma once

// Test geometries with normalized (probability) measure:
//   interval:n  n equispaced points on [0, 1]
//   square:n    n x n grid on [0, 1]^2 (also accepted as square:nxn)
//   circle:n    n equispaced points on a closed curve of length 1, arc metric
//   gasket:L    level-L graph approximation of the Sierpinski gasket, unit side
// delta is half the sample spacing: every point of the continuum lies
// within half a spacing of some sample.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netform/ambient.hpp"
#include "netform/error.hpp"

namespace netform::builtin {

inline AmbientSpace interval(long n) {
  if (n < 2) throw InputError("interval needs at least 2 points");
  const auto count = static_cast<std::size_t>(n);
  std::vector<double> coords(count);
  for (std::size_t i = 0; i < count; ++i) {
    coords[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  std::vector<double> weights(count, 1.0 / static_cast<double>(count));
  auto s = AmbientSpace::euclidean(1, std::move(coords), std::move(weights),
                                   0.5 / static_cast<double>(count - 1));
  s.set_label("interval:" + std::to_string(n));
  return s;
}

/// Row-major: point (i, j) has index j * n + i and coordinates (i, j) / (n - 1).
inline AmbientSpace square(long n) {
  if (n < 2) throw InputError("square needs at least 2 points per side");
  const auto side = static_cast<std::size_t>(n);
  const double h = 1.0 / static_cast<double>(side - 1);
  std::vector<double> coords;
  coords.reserve(2 * side * side);
  for (std::size_t j = 0; j < side; ++j) {
    for (std::size_t i = 0; i < side; ++i) {
      coords.push_back(static_cast<double>(i) / static_cast<double>(side - 1));
      coords.push_back(static_cast<double>(j) / static_cast<double>(side - 1));
    }
  }
  std::vector<double> weights(side * side, 1.0 / static_cast<double>(side * side));
  auto s = AmbientSpace::euclidean(2, std::move(coords), std::move(weights), 0.5 * h);
  s.set_label("square:" + std::to_string(n));
  return s;
}

inline AmbientSpace circle(long n) {
  if (n < 3) throw InputError("circle needs at least 3 points");
  const auto count = static_cast<std::size_t>(n);
  const double radius = 1.0 / (2.0 * std::numbers::pi);
  std::vector<double> params(count);
  std::vector<double> coords;
  coords.reserve(2 * count);
  for (std::size_t k = 0; k < count; ++k) {
    params[k] = static_cast<double>(k) / static_cast<double>(count);
    const double theta = 2.0 * std::numbers::pi * params[k];
    coords.push_back(radius * std::cos(theta));
    coords.push_back(radius * std::sin(theta));
  }
  std::vector<double> weights(count, 1.0 / static_cast<double>(count));
  auto s = AmbientSpace::arc(std::move(params), 1.0, std::move(coords), std::move(weights),
                             0.5 / static_cast<double>(count));
  s.set_label("circle:" + std::to_string(n));
  return s;
}

/// Vertices live on the triangular lattice a*e1 + b*e2 with
/// e1 = (1, 0) / 2^L and e2 = (1/2, sqrt(3)/2) / 2^L; the level-L cells are
/// the 3^L corner triangles of the recursive subdivision.
inline AmbientSpace gasket(long level) {
  if (level < 0) throw InputError("gasket level must be nonnegative");
  if (level > 10) throw InputError("gasket level too large");
  const long side = 1L << level;
  using Lattice = std::pair<long, long>;  // (b, a) so map order is bottom row first

  std::vector<std::array<Lattice, 3>> cells{{Lattice{0, 0}, Lattice{0, side}, Lattice{side, 0}}};
  for (long l = 0; l < level; ++l) {
    std::vector<std::array<Lattice, 3>> next;
    next.reserve(cells.size() * 3);
    for (const auto& c : cells) {
      auto mid = [](Lattice p, Lattice q) {
        return Lattice{(p.first + q.first) / 2, (p.second + q.second) / 2};
      };
      const Lattice m01 = mid(c[0], c[1]);
      const Lattice m02 = mid(c[0], c[2]);
      const Lattice m12 = mid(c[1], c[2]);
      next.push_back({c[0], m01, m02});
      next.push_back({m01, c[1], m12});
      next.push_back({m02, m12, c[2]});
    }
    cells = std::move(next);
  }

  std::map<Lattice, std::size_t> index;
  for (const auto& c : cells) {
    for (const auto& p : c) index.emplace(p, 0);
  }
  std::size_t next_id = 0;
  for (auto& [p, id] : index) id = next_id++;

  const double unit = 1.0 / static_cast<double>(side);
  std::vector<double> coords;
  coords.reserve(2 * index.size());
  for (const auto& [p, id] : index) {
    const auto [b, a] = p;
    coords.push_back(unit * (static_cast<double>(a) + 0.5 * static_cast<double>(b)));
    coords.push_back(unit * std::sqrt(3.0) / 2.0 * static_cast<double>(b));
  }

  std::vector<ProximityEdge> edges;
  edges.reserve(cells.size() * 3);
  for (const auto& c : cells) {
    const std::size_t i0 = index.at(c[0]);
    const std::size_t i1 = index.at(c[1]);
    const std::size_t i2 = index.at(c[2]);
    edges.push_back({i0, i1, unit});
    edges.push_back({i0, i2, unit});
    edges.push_back({i1, i2, unit});
  }

  std::vector<double> weights(index.size(), 1.0 / static_cast<double>(index.size()));
  auto s = AmbientSpace::graph(std::move(weights), std::move(edges), 0.5 * unit, 2,
                               std::move(coords));
  s.set_label("gasket:" + std::to_string(level));
  return s;
}

inline bool is_builtin(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) return false;
  const auto kind = spec.substr(0, colon);
  return kind == "interval" || kind == "square" || kind == "circle" || kind == "gasket";
}

/// Parses "kind:size" descriptors.
inline AmbientSpace make(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw InputError("bad builtin descriptor: " + std::string(spec));
  const std::string kind(spec.substr(0, colon));
  std::string arg(spec.substr(colon + 1));
  if (kind == "square") {
    if (const auto x = arg.find('x'); x != std::string::npos) {
      if (arg.substr(0, x) != arg.substr(x + 1)) throw InputError("square grid must be n x n");
      arg = arg.substr(0, x);
    }
  }
  long n = 0;
  std::size_t used = 0;
  try {
    n = std::stol(arg, &used);
  } catch (const std::exception&) {
    throw InputError("bad builtin size: " + std::string(spec));
  }
  if (used != arg.size()) throw InputError("bad builtin size: " + std::string(spec));
  if (kind != "gasket" && n <= 0) throw InputError("builtin size must be positive");
  if (kind == "interval") return interval(n);
  if (kind == "square") return square(n);
  if (kind == "circle") return circle(n);
  if (kind == "gasket") return gasket(n);
  throw InputError("unknown builtin: " + kind);
}

}  // namespace netform::builtin
