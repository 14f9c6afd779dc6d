#pragma once

// Finite weighted point cloud standing in for a compact metric measure
// space. Integrals become weighted sums; the metric is either computed
// exactly from coordinates or as shortest paths over a proximity graph.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netform/error.hpp"

namespace netform {

enum class MetricMode {
  euclidean,  ///< straight-line distance between coordinates
  graph,      ///< shortest path over proximity edges
  arc,        ///< intrinsic (arc-length) metric on a closed curve
};

inline const char* to_string(MetricMode m) {
  switch (m) {
    case MetricMode::euclidean: return "euclidean";
    case MetricMode::graph: return "graph";
    case MetricMode::arc: return "arc";
  }
  return "?";
}

struct ProximityEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double length = 0.0;
};

/// One real value per ambient sample point.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_) {
      if (!std::isfinite(v)) throw InputError("scalar field has a non-finite value");
    }
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> values_;
};

class AmbientSpace {
 public:
  /// Points given as a flat row-major coordinate array of `dim` columns.
  static AmbientSpace euclidean(std::size_t dim, std::vector<double> coords,
                                std::vector<double> weights, double delta) {
    if (dim == 0) throw InputError("euclidean space needs coordinates");
    if (coords.size() != dim * weights.size()) {
      throw InputError("missing coordinates: coordinate count does not match weights");
    }
    AmbientSpace s;
    s.mode_ = MetricMode::euclidean;
    s.dim_ = dim;
    s.coords_ = std::move(coords);
    s.weights_ = std::move(weights);
    s.delta_ = delta;
    s.check_common();
    return s;
  }

  /// Path metric over `edges`. Coordinates are optional (dim == 0 means none).
  static AmbientSpace graph(std::vector<double> weights, std::vector<ProximityEdge> edges,
                            double delta, std::size_t dim = 0, std::vector<double> coords = {}) {
    if (dim > 0 && coords.size() != dim * weights.size()) {
      throw InputError("coordinate count does not match weights");
    }
    AmbientSpace s;
    s.mode_ = MetricMode::graph;
    s.dim_ = dim;
    s.coords_ = std::move(coords);
    s.weights_ = std::move(weights);
    s.edges_ = std::move(edges);
    s.delta_ = delta;
    s.check_common();
    s.build_path_metric();
    return s;
  }

  /// Closed curve of length `circumference`; each point carries its
  /// arc-length parameter in [0, circumference). Coordinates are the
  /// embedding in the plane.
  static AmbientSpace arc(std::vector<double> arc_params, double circumference,
                          std::vector<double> coords, std::vector<double> weights, double delta) {
    if (!(circumference > 0.0)) throw InputError("circumference must be positive");
    if (arc_params.size() != weights.size() || coords.size() != 2 * weights.size()) {
      throw InputError("arc parameters do not match weights");
    }
    AmbientSpace s;
    s.mode_ = MetricMode::arc;
    s.dim_ = 2;
    s.coords_ = std::move(coords);
    s.arc_params_ = std::move(arc_params);
    s.circumference_ = circumference;
    s.weights_ = std::move(weights);
    s.delta_ = delta;
    s.check_common();
    return s;
  }

  std::size_t size() const { return weights_.size(); }
  std::size_t dim() const { return dim_; }
  bool has_coordinates() const { return dim_ > 0; }
  MetricMode mode() const { return mode_; }
  double delta() const { return delta_; }
  double total_mass() const { return total_mass_; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<ProximityEdge>& edges() const { return edges_; }
  std::span<const double> arc_params() const { return arc_params_; }
  double circumference() const { return circumference_; }

  std::span<const double> point(std::size_t i) const {
    check_index(i);
    if (dim_ == 0) return {};
    return std::span<const double>(coords_).subspan(i * dim_, dim_);
  }
  double coordinate(std::size_t i, std::size_t k) const {
    if (k >= dim_) throw InputError("coordinate x" + std::to_string(k) + " not available");
    return coords_[i * dim_ + k];
  }
  std::span<const double> coordinates() const { return coords_; }

  /// Identifier of the source (builtin descriptor or file path).
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  double distance(std::size_t i, std::size_t j) const {
    check_index(i);
    check_index(j);
    return distance_unchecked(i, j);
  }

  /// Open ball: every j with distance(center, j) < radius.
  std::vector<std::size_t> ball(std::size_t center, double radius) const {
    check_index(center);
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < size(); ++j) {
      if (distance_unchecked(center, j) < radius) out.push_back(j);
    }
    return out;
  }

  double ball_mass(std::size_t center, double radius) const {
    check_index(center);
    double m = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      if (distance_unchecked(center, j) < radius) m += weights_[j];
    }
    return m;
  }

  /// Weight-normalized mean of `u` over the open ball.
  double average(const ScalarField& u, std::size_t center, double radius) const {
    check_field(u);
    check_index(center);
    // accumulate deviations from u(center) so constant fields average exactly
    const double base = u[center];
    double m = 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < size(); ++j) {
      if (distance_unchecked(center, j) < radius) {
        m += weights_[j];
        s += weights_[j] * (u[j] - base);
      }
    }
    if (!(m > 0.0)) throw ComputeError("empty averaging ball");
    return base + s / m;
  }

  /// Largest difference quotient |u(j) - u(i)| / d(i, j) over the
  /// punctured open ball of radius h around i.
  double local_slope(const ScalarField& u, std::size_t i, double h) const {
    double best = -1.0;
    for (std::size_t j = 0; j < size(); ++j) {
      if (j == i) continue;
      const double d = distance_unchecked(i, j);
      if (d < h) best = std::max(best, std::abs(u[j] - u[i]) / d);
    }
    if (best < 0.0) throw ComputeError("empty punctured ball at point " + std::to_string(i));
    return best;
  }

  /// Sum of weight * (scale-h local slope)^2, a sampled stand-in for the
  /// integral of the squared local Lipschitz constant.
  double reference_energy(const ScalarField& u, double h) const {
    check_field(u);
    if (!(h > 0.0)) throw InputError("reference scale must be positive");
    double e = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      const double s = local_slope(u, i, h);
      e += weights_[i] * s * s;
    }
    return e;
  }

  /// Distance from point i to the nearest member of `mask`; infinity if
  /// the mask is empty.
  double distance_to_set(std::size_t i, const std::vector<bool>& mask) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < size(); ++j) {
      if (mask[j]) best = std::min(best, distance_unchecked(i, j));
    }
    return best;
  }

  void check_field(const ScalarField& u) const {
    if (u.size() != size()) {
      throw InputError("field has " + std::to_string(u.size()) + " values, space has " +
                       std::to_string(size()) + " points");
    }
  }

 private:
  AmbientSpace() = default;

  void check_index(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("point index " + std::to_string(i) + " out of range");
  }

  double distance_unchecked(std::size_t i, std::size_t j) const {
    switch (mode_) {
      case MetricMode::euclidean: {
        if (i == j) return 0.0;
        const double* p = coords_.data() + i * dim_;
        const double* q = coords_.data() + j * dim_;
        double s = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
          const double t = p[k] - q[k];
          s += t * t;
        }
        return std::sqrt(s);
      }
      case MetricMode::graph:
        return paths_[i * size() + j];
      case MetricMode::arc: {
        const double t = std::abs(arc_params_[i] - arc_params_[j]);
        return std::min(t, circumference_ - t);
      }
    }
    return 0.0;
  }

  void check_common() {
    if (weights_.empty()) throw InputError("space has no points");
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("negative weight");
    }
    for (double c : coords_) {
      if (!std::isfinite(c)) throw InputError("non-finite coordinate");
    }
    total_mass_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    if (!(total_mass_ > 0.0)) throw InputError("total mass must be positive");
    if (!(delta_ > 0.0) || !std::isfinite(delta_)) throw InputError("delta must be positive");
  }

  // All-pairs Dijkstra; the point counts this targets (a few thousand)
  // keep the dense table affordable.
  void build_path_metric() {
    const std::size_t n = size();
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : edges_) {
      if (e.a >= n || e.b >= n) throw InputError("edge endpoint out of range");
      if (!(e.length > 0.0) || !std::isfinite(e.length)) {
        throw InputError("edge length must be positive");
      }
      adj[e.a].emplace_back(e.b, e.length);
      adj[e.b].emplace_back(e.a, e.length);
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    paths_.assign(n * n, inf);
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
      double* row = paths_.data() + s * n;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      row[s] = 0.0;
      pq.emplace(0.0, s);
      while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > row[v]) continue;
        for (auto [w, len] : adj[v]) {
          const double nd = d + len;
          if (nd < row[w]) {
            row[w] = nd;
            pq.emplace(nd, w);
          }
        }
      }
      if (s == 0) {
        for (std::size_t v = 0; v < n; ++v) {
          if (row[v] == inf) throw InputError("disconnected proximity graph");
        }
      }
    }
    // Dijkstra sums edges in different orders from each end; take the
    // smaller value so the table is exactly symmetric.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = std::min(paths_[i * n + j], paths_[j * n + i]);
        paths_[i * n + j] = d;
        paths_[j * n + i] = d;
      }
    }
  }

  MetricMode mode_ = MetricMode::euclidean;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> weights_;
  std::vector<ProximityEdge> edges_;
  std::vector<double> paths_;
  std::vector<double> arc_params_;
  double circumference_ = 0.0;
  double delta_ = 0.0;
  double total_mass_ = 0.0;
  std::string label_;
};

}  // namespace netform
