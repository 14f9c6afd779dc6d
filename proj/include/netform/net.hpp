#pragma once

// r-net graphs: a maximal r-separated subset of the sample, neighbors
// whose 2r-balls meet, the hop-count chain metric and the lifted measure
// mu_r(x) = mu(B(x, 2r)).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netform/ambient.hpp"
#include "netform/error.hpp"

namespace netform {

class Net {
 public:
  Net() = default;

  /// Assembles a net from stored parts. Only shape consistency is checked
  /// here; geometric invariants are the job of validate_net.
  static Net from_parts(std::string space_ref, double r, std::vector<std::size_t> vertices,
                        std::vector<std::vector<std::size_t>> adjacency, std::vector<double> mu_r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw InputError("net scale r must be positive");
    if (adjacency.size() != vertices.size() || mu_r.size() != vertices.size()) {
      throw InputError("net arrays disagree in length");
    }
    for (const auto& nbrs : adjacency) {
      for (std::size_t b : nbrs) {
        if (b >= vertices.size()) throw InputError("adjacency refers to a missing vertex");
      }
    }
    Net n;
    n.space_ref_ = std::move(space_ref);
    n.r_ = r;
    n.vertices_ = std::move(vertices);
    n.adjacency_ = std::move(adjacency);
    for (auto& nbrs : n.adjacency_) std::sort(nbrs.begin(), nbrs.end());
    n.mu_r_ = std::move(mu_r);
    return n;
  }

  double r() const { return r_; }
  std::size_t size() const { return vertices_.size(); }
  const std::string& space_ref() const { return space_ref_; }
  const std::vector<std::size_t>& vertices() const { return vertices_; }
  std::size_t vertex(std::size_t v) const { return vertices_.at(v); }
  const std::vector<std::size_t>& neighbors(std::size_t v) const { return adjacency_.at(v); }
  const std::vector<std::vector<std::size_t>>& adjacency() const { return adjacency_; }
  const std::vector<double>& mu_r() const { return mu_r_; }
  double mu(std::size_t v) const { return mu_r_.at(v); }
  static constexpr const char* build_order() { return "ascending-index"; }

  /// Label that discrete functions carry to tie them to this net.
  std::string id() const {
    std::ostringstream os;
    os.precision(17);
    os << space_ref_ << "@r=" << r_ << "#" << vertices_.size();
    return os.str();
  }

  /// Undirected edges (a < b) in ascending order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t a = 0; a < size(); ++a) {
      for (std::size_t b : adjacency_[a]) {
        if (a < b) out.emplace_back(a, b);
      }
    }
    return out;
  }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& nbrs : adjacency_) d = std::max(d, nbrs.size());
    return d;
  }

 private:
  std::string space_ref_;
  double r_ = 0.0;
  std::vector<std::size_t> vertices_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<double> mu_r_;
};

/// Greedy r-net: points are admitted in ascending index order when they
/// are at distance >= r from everything already admitted. Neighbors are
/// vertex pairs at distance < 4r, which in a geodesic space is exactly
/// the condition that the two open 2r-balls intersect.
inline Net build_net(const AmbientSpace& space, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw InputError("net scale r must be positive");
  if (space.delta() > r / 8.0) throw InputError("resolution too coarse for scale r");

  std::vector<std::size_t> vertices;
  for (std::size_t i = 0; i < space.size(); ++i) {
    bool admit = true;
    for (std::size_t v : vertices) {
      if (space.distance(i, v) < r) {
        admit = false;
        break;
      }
    }
    if (admit) vertices.push_back(i);
  }

  const std::size_t n = vertices.size();
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (space.distance(vertices[a], vertices[b]) < 4.0 * r) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
      }
    }
  }

  std::vector<double> mu(n);
  for (std::size_t a = 0; a < n; ++a) mu[a] = space.ball_mass(vertices[a], 2.0 * r);

  return Net::from_parts(space.label(), r, std::move(vertices), std::move(adjacency), std::move(mu));
}

/// Hop counts from `source` by breadth-first search; -1 marks unreachable.
inline std::vector<long> hop_counts(const Net& net, std::size_t source) {
  std::vector<long> hops(net.size(), -1);
  if (source >= net.size()) throw std::out_of_range("vertex out of range");
  std::deque<std::size_t> queue{source};
  hops[source] = 0;
  while (!queue.empty()) {
    const std::size_t a = queue.front();
    queue.pop_front();
    for (std::size_t b : net.neighbors(a)) {
      if (hops[b] < 0) {
        hops[b] = hops[a] + 1;
        queue.push_back(b);
      }
    }
  }
  return hops;
}

inline bool is_connected(const Net& net) {
  if (net.size() == 0) return false;
  const auto hops = hop_counts(net, 0);
  return std::none_of(hops.begin(), hops.end(), [](long h) { return h < 0; });
}

/// d_r(a, b) = r * (length of the shortest neighbor chain from a to b).
inline double chain_metric(const Net& net, std::size_t a, std::size_t b) {
  if (b >= net.size()) throw std::out_of_range("vertex out of range");
  const auto hops = hop_counts(net, a);
  if (hops[b] < 0) throw ComputeError("no chain between vertices");
  return net.r() * static_cast<double>(hops[b]);
}

struct NetReport {
  double r = 0.0;
  std::size_t vertex_count = 0;
  std::size_t edge_count = 0;
  std::size_t max_degree = 0;
  double min_separation = std::numeric_limits<double>::infinity();
  double max_covering = 0.0;
  bool connected = false;
  /// Neighbor distances binned by d/r into [1,2), [2,3), [3,4).
  std::array<std::size_t, 3> neighbor_histogram{};
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks separation, covering, the neighbor rule, the lifted measure and
/// connectivity. Never throws on a bad net; violations land in the report.
inline NetReport validate_net(const AmbientSpace& space, const Net& net) {
  NetReport rep;
  rep.r = net.r();
  rep.vertex_count = net.size();
  rep.max_degree = net.max_degree();
  const double r = net.r();
  auto fail = [&rep](std::string msg) { rep.violations.push_back(std::move(msg)); };

  if (net.size() == 0) {
    fail("net has no vertices");
    return rep;
  }
  std::vector<bool> seen(space.size(), false);
  for (std::size_t v : net.vertices()) {
    if (v >= space.size()) {
      fail("vertex index " + std::to_string(v) + " outside the space");
      return rep;
    }
    if (seen[v]) fail("duplicate vertex " + std::to_string(v));
    seen[v] = true;
  }

  std::size_t sep_bad = 0;
  std::size_t rule_bad = 0;
  for (std::size_t a = 0; a < net.size(); ++a) {
    const auto& nbrs = net.neighbors(a);
    for (std::size_t b = a + 1; b < net.size(); ++b) {
      const double d = space.distance(net.vertex(a), net.vertex(b));
      rep.min_separation = std::min(rep.min_separation, d);
      if (d < r) ++sep_bad;
      const bool adjacent = std::binary_search(nbrs.begin(), nbrs.end(), b);
      if (adjacent != (d < 4.0 * r)) ++rule_bad;
      if (adjacent) {
        ++rep.edge_count;
        const double q = d / r;
        if (q >= 1.0 && q < 4.0) ++rep.neighbor_histogram[std::min<std::size_t>(2, static_cast<std::size_t>(q) - 1)];
      }
    }
  }
  if (sep_bad > 0) fail("separation violated by " + std::to_string(sep_bad) + " vertex pairs");
  if (rule_bad > 0) fail("neighbor rule d < 4r violated by " + std::to_string(rule_bad) + " pairs");

  std::size_t asym = 0;
  for (std::size_t a = 0; a < net.size(); ++a) {
    for (std::size_t b : net.neighbors(a)) {
      if (b == a) fail("self loop at vertex " + std::to_string(a));
      const auto& back = net.neighbors(b);
      if (!std::binary_search(back.begin(), back.end(), a)) ++asym;
    }
  }
  if (asym > 0) fail("adjacency not symmetric (" + std::to_string(asym) + " one-way entries)");

  std::size_t cover_bad = 0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t v : net.vertices()) best = std::min(best, space.distance(i, v));
    rep.max_covering = std::max(rep.max_covering, best);
    if (!(best < r)) ++cover_bad;
  }
  if (cover_bad > 0) fail("covering violated at " + std::to_string(cover_bad) + " points");

  for (std::size_t a = 0; a < net.size(); ++a) {
    const double expect = space.ball_mass(net.vertex(a), 2.0 * r);
    const double got = net.mu(a);
    if (!(got > 0.0)) fail("mu_r not positive at vertex " + std::to_string(a));
    if (std::abs(got - expect) > 1e-12 * std::max(1.0, expect)) {
      fail("mu_r mismatch at vertex " + std::to_string(a));
    }
  }

  rep.connected = is_connected(net);
  if (!rep.connected) fail("net graph is disconnected");
  return rep;
}

struct MetricComparison {
  double min_ratio = std::numeric_limits<double>::infinity();  ///< min d_r / d
  double max_ratio = 0.0;
  std::pair<std::size_t, std::size_t> argmin{0, 0};
  std::pair<std::size_t, std::size_t> argmax{0, 0};
  std::size_t pairs = 0;
  std::size_t lower_violations = 0;       ///< pairs with d_r <= d / 4
  std::size_t upper_violations = 0;       ///< pairs with d_r > 3 (1 + 2 delta / r) d
  std::size_t exact_upper_violations = 0; ///< pairs with d_r > 3 d (exact metrics only)
  bool exact_metric = false;
  double upper_factor = 3.0;

  /// The sharper lower bound d_r >= d / 2 is reported, not enforced.
  bool half_bound_holds() const { return min_ratio >= 0.5; }
  bool ok() const {
    return lower_violations == 0 && upper_violations == 0 &&
           (!exact_metric || exact_upper_violations == 0);
  }
};

inline MetricComparison metric_comparison(const AmbientSpace& space, const Net& net) {
  MetricComparison rep;
  rep.exact_metric = space.mode() != MetricMode::graph;
  rep.upper_factor = 3.0 * (1.0 + 2.0 * space.delta() / net.r());
  for (std::size_t a = 0; a < net.size(); ++a) {
    const auto hops = hop_counts(net, a);
    for (std::size_t b = a + 1; b < net.size(); ++b) {
      if (hops[b] < 0) throw ComputeError("no chain between vertices");
      const double dr = net.r() * static_cast<double>(hops[b]);
      const double d = space.distance(net.vertex(a), net.vertex(b));
      const double q = dr / d;
      ++rep.pairs;
      if (q < rep.min_ratio) {
        rep.min_ratio = q;
        rep.argmin = {a, b};
      }
      if (q > rep.max_ratio) {
        rep.max_ratio = q;
        rep.argmax = {a, b};
      }
      if (!(d / 4.0 < dr)) ++rep.lower_violations;
      if (dr > rep.upper_factor * d) ++rep.upper_violations;
      if (dr > 3.0 * d) ++rep.exact_upper_violations;
    }
  }
  return rep;
}

}  // namespace netform
