#pragma once

// Discretization u -> u_r by r/4-ball averages and the approximating
// energy form on the r-net graph:
//
//   E_r(u, v) = sum_x sum_{y ~ x} [u_r(y) - u_r(x)] [v_r(y) - v_r(x)] / r^2 * mu_r(x)
//
// summed over ordered neighbor pairs, so each undirected edge appears
// twice, once with each endpoint's mass.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "netform/ambient.hpp"
#include "netform/error.hpp"
#include "netform/net.hpp"
#include "netform/sparse.hpp"

namespace netform {

/// Values on net vertices, tagged with the id of the net they live on.
struct DiscreteFunction {
  std::string net_ref;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t v) const { return values[v]; }
};

inline DiscreteFunction make_discrete(const Net& net, std::vector<double> values) {
  if (values.size() != net.size()) throw InputError("net mismatch: wrong number of values");
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError("discrete function has a non-finite value");
  }
  return DiscreteFunction{net.id(), std::move(values)};
}

inline void check_on_net(const Net& net, const DiscreteFunction& a) {
  if (a.size() != net.size() || (!a.net_ref.empty() && a.net_ref != net.id())) {
    throw InputError("net mismatch");
  }
}

/// u_r(x) = average of u over the open ball B(x, r/4). The balls are
/// pairwise disjoint because vertices are r-separated.
inline DiscreteFunction discretize(const AmbientSpace& space, const Net& net, const ScalarField& u) {
  space.check_field(u);
  std::vector<double> values(net.size());
  for (std::size_t a = 0; a < net.size(); ++a) {
    values[a] = space.average(u, net.vertex(a), net.r() / 4.0);
  }
  return DiscreteFunction{net.id(), std::move(values)};
}

inline double bilinear(const Net& net, const DiscreteFunction& a, const DiscreteFunction& b) {
  check_on_net(net, a);
  check_on_net(net, b);
  const double inv_r2 = 1.0 / (net.r() * net.r());
  double total = 0.0;
  for (std::size_t x = 0; x < net.size(); ++x) {
    double row = 0.0;
    for (std::size_t y : net.neighbors(x)) row += (a[y] - a[x]) * (b[y] - b[x]);
    total += row * inv_r2 * net.mu(x);
  }
  return total;
}

/// Graph energy; equal to bilinear(net, a, a).
inline double energy(const Net& net, const DiscreteFunction& a) { return bilinear(net, a, a); }

/// L[x][y] = -(mu_r(x) + mu_r(y)) / r^2 for neighbors, diagonal closes
/// the rows to zero, so a^T L a = energy(net, a).
inline SparseForm assemble_laplacian(const Net& net) {
  const double inv_r2 = 1.0 / (net.r() * net.r());
  std::vector<SparseForm::Entry> entries;
  std::vector<double> diag(net.size(), 0.0);
  for (auto [x, y] : net.edges()) {
    const double w = (net.mu(x) + net.mu(y)) * inv_r2;
    entries.push_back({x, y, -w});
    diag[x] += w;
    diag[y] += w;
  }
  for (std::size_t x = 0; x < net.size(); ++x) entries.push_back({x, x, diag[x]});
  return SparseForm::from_entries(net.size(), std::move(entries), FormKind::laplacian);
}

/// Pointwise clamp to [lo, hi]. Clamping is a contraction on every edge
/// difference, so it never raises the graph energy.
inline DiscreteFunction truncate(const DiscreteFunction& a, double lo, double hi) {
  if (lo > hi) throw InputError("truncation bounds reversed (lo > hi)");
  DiscreteFunction out = a;
  for (double& v : out.values) v = std::clamp(v, lo, hi);
  return out;
}

}  // namespace netform
