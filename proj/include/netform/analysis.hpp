#pragma once

// Measurement harness: energy comparability sweeps, Holopainen-Soardi
// Poincare constants on net balls, truncation (Markov) remainders,
// locality, the matching-trace construction and Dirichlet convergence.
// Constants are reported, never assumed.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "netform/ambient.hpp"
#include "netform/error.hpp"
#include "netform/forms.hpp"
#include "netform/net.hpp"
#include "netform/solver.hpp"

namespace netform {

/// Scale of the reference local-slope energy: two grid spacings (4 delta)
/// so that the open punctured ball always contains the nearest samples.
inline double default_reference_scale(const AmbientSpace& space) { return 4.0 * space.delta(); }

// ---------------------------------------------------------------------------
// Energy sweeps

struct SweepRow {
  double r = 0.0;
  std::size_t vertices = 0;
  double energy = 0.0;
  double reference = 0.0;
  double ratio = 0.0;
  bool degenerate = false;  ///< 0/0: both energies vanish
};

struct SweepReport {
  std::vector<SweepRow> rows;  ///< decreasing r
  double reference_scale = 0.0;
  double reference = 0.0;
  double sup_energy = 0.0;
  double min_energy = 0.0;  ///< lower end of the E_r band over the sweep
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// min of E_r over the two smallest scales, standing in for liminf r -> 0
  double liminf_proxy = 0.0;
  bool degenerate = false;

  double ratio_spread() const { return degenerate ? 0.0 : max_ratio / min_ratio; }
};

inline SweepReport energy_sweep(const AmbientSpace& space, const ScalarField& u, std::vector<double> r_list,
                                double reference_scale = 0.0) {
  if (r_list.empty()) throw InputError("sweep needs at least one scale");
  std::sort(r_list.begin(), r_list.end(), std::greater<>());
  SweepReport rep;
  rep.reference_scale = reference_scale > 0.0 ? reference_scale : default_reference_scale(space);
  rep.reference = space.reference_energy(u, rep.reference_scale);
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.min_energy = std::numeric_limits<double>::infinity();
  for (double r : r_list) {
    const Net net = build_net(space, r);
    SweepRow row;
    row.r = r;
    row.vertices = net.size();
    row.energy = energy(net, discretize(space, net, u));
    row.reference = rep.reference;
    if (row.energy == 0.0 && rep.reference == 0.0) {
      row.degenerate = true;
      row.ratio = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.ratio = row.energy / rep.reference;
      rep.min_ratio = std::min(rep.min_ratio, row.ratio);
      rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    }
    rep.sup_energy = std::max(rep.sup_energy, row.energy);
    rep.min_energy = std::min(rep.min_energy, row.energy);
    rep.rows.push_back(row);
  }
  rep.degenerate = std::all_of(rep.rows.begin(), rep.rows.end(), [](const SweepRow& r) { return r.degenerate; });
  if (rep.degenerate) {
    rep.min_ratio = 0.0;
    rep.max_ratio = 0.0;
  }
  const std::size_t n = rep.rows.size();
  rep.liminf_proxy = n == 1 ? rep.rows[0].energy : std::min(rep.rows[n - 1].energy, rep.rows[n - 2].energy);
  return rep;
}

// ---------------------------------------------------------------------------
// Poincare inequality on chain balls G_R = { x : d_r(x, x0) <= R }

struct PoincareTerms {
  double lhs = 0.0;  ///< sum over G_R of |u - mean| mu_r / mu_r(G_R)
  double rhs = 0.0;  ///< sqrt of sum over G_{theta R}, y ~ x of |du / r|^2 mu_r(x) / mu_r(G_{theta R})
  std::size_t ball_size = 0;
  std::size_t enlarged_size = 0;

  /// lhs / (R * rhs); zero when both sides vanish.
  double implied(double radius) const {
    if (rhs == 0.0) {
      if (lhs == 0.0) return 0.0;
      throw ComputeError("degenerate Poincare right-hand side with nonzero left-hand side");
    }
    return lhs / (radius * rhs);
  }
};

inline PoincareTerms poincare_terms(const Net& net, const DiscreteFunction& u, std::size_t center, double radius,
                                    double theta) {
  check_on_net(net, u);
  if (!(theta >= 1.0)) throw InputError("theta must be at least 1");
  if (!(radius > 0.0)) throw InputError("Poincare radius must be positive");
  const auto hops = hop_counts(net, center);
  const double r = net.r();
  // hop counts are integers; compare h * r <= R with a relative guard so
  // that R = k * r lands on k hops despite rounding
  auto within = [&](long h, double bound) { return h >= 0 && static_cast<double>(h) * r <= bound * (1.0 + 1e-12); };

  PoincareTerms t;
  double mass = 0.0;
  double first = 0.0;
  for (std::size_t x = 0; x < net.size(); ++x) {
    if (!within(hops[x], radius)) continue;
    ++t.ball_size;
    mass += net.mu(x);
    first += net.mu(x) * u[x];
  }
  const double mean = first / mass;
  for (std::size_t x = 0; x < net.size(); ++x) {
    if (within(hops[x], radius)) t.lhs += std::abs(u[x] - mean) * net.mu(x) / mass;
  }

  double big_mass = 0.0;
  double acc = 0.0;
  for (std::size_t x = 0; x < net.size(); ++x) {
    if (!within(hops[x], theta * radius)) continue;
    ++t.enlarged_size;
    big_mass += net.mu(x);
    double row = 0.0;
    for (std::size_t y : net.neighbors(x)) {
      const double q = (u[x] - u[y]) / r;
      row += q * q;
    }
    acc += row * net.mu(x);
  }
  t.rhs = std::sqrt(acc / big_mass);
  return t;
}

struct PoincareRow {
  std::size_t center = 0;
  double radius = 0.0;
  std::size_t sample = 0;
  std::size_t ball_size = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double implied = 0.0;
};

struct PoincareReport {
  double r = 0.0;
  double theta = 2.0;
  double max_constant = 0.0;
  std::vector<PoincareRow> rows;

  /// Whether lhs <= C * R * rhs on every row.
  bool holds(double constant) const {
    return std::all_of(rows.begin(), rows.end(), [&](const PoincareRow& row) {
      return row.lhs <= constant * row.radius * row.rhs * (1.0 + 1e-12);
    });
  }
};

inline PoincareReport poincare_constant(const Net& net, const std::vector<DiscreteFunction>& samples,
                                        const std::vector<std::size_t>& centers,
                                        const std::vector<double>& radii, double theta = 2.0) {
  PoincareReport rep;
  rep.r = net.r();
  rep.theta = theta;
  for (std::size_t c : centers) {
    for (double radius : radii) {
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto t = poincare_terms(net, samples[s], c, radius, theta);
        PoincareRow row{c, radius, s, t.ball_size, t.lhs, t.rhs, t.implied(radius)};
        rep.max_constant = std::max(rep.max_constant, row.implied);
        rep.rows.push_back(row);
      }
    }
  }
  return rep;
}

/// Ambient sample fields are discretized onto the net first.
inline PoincareReport poincare_constant(const AmbientSpace& space, const Net& net,
                                        const std::vector<ScalarField>& samples,
                                        const std::vector<std::size_t>& centers,
                                        const std::vector<double>& radii, double theta = 2.0) {
  std::vector<DiscreteFunction> discrete;
  discrete.reserve(samples.size());
  for (const auto& u : samples) discrete.push_back(discretize(space, net, u));
  return poincare_constant(net, discrete, centers, radii, theta);
}

// ---------------------------------------------------------------------------
// Truncation remainder

/// Points where the clamp status (below lo / inside / above hi) changes
/// within distance 2 delta, for the lower and upper level sets.
struct LevelBoundary {
  std::vector<bool> lower;
  std::vector<bool> upper;
};

inline LevelBoundary level_boundary(const AmbientSpace& space, const ScalarField& u, double lo, double hi) {
  space.check_field(u);
  const std::size_t n = space.size();
  const double reach = 2.0 * space.delta() * (1.0 + 1e-9);
  LevelBoundary b{std::vector<bool>(n, false), std::vector<bool>(n, false)};
  for (std::size_t i = 0; i < n; ++i) {
    const bool below_i = u[i] < lo;
    const bool above_i = u[i] > hi;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool below_j = u[j] < lo;
      const bool above_j = u[j] > hi;
      if (below_i == below_j && above_i == above_j) continue;
      if (space.distance(i, j) > reach) continue;
      if (below_i != below_j) b.lower[i] = b.lower[j] = true;
      if (above_i != above_j) b.upper[i] = b.upper[j] = true;
    }
  }
  return b;
}

/// Mass of the union of open balls B(z, radius) over flagged z.
inline double collar_mass(const AmbientSpace& space, const std::vector<bool>& centers, double radius) {
  std::vector<std::size_t> flagged;
  for (std::size_t z = 0; z < space.size(); ++z) {
    if (centers[z]) flagged.push_back(z);
  }
  double m = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t z : flagged) {
      if (space.distance(i, z) < radius) {
        m += space.weight(i);
        break;
      }
    }
  }
  return m;
}

struct MarkovReport {
  double r = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  double energy = 0.0;            ///< E_r[u]
  double energy_truncated = 0.0;  ///< E_r[v], v = clamp(u) taken ambiently
  double graph_energy_truncated = 0.0;  ///< energy of clamp(u_r), clamped after averaging
  double lipschitz = 0.0;
  double collar_mass = 0.0;       ///< mu of the 6r-collars around both level boundaries
  std::size_t boundary_points = 0;
  double fitted_constant = 0.0;   ///< smallest C making the remainder estimate hold

  double gap() const { return energy_truncated - energy; }
  /// Remainder terms 10 C L E^{1/2} m^{1/2} + 25 C L^2 m at the given C.
  double remainder(double constant) const {
    return 10.0 * constant * lipschitz * std::sqrt(energy * collar_mass) +
           25.0 * constant * lipschitz * lipschitz * collar_mass;
  }
  bool estimate_holds(double constant) const {
    return energy_truncated <= energy + remainder(constant) + 1e-12 * std::max(1.0, energy);
  }
  bool graph_markov_holds() const { return graph_energy_truncated <= energy * (1.0 + 1e-12); }
};

inline MarkovReport markov_gap(const AmbientSpace& space, const Net& net, const ScalarField& u, double lo, double hi,
                               const LevelBoundary* boundary = nullptr) {
  if (lo > hi) throw InputError("truncation bounds reversed (lo > hi)");
  space.check_field(u);
  MarkovReport rep;
  rep.r = net.r();
  rep.lo = lo;
  rep.hi = hi;

  std::vector<double> clamped(u.values().begin(), u.values().end());
  for (double& v : clamped) v = std::clamp(v, lo, hi);
  const ScalarField v(std::move(clamped));

  const auto ur = discretize(space, net, u);
  rep.energy = energy(net, ur);
  rep.energy_truncated = energy(net, discretize(space, net, v));
  rep.graph_energy_truncated = energy(net, truncate(ur, lo, hi));

  const double h = default_reference_scale(space);
  for (std::size_t i = 0; i < space.size(); ++i) rep.lipschitz = std::max(rep.lipschitz, space.local_slope(u, i, h));

  LevelBoundary local;
  if (boundary == nullptr) {
    local = level_boundary(space, u, lo, hi);
    boundary = &local;
  }
  std::vector<bool> either(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    either[i] = boundary->lower[i] || boundary->upper[i];
    if (either[i]) ++rep.boundary_points;
  }
  rep.collar_mass = collar_mass(space, either, 6.0 * net.r());

  const double unit = rep.remainder(1.0);
  if (rep.gap() > 0.0) {
    rep.fitted_constant = unit > 0.0 ? rep.gap() / unit : std::numeric_limits<double>::infinity();
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Locality

struct LocalityReport {
  double r = 0.0;
  double support_distance = 0.0;
  double value = 0.0;  ///< E_r(u, v)
  /// supports at distance >= 9r/2: no net edge sees both averages move
  bool separated() const { return support_distance >= 4.5 * r; }
  bool ok() const { return !separated() || value == 0.0; }
};

inline double support_distance(const AmbientSpace& space, const ScalarField& u, const ScalarField& v) {
  std::vector<std::size_t> su, sv;
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (u[i] != 0.0) su.push_back(i);
    if (v[i] != 0.0) sv.push_back(i);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : su) {
    for (std::size_t j : sv) best = std::min(best, space.distance(i, j));
  }
  return best;
}

inline LocalityReport locality_test(const AmbientSpace& space, const Net& net, const ScalarField& u,
                                    const ScalarField& v) {
  space.check_field(u);
  space.check_field(v);
  LocalityReport rep;
  rep.r = net.r();
  rep.support_distance = support_distance(space, u, v);
  rep.value = bilinear(net, discretize(space, net, u), discretize(space, net, v));
  return rep;
}

inline LocalityReport locality_test(const AmbientSpace& space, double r, const ScalarField& u, const ScalarField& v) {
  return locality_test(space, build_net(space, r), u, v);
}

// ---------------------------------------------------------------------------
// Matching boundary values

/// w(x) = dist(x, X \ Omega) at every sample point.
inline std::vector<double> complement_distance(const AmbientSpace& space, const std::vector<bool>& inside) {
  std::vector<bool> outside = inside;
  outside.flip();
  std::vector<double> w(space.size(), 0.0);
  for (std::size_t i = 0; i < space.size(); ++i) w[i] = inside[i] ? space.distance_to_set(i, outside) : 0.0;
  return w;
}

/// min{max{u - w, v}, u + w}: agrees with u off Omega and never moves
/// further from u than v does.
inline ScalarField matching_trace(const AmbientSpace& space, const DomainSpec& domain, const ScalarField& u,
                                  const ScalarField& v) {
  space.check_field(u);
  space.check_field(v);
  const auto inside = domain.resolve(space);
  const auto w = complement_distance(space, inside);
  std::vector<double> out(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) out[i] = std::min(std::max(u[i] - w[i], v[i]), u[i] + w[i]);
  return ScalarField(std::move(out));
}

struct TraceCheck {
  std::size_t outside_points = 0;
  std::size_t outside_mismatches = 0;  ///< points off Omega with u~ != u
  std::size_t domination_failures = 0;  ///< points with |u~ - u| > |v - u|
  double max_change = 0.0;
  bool ok() const { return outside_mismatches == 0 && domination_failures == 0; }
};

inline TraceCheck verify_matching_trace(const AmbientSpace& space, const DomainSpec& domain, const ScalarField& u,
                                        const ScalarField& v, const ScalarField& traced) {
  const auto inside = domain.resolve(space);
  TraceCheck c;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const double change = std::abs(traced[i] - u[i]);
    c.max_change = std::max(c.max_change, change);
    if (!inside[i]) {
      ++c.outside_points;
      if (traced[i] != u[i]) ++c.outside_mismatches;
    }
    if (change > std::abs(v[i] - u[i])) ++c.domination_failures;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Dirichlet convergence

struct ConvergenceRow {
  double r = 0.0;
  std::size_t vertices = 0;
  std::size_t interior = 0;
  std::size_t boundary = 0;
  double sup_error = 0.0;
  double l2_error = 0.0;  ///< mu_r-weighted over interior vertices
  double residual = 0.0;
  std::size_t iterations = 0;
  double mean_value_residual = 0.0;
  bool max_principle = false;
  double energy = 0.0;
};

struct ConvergenceOptions {
  double tol = 1e-10;
  double margin = 2.0;          ///< interior rule d(x, X \ Omega) > margin * r
  double max_principle_slack = 1e-8;
};

inline ConvergenceRow dirichlet_error(const AmbientSpace& space, const Net& net, const DomainSpec& domain,
                                      const ScalarField& f, const ScalarField& reference,
                                      const ConvergenceOptions& opt = {}) {
  const auto part = partition_domain(space, net, domain, opt.margin);
  const auto data = mollify_boundary(space, net, f, part);
  const auto sol = harmonic_extend(net, part, data, opt.tol);
  const auto diag = solution_report(net, part, sol);

  ConvergenceRow row;
  row.r = net.r();
  row.vertices = net.size();
  row.interior = part.interior.size();
  row.boundary = part.boundary.size();
  row.residual = sol.residual;
  row.iterations = sol.iterations;
  row.mean_value_residual = diag.mean_value_residual;
  row.max_principle = diag.max_principle(opt.max_principle_slack);
  row.energy = sol.energy;
  double mass = 0.0;
  double acc = 0.0;
  for (std::size_t v : part.interior) {
    const double e = sol.values[v] - reference[net.vertex(v)];
    row.sup_error = std::max(row.sup_error, std::abs(e));
    acc += net.mu(v) * e * e;
    mass += net.mu(v);
  }
  row.l2_error = std::sqrt(acc / mass);
  return row;
}

inline std::vector<ConvergenceRow> convergence_study(const AmbientSpace& space, const DomainSpec& domain,
                                                     const ScalarField& f, std::vector<double> r_list,
                                                     const ScalarField& reference, const ConvergenceOptions& opt = {}) {
  space.check_field(f);
  space.check_field(reference);
  std::sort(r_list.begin(), r_list.end(), std::greater<>());
  std::vector<ConvergenceRow> rows;
  for (double r : r_list) rows.push_back(dirichlet_error(space, build_net(space, r), domain, f, reference, opt));
  return rows;
}

}  // namespace netform
