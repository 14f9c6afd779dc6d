#pragma once

// Discrete Dirichlet problems on an r-net: split the vertices against a
// domain, fix mollified data off the interior and minimize the graph
// energy, i.e. solve L_II x_I = -L_IB x_B.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "netform/ambient.hpp"
#include "netform/error.hpp"
#include "netform/forms.hpp"
#include "netform/net.hpp"
#include "netform/sparse.hpp"

namespace netform {

class DomainSpec {
 public:
  struct Ball {
    std::size_t center = 0;
    double radius = 0.0;
  };
  /// Open coordinate box lo[k] < x_k < hi[k].
  struct Box {
    std::vector<double> lo;
    std::vector<double> hi;
  };
  struct Complement {
    std::shared_ptr<const DomainSpec> inner;
  };
  struct Indicator {
    std::vector<bool> mask;
  };

  static DomainSpec ball(std::size_t center, double radius) { return DomainSpec(Ball{center, radius}); }
  static DomainSpec box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty()) throw InputError("box bounds malformed");
    return DomainSpec(Box{std::move(lo), std::move(hi)});
  }
  static DomainSpec complement(DomainSpec inner) {
    return DomainSpec(Complement{std::make_shared<const DomainSpec>(std::move(inner))});
  }
  static DomainSpec indicator(std::vector<bool> mask) { return DomainSpec(Indicator{std::move(mask)}); }

  /// Membership mask over ambient points. Throws unless the domain and
  /// its complement are both nonempty.
  std::vector<bool> resolve(const AmbientSpace& space) const {
    auto mask = resolve_raw(space);
    const auto inside = std::count(mask.begin(), mask.end(), true);
    if (inside == 0) throw InputError("domain is empty");
    if (static_cast<std::size_t>(inside) == mask.size()) throw InputError("domain has empty complement");
    return mask;
  }

  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(
        [&os](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Ball>) {
            os << "ball:" << s.center << "," << s.radius;
          } else if constexpr (std::is_same_v<T, Box>) {
            os << "box:";
            for (std::size_t k = 0; k < s.lo.size(); ++k) os << (k ? "," : "") << s.lo[k] << "," << s.hi[k];
          } else if constexpr (std::is_same_v<T, Complement>) {
            os << "not:" << s.inner->describe();
          } else {
            os << "mask:" << std::count(s.mask.begin(), s.mask.end(), true);
          }
        },
        shape_);
    return os.str();
  }

 private:
  using Shape = std::variant<Ball, Box, Complement, Indicator>;
  explicit DomainSpec(Shape s) : shape_(std::move(s)) {}

  std::vector<bool> resolve_raw(const AmbientSpace& space) const {
    const std::size_t n = space.size();
    std::vector<bool> mask(n, false);
    if (const auto* b = std::get_if<Ball>(&shape_)) {
      if (!(b->radius > 0.0)) throw InputError("domain ball radius must be positive");
      for (std::size_t j = 0; j < n; ++j) mask[j] = space.distance(b->center, j) < b->radius;
    } else if (const auto* x = std::get_if<Box>(&shape_)) {
      if (x->lo.size() > space.dim()) throw InputError("box has more bounds than the space has coordinates");
      for (std::size_t j = 0; j < n; ++j) {
        bool in = true;
        for (std::size_t k = 0; k < x->lo.size() && in; ++k) {
          const double c = space.coordinate(j, k);
          in = x->lo[k] < c && c < x->hi[k];
        }
        mask[j] = in;
      }
    } else if (const auto* c = std::get_if<Complement>(&shape_)) {
      mask = c->inner->resolve_raw(space);
      mask.flip();
    } else {
      const auto& m = std::get<Indicator>(shape_).mask;
      if (m.size() != n) throw InputError("indicator mask length does not match the space");
      mask = m;
    }
    return mask;
  }

  Shape shape_;
};

/// Parses "ball:<i>,<R>", "box:<lo0>,<hi0>[,<lo1>,<hi1>...]" and "not:<domain>".
inline DomainSpec parse_domain(std::string_view text) {
  if (text.starts_with("not:")) return DomainSpec::complement(parse_domain(text.substr(4)));
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw InputError("bad domain: " + std::string(text));
  const std::string kind(text.substr(0, colon));
  std::vector<double> nums;
  std::string rest(text.substr(colon + 1));
  std::stringstream ss(rest);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      nums.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw InputError("");
    } catch (const std::exception&) {
      throw InputError("bad number in domain: " + std::string(text));
    }
  }
  if (kind == "ball") {
    if (nums.size() != 2 || nums[0] < 0 || nums[0] != std::floor(nums[0])) {
      throw InputError("ball domain needs <index>,<radius>");
    }
    return DomainSpec::ball(static_cast<std::size_t>(nums[0]), nums[1]);
  }
  if (kind == "box") {
    if (nums.empty() || nums.size() % 2 != 0) throw InputError("box domain needs lo,hi pairs");
    std::vector<double> lo, hi;
    for (std::size_t k = 0; k < nums.size(); k += 2) {
      lo.push_back(nums[k]);
      hi.push_back(nums[k + 1]);
    }
    return DomainSpec::box(std::move(lo), std::move(hi));
  }
  throw InputError("unknown domain kind: " + kind);
}

enum class VertexRole { interior, boundary, exterior };

struct DomainPartition {
  std::vector<std::size_t> interior;
  std::vector<std::size_t> boundary;
  std::vector<std::size_t> exterior;
  std::vector<VertexRole> role;  ///< per net vertex
  double margin = 2.0;           ///< interior threshold, in units of r
};

/// Default interior rule: d(x, X \ Omega) > 2r, so the whole lifted-measure
/// ball B(x, 2r) lies in Omega. Boundary vertices are the non-interior
/// neighbors of interior vertices; everything else is exterior.
inline DomainPartition partition_domain(const AmbientSpace& space, const Net& net,
                                        const DomainSpec& domain, double margin = 2.0) {
  if (!(margin > 0.0)) throw InputError("interior margin must be positive");
  auto outside = domain.resolve(space);
  outside.flip();

  DomainPartition p;
  p.margin = margin;
  p.role.assign(net.size(), VertexRole::exterior);
  for (std::size_t v = 0; v < net.size(); ++v) {
    if (space.distance_to_set(net.vertex(v), outside) > margin * net.r()) p.role[v] = VertexRole::interior;
  }
  for (std::size_t v = 0; v < net.size(); ++v) {
    if (p.role[v] != VertexRole::interior) continue;
    for (std::size_t w : net.neighbors(v)) {
      if (p.role[w] == VertexRole::exterior) p.role[w] = VertexRole::boundary;
    }
  }
  for (std::size_t v = 0; v < net.size(); ++v) {
    switch (p.role[v]) {
      case VertexRole::interior: p.interior.push_back(v); break;
      case VertexRole::boundary: p.boundary.push_back(v); break;
      case VertexRole::exterior: p.exterior.push_back(v); break;
    }
  }
  if (p.interior.empty()) throw ComputeError("domain too thin for scale r");
  return p;
}

/// Boundary and exterior vertices get the r/4-ball average of f; interior
/// vertices start at the mu_r-weighted mean of the boundary values.
inline DiscreteFunction mollify_boundary(const AmbientSpace& space, const Net& net, const ScalarField& f,
                                         const DomainPartition& part) {
  space.check_field(f);
  std::vector<double> values(net.size(), 0.0);
  double mass = 0.0;
  double sum = 0.0;
  for (std::size_t v = 0; v < net.size(); ++v) {
    if (part.role[v] == VertexRole::interior) continue;
    values[v] = space.average(f, net.vertex(v), net.r() / 4.0);
    if (part.role[v] == VertexRole::boundary) {
      mass += net.mu(v);
      sum += net.mu(v) * values[v];
    }
  }
  const double start = mass > 0.0 ? sum / mass : 0.0;
  for (std::size_t v : part.interior) values[v] = start;
  return DiscreteFunction{net.id(), std::move(values)};
}

struct HarmonicSolution {
  DiscreteFunction values;
  double residual = 0.0;
  std::size_t iterations = 0;
  double energy = 0.0;
};

/// Energy minimizer among functions equal to `data` off the interior.
inline HarmonicSolution harmonic_extend(const Net& net, const DomainPartition& part, const DiscreteFunction& data,
                                        double tol = 1e-10, std::size_t max_iter = 0) {
  check_on_net(net, data);
  if (part.role.size() != net.size()) throw InputError("partition does not match the net");
  if (part.interior.empty()) throw ComputeError("domain too thin for scale r");
  if (part.boundary.empty()) throw ComputeError("empty boundary");
  if (max_iter == 0) max_iter = 10 * net.size();

  const SparseForm lap = assemble_laplacian(net);
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> local(net.size(), none);
  for (std::size_t k = 0; k < part.interior.size(); ++k) local[part.interior[k]] = k;

  std::vector<SparseForm::Entry> block;
  std::vector<double> rhs(part.interior.size(), 0.0);
  std::vector<double> start(part.interior.size(), 0.0);
  for (std::size_t k = 0; k < part.interior.size(); ++k) {
    const std::size_t v = part.interior[k];
    start[k] = data[v];
    lap.for_each_in_row(v, [&](std::size_t w, double value) {
      if (local[w] != none) {
        if (local[w] >= k) block.push_back({k, local[w], value});
      } else {
        rhs[k] -= value * data[w];
      }
    });
  }
  const auto a_ii = SparseForm::from_entries(part.interior.size(), std::move(block), FormKind::general);
  const CgResult cg = cg_solve(a_ii, rhs, tol, max_iter, start);

  HarmonicSolution sol;
  sol.values = data;
  for (std::size_t k = 0; k < part.interior.size(); ++k) sol.values.values[part.interior[k]] = cg.x[k];
  sol.residual = cg.residual;
  sol.iterations = cg.iterations;
  sol.energy = energy(net, sol.values);
  return sol;
}

struct SolutionDiagnostics {
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  double interior_min = 0.0;
  double interior_max = 0.0;
  double mean_value_residual = 0.0;  ///< worst |u(x) - weighted neighbor mean| over interior
  double energy = 0.0;

  double low_margin() const { return interior_min - boundary_min; }
  double high_margin() const { return boundary_max - interior_max; }
  bool max_principle(double slack) const { return low_margin() >= -slack && high_margin() >= -slack; }
  bool strict_max_principle() const { return low_margin() > 0.0 && high_margin() > 0.0; }
};

/// Mean-value weights are the Laplacian weights (mu_r(x) + mu_r(y)) / r^2.
inline SolutionDiagnostics solution_report(const Net& net, const DomainPartition& part, const HarmonicSolution& sol) {
  const auto& u = sol.values;
  check_on_net(net, u);
  SolutionDiagnostics d;
  d.energy = sol.energy;
  d.boundary_min = std::numeric_limits<double>::infinity();
  d.boundary_max = -std::numeric_limits<double>::infinity();
  for (std::size_t v : part.boundary) {
    d.boundary_min = std::min(d.boundary_min, u[v]);
    d.boundary_max = std::max(d.boundary_max, u[v]);
  }
  d.interior_min = std::numeric_limits<double>::infinity();
  d.interior_max = -std::numeric_limits<double>::infinity();
  for (std::size_t v : part.interior) {
    d.interior_min = std::min(d.interior_min, u[v]);
    d.interior_max = std::max(d.interior_max, u[v]);
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t w : net.neighbors(v)) {
      const double wt = net.mu(v) + net.mu(w);
      wsum += wt;
      acc += wt * u[w];
    }
    if (wsum > 0.0) d.mean_value_residual = std::max(d.mean_value_residual, std::abs(u[v] - acc / wsum));
  }
  return d;
}

}  // namespace netform
