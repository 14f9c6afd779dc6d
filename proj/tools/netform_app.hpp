#pragma once

// Command-line front-end. `run` is kept separate from main so the tests
// can drive it in-process.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "netform/io.hpp"
#include "netform/netform.hpp"

namespace netform::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, usage_error = 2 };

struct RunConfig {
  // global
  std::string out;
  bool deterministic = false;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  // inputs
  std::string space;
  std::string net;
  std::string fn;
  std::string domain;
  std::string boundary;
  std::string reference;
  std::string u;
  std::string v;
  double r = 0.0;
  std::vector<double> r_list;
  std::vector<double> radii;
  std::vector<std::size_t> centers;
  double theta = 2.0;
  double lo = 0.0;
  double hi = 1.0;
  double margin = 2.0;
  double h = 0.0;
  std::size_t samples = 10;
};

/// Constants in effect; echoed by --version and hashed into the config id.
inline std::string provenance_constants() {
  std::ostringstream os;
  os << "default tol: 1e-10\n"
     << "cg max iterations: 10 x unknowns\n"
     << "cg preconditioner: jacobi\n"
     << "net order: ascending-index greedy\n"
     << "neighbor rule: d < 4r\n"
     << "averaging radius: r/4\n"
     << "lifted measure radius: 2r\n"
     << "reference slope scale: 4 delta\n"
     << "interior margin: 2r\n"
     << "poincare theta: 2\n"
     << "markov collar: 6r\n";
  return os.str();
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

inline std::string config_hash(const std::vector<std::string>& args) {
  std::string text = provenance_constants();
  for (const auto& a : args) text += a + '\x1f';
  return hex(fnv1a(text));
}

namespace detail {

inline void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty()) {
    out << text;
  } else {
    io::write_text(cfg.out, text);
  }
}

inline std::string joined(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? "," : "") + io::CsvReport::format(xs[k]);
  return s;
}

inline ScalarField field_arg(const AmbientSpace& space, const std::string& expr) {
  return evaluate_field(space, expr);
}

/// `--fn` for energy: a values file (JSON with "values") or an ambient expression.
inline DiscreteFunction function_arg(const AmbientSpace& space, const Net& net, const std::string& arg) {
  if (std::filesystem::is_regular_file(arg)) return io::discrete_from_json(io::read_json(arg), net);
  return discretize(space, net, field_arg(space, arg));
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw CLI::ValidationError(what);
}

inline int cmd_net(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.space.empty(), "net: --space is required");
  require(cfg.r > 0.0, "net: --r must be positive");
  require(!cfg.out.empty(), "net: --out is required");
  const auto space = io::resolve_space(cfg.space);
  const Net net = build_net(space, cfg.r);
  io::save_net(cfg.out, net);
  out << "vertices: " << net.size() << "\nedges: " << net.edges().size() << "\nmax degree: " << net.max_degree()
      << "\n";
  return ok;
}

inline int cmd_net_validate(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.net.empty(), "net validate: --net is required");
  const auto loaded = io::load_net_with_space(cfg.net);
  const auto rep = validate_net(loaded.space, loaded.net);
  const auto cmp = metric_comparison(loaded.space, loaded.net);
  io::CsvReport csv;
  csv.meta("net", cfg.net);
  csv.meta("space", loaded.net.space_ref());
  csv.meta("r", loaded.net.r());
  for (const auto& v : rep.violations) csv.meta("violation", v);
  csv.meta("chain ratio lower bound 1/2 holds", io::CsvReport::format(cmp.half_bound_holds()));
  csv.columns({"vertices", "edges", "max_degree", "min_separation", "max_covering", "connected", "hist_1_2",
               "hist_2_3", "hist_3_4", "min_chain_ratio", "max_chain_ratio", "chain_bound_ok", "ok"});
  csv.row({io::CsvReport::format(rep.vertex_count), io::CsvReport::format(rep.edge_count),
           io::CsvReport::format(rep.max_degree), io::CsvReport::format(rep.min_separation),
           io::CsvReport::format(rep.max_covering), io::CsvReport::format(rep.connected),
           io::CsvReport::format(rep.neighbor_histogram[0]), io::CsvReport::format(rep.neighbor_histogram[1]),
           io::CsvReport::format(rep.neighbor_histogram[2]), io::CsvReport::format(cmp.min_ratio),
           io::CsvReport::format(cmp.max_ratio), io::CsvReport::format(cmp.ok()),
           io::CsvReport::format(rep.ok() && cmp.ok())});
  emit(cfg, csv.str(), out);
  return rep.ok() && cmp.ok() ? ok : runtime_failure;
}

inline int cmd_energy(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.net.empty(), "energy: --net is required");
  require(!cfg.fn.empty(), "energy: --fn is required");
  const auto loaded = io::load_net_with_space(cfg.net);
  const auto f = function_arg(loaded.space, loaded.net, cfg.fn);
  io::CsvReport csv;
  csv.meta("net", cfg.net);
  csv.meta("space", loaded.net.space_ref());
  csv.meta("fn", cfg.fn);
  csv.meta("r", loaded.net.r());
  csv.columns({"r", "vertices", "energy"});
  csv.row({io::CsvReport::format(loaded.net.r()), io::CsvReport::format(loaded.net.size()),
           io::CsvReport::format(energy(loaded.net, f))});
  emit(cfg, csv.str(), out);
  return ok;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.net.empty(), "solve: --net is required");
  require(!cfg.domain.empty(), "solve: --domain is required");
  require(!cfg.boundary.empty(), "solve: --boundary is required");
  const auto loaded = io::load_net_with_space(cfg.net);
  const auto domain = parse_domain(cfg.domain);
  const auto part = partition_domain(loaded.space, loaded.net, domain, cfg.margin);
  DiscreteFunction data;
  if (std::filesystem::is_regular_file(cfg.boundary)) {
    data = io::discrete_from_json(io::read_json(cfg.boundary), loaded.net);
  } else {
    data = mollify_boundary(loaded.space, loaded.net, field_arg(loaded.space, cfg.boundary), part);
  }
  const auto sol = harmonic_extend(loaded.net, part, data, cfg.tol);
  const auto diag = solution_report(loaded.net, part, sol);
  auto j = io::solution_to_json(sol, part, cfg.net);
  j["mean_value_residual"] = diag.mean_value_residual;
  j["max_principle"] = diag.max_principle(1e-8);
  if (cfg.out.empty()) {
    out << j.dump(1) << "\n";
  } else {
    io::write_json(cfg.out, j);
    out << "interior: " << part.interior.size() << "\nboundary: " << part.boundary.size()
        << "\niterations: " << sol.iterations << "\nresidual: " << io::CsvReport::format(sol.residual) << "\n";
  }
  return ok;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.space.empty() && !cfg.fn.empty(), "sweep: --space and --fn are required");
  require(!cfg.r_list.empty(), "sweep: --r needs at least one scale");
  const auto space = io::resolve_space(cfg.space);
  const auto rep = energy_sweep(space, field_arg(space, cfg.fn), cfg.r_list, cfg.h);
  io::CsvReport csv;
  csv.meta("space", cfg.space);
  csv.meta("fn", cfg.fn);
  csv.meta("r", joined(cfg.r_list));
  csv.meta("reference scale", rep.reference_scale);
  csv.meta("sup energy", rep.sup_energy);
  csv.meta("energy band", "[" + io::CsvReport::format(rep.min_energy) + ", " + io::CsvReport::format(rep.sup_energy) + "]");
  csv.meta("liminf proxy (min over two smallest r)", rep.liminf_proxy);
  csv.meta("ratio range", "[" + io::CsvReport::format(rep.min_ratio) + ", " + io::CsvReport::format(rep.max_ratio) + "]");
  csv.columns({"r", "vertices", "energy", "reference", "ratio"});
  for (const auto& row : rep.rows) {
    csv.row({io::CsvReport::format(row.r), io::CsvReport::format(row.vertices), io::CsvReport::format(row.energy),
             io::CsvReport::format(row.reference),
             row.degenerate ? std::string("degenerate") : io::CsvReport::format(row.ratio)});
  }
  emit(cfg, csv.str(), out);
  return ok;
}

inline int cmd_poincare(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.net.empty(), "poincare: --net is required");
  require(!cfg.radii.empty(), "poincare: --R needs at least one radius");
  require(cfg.theta >= 1.0, "poincare: --theta must be >= 1");
  const auto loaded = io::load_net_with_space(cfg.net);
  std::vector<ScalarField> fields;
  if (!cfg.fn.empty()) {
    fields.push_back(field_arg(loaded.space, cfg.fn));
  } else {
    Rng rng(cfg.seed);
    for (std::size_t k = 0; k < cfg.samples; ++k) fields.push_back(random_lipschitz_field(loaded.space, rng));
  }
  std::vector<std::size_t> centers = cfg.centers;
  if (centers.empty()) {
    const std::size_t n = loaded.net.size();
    for (std::size_t k = 0; k < 5 && k < n; ++k) centers.push_back(k * n / 5);
  }
  for (std::size_t c : centers) require(c < loaded.net.size(), "poincare: center outside the net");
  const auto rep = poincare_constant(loaded.space, loaded.net, fields, centers, cfg.radii, cfg.theta);
  io::CsvReport csv;
  csv.meta("net", cfg.net);
  csv.meta("space", loaded.net.space_ref());
  csv.meta("r", loaded.net.r());
  csv.meta("theta", cfg.theta);
  csv.meta("seed", io::CsvReport::format(static_cast<std::size_t>(cfg.seed)));
  csv.meta("max implied constant", rep.max_constant);
  csv.meta("holds at reported constant", io::CsvReport::format(rep.holds(rep.max_constant)));
  csv.columns({"center", "R", "sample", "ball_size", "lhs", "rhs", "implied"});
  for (const auto& row : rep.rows) {
    csv.row({io::CsvReport::format(row.center), io::CsvReport::format(row.radius), io::CsvReport::format(row.sample),
             io::CsvReport::format(row.ball_size), io::CsvReport::format(row.lhs), io::CsvReport::format(row.rhs),
             io::CsvReport::format(row.implied)});
  }
  emit(cfg, csv.str(), out);
  return ok;
}

inline int cmd_markov(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.space.empty() && !cfg.fn.empty(), "markov: --space and --fn are required");
  require(!cfg.r_list.empty(), "markov: --r needs at least one scale");
  require(cfg.lo <= cfg.hi, "markov: --lo must not exceed --hi");
  const auto space = io::resolve_space(cfg.space);
  const auto u = field_arg(space, cfg.fn);
  const auto boundary = level_boundary(space, u, cfg.lo, cfg.hi);
  auto rs = cfg.r_list;
  std::sort(rs.begin(), rs.end(), std::greater<>());
  io::CsvReport csv;
  csv.meta("space", cfg.space);
  csv.meta("fn", cfg.fn);
  csv.meta("clamp", "[" + io::CsvReport::format(cfg.lo) + ", " + io::CsvReport::format(cfg.hi) + "]");
  csv.meta("r", joined(rs));
  csv.meta("collar radius", "6r");
  csv.columns({"r", "energy", "energy_truncated", "graph_energy_truncated", "lipschitz", "collar_mass",
               "fitted_constant", "graph_markov"});
  for (double r : rs) {
    const auto rep = markov_gap(space, build_net(space, r), u, cfg.lo, cfg.hi, &boundary);
    csv.row({io::CsvReport::format(r), io::CsvReport::format(rep.energy), io::CsvReport::format(rep.energy_truncated),
             io::CsvReport::format(rep.graph_energy_truncated), io::CsvReport::format(rep.lipschitz),
             io::CsvReport::format(rep.collar_mass), io::CsvReport::format(rep.fitted_constant),
             io::CsvReport::format(rep.graph_markov_holds())});
  }
  emit(cfg, csv.str(), out);
  return ok;
}

inline int cmd_trace(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.space.empty() && !cfg.domain.empty(), "trace: --space and --domain are required");
  require(!cfg.u.empty() && !cfg.v.empty(), "trace: --u and --v are required");
  const auto space = io::resolve_space(cfg.space);
  const auto domain = parse_domain(cfg.domain);
  const auto u = field_arg(space, cfg.u);
  const auto v = field_arg(space, cfg.v);
  const auto traced = matching_trace(space, domain, u, v);
  const auto check = verify_matching_trace(space, domain, u, v, traced);
  const auto w = complement_distance(space, domain.resolve(space));
  io::CsvReport csv;
  csv.meta("space", cfg.space);
  csv.meta("domain", cfg.domain);
  csv.meta("u", cfg.u);
  csv.meta("v", cfg.v);
  csv.meta("outside mismatches", io::CsvReport::format(check.outside_mismatches));
  csv.meta("domination failures", io::CsvReport::format(check.domination_failures));
  csv.columns({"point", "u", "v", "w", "traced"});
  for (std::size_t i = 0; i < space.size(); ++i) {
    csv.row({io::CsvReport::format(i), io::CsvReport::format(u[i]), io::CsvReport::format(v[i]),
             io::CsvReport::format(w[i]), io::CsvReport::format(traced[i])});
  }
  emit(cfg, csv.str(), out);
  return check.ok() ? ok : runtime_failure;
}

inline int cmd_converge(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.space.empty() && !cfg.domain.empty(), "converge: --space and --domain are required");
  require(!cfg.boundary.empty() && !cfg.reference.empty(), "converge: --boundary and --reference are required");
  require(!cfg.r_list.empty(), "converge: --r needs at least one scale");
  const auto space = io::resolve_space(cfg.space);
  ConvergenceOptions opt;
  opt.tol = cfg.tol;
  opt.margin = cfg.margin;
  const auto rows = convergence_study(space, parse_domain(cfg.domain), field_arg(space, cfg.boundary), cfg.r_list,
                                      field_arg(space, cfg.reference), opt);
  io::CsvReport csv;
  csv.meta("space", cfg.space);
  csv.meta("domain", cfg.domain);
  csv.meta("boundary", cfg.boundary);
  csv.meta("reference", cfg.reference);
  csv.meta("tol", cfg.tol);
  csv.meta("interior margin (units of r)", cfg.margin);
  csv.columns({"r", "vertices", "interior", "boundary", "sup_error", "l2_error", "residual", "iterations",
               "mean_value_residual", "max_principle"});
  for (const auto& row : rows) {
    csv.row({io::CsvReport::format(row.r), io::CsvReport::format(row.vertices), io::CsvReport::format(row.interior),
             io::CsvReport::format(row.boundary), io::CsvReport::format(row.sup_error),
             io::CsvReport::format(row.l2_error), io::CsvReport::format(row.residual),
             io::CsvReport::format(row.iterations), io::CsvReport::format(row.mean_value_residual),
             io::CsvReport::format(row.max_principle)});
  }
  emit(cfg, csv.str(), out);
  return ok;
}

inline void error_record(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  nlohmann::json j;
  j["error"] = message;
  j["kind"] = kind;
  j["exit"] = code;
  err << j.dump() << "\n";
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig cfg;
  CLI::App app{"r-net graph energies, Dirichlet solves and inequality checks", "netform"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  bool show_version = false;
  app.add_flag("--version", show_version, "Print version, config hash and constants");
  app.add_option("--out", cfg.out, "Output file (default: stdout)");
  app.add_flag("--deterministic", cfg.deterministic, "Force sequential reductions (always on in this build)");
  app.add_option("--tol", cfg.tol, "Relative CG residual tolerance")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "Seed for random test fields");

  auto* net = app.add_subcommand("net", "Build an r-net from a space");
  net->add_option("--space", cfg.space, "Builtin (interval:101, square:100, circle:256, gasket:6) or space file");
  net->add_option("--r", cfg.r, "Net scale")->check(CLI::PositiveNumber);
  auto* validate = net->add_subcommand("validate", "Check a stored net against its space");
  validate->add_option("--net", cfg.net, "Net file")->required();

  auto* en = app.add_subcommand("energy", "Graph energy of a function on a stored net");
  en->add_option("--net", cfg.net, "Net file")->required();
  en->add_option("--fn", cfg.fn, "Ambient expression or values file")->required();

  auto* solve = app.add_subcommand("solve", "Discrete Dirichlet problem on a stored net");
  solve->add_option("--net", cfg.net, "Net file")->required();
  solve->add_option("--domain", cfg.domain, "ball:<i>,<R> | box:<lo0>,<hi0>,... | not:<domain>")->required();
  solve->add_option("--boundary", cfg.boundary, "Ambient expression or values file")->required();
  solve->add_option("--margin", cfg.margin, "Interior rule d(x, X \\ Omega) > margin * r")->check(CLI::PositiveNumber);

  auto* sweep = app.add_subcommand("sweep", "Energy comparability sweep over scales");
  sweep->add_option("--space", cfg.space, "Builtin or space file")->required();
  sweep->add_option("--fn", cfg.fn, "Ambient expression")->required();
  sweep->add_option("--r", cfg.r_list, "Scales")->delimiter(',')->required()->check(CLI::PositiveNumber);
  sweep->add_option("--ref-scale", cfg.h, "Reference slope scale (default 4 delta)")->check(CLI::PositiveNumber);

  auto* poincare = app.add_subcommand("poincare", "Implied Poincare constants on chain balls");
  poincare->add_option("--net", cfg.net, "Net file")->required();
  poincare->add_option("--theta", cfg.theta, "Ball enlargement factor");
  poincare->add_option("--R", cfg.radii, "Chain-ball radii")->delimiter(',')->required()->check(CLI::PositiveNumber);
  poincare->add_option("--centers", cfg.centers, "Center vertices (default: 5 spread vertices)")->delimiter(',');
  poincare->add_option("--fn", cfg.fn, "Single ambient expression instead of random fields");
  poincare->add_option("--samples", cfg.samples, "Number of seeded random fields")->check(CLI::PositiveNumber);

  auto* markov = app.add_subcommand("markov", "Truncation energy gap and collar masses");
  markov->add_option("--space", cfg.space, "Builtin or space file")->required();
  markov->add_option("--fn", cfg.fn, "Ambient expression")->required();
  markov->add_option("--lo", cfg.lo, "Lower clamp");
  markov->add_option("--hi", cfg.hi, "Upper clamp");
  markov->add_option("--r", cfg.r_list, "Scales")->delimiter(',')->required()->check(CLI::PositiveNumber);

  auto* trace = app.add_subcommand("trace", "Matching-boundary-values construction");
  trace->add_option("--space", cfg.space, "Builtin or space file")->required();
  trace->add_option("--domain", cfg.domain, "Domain")->required();
  trace->add_option("--u", cfg.u, "Target field")->required();
  trace->add_option("--v", cfg.v, "Approximating field")->required();

  auto* converge = app.add_subcommand("converge", "Dirichlet error against a reference field over scales");
  converge->add_option("--space", cfg.space, "Builtin or space file")->required();
  converge->add_option("--domain", cfg.domain, "Domain")->required();
  converge->add_option("--boundary", cfg.boundary, "Boundary data expression")->required();
  converge->add_option("--reference", cfg.reference, "Reference field expression")->required();
  converge->add_option("--r", cfg.r_list, "Scales")->delimiter(',')->required()->check(CLI::PositiveNumber);
  converge->add_option("--margin", cfg.margin, "Interior rule d(x, X \\ Omega) > margin * r")->check(CLI::PositiveNumber);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    // CLI11 consumes the vector from the back
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    detail::error_record(err, "usage", e.what(), usage_error);
    return usage_error;
  }

  if (show_version) {
    out << "netform " << version << "\nconfig hash: " << config_hash(args) << "\n" << provenance_constants();
    return ok;
  }

  try {
    if (*validate) return detail::cmd_net_validate(cfg, out);
    if (*net) return detail::cmd_net(cfg, out);
    if (*en) return detail::cmd_energy(cfg, out);
    if (*solve) return detail::cmd_solve(cfg, out);
    if (*sweep) return detail::cmd_sweep(cfg, out);
    if (*poincare) return detail::cmd_poincare(cfg, out);
    if (*markov) return detail::cmd_markov(cfg, out);
    if (*trace) return detail::cmd_trace(cfg, out);
    if (*converge) return detail::cmd_converge(cfg, out);
    detail::error_record(err, "usage", "no subcommand given (try --help)", usage_error);
    return usage_error;
  } catch (const CLI::ValidationError& e) {
    detail::error_record(err, "usage", e.what(), usage_error);
    return usage_error;
  } catch (const InputError& e) {
    detail::error_record(err, "input", e.what(), runtime_failure);
    return runtime_failure;
  } catch (const ComputeError& e) {
    detail::error_record(err, "compute", e.what(), runtime_failure);
    return runtime_failure;
  } catch (const std::exception& e) {
    detail::error_record(err, "runtime", e.what(), runtime_failure);
    return runtime_failure;
  }
}

}  // namespace netform::cli
