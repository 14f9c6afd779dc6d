#pragma once

// JSON file formats for spaces, nets, discrete functions and Dirichlet
// solutions, plus the CSV report writer.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "netform/ambient.hpp"
#include "netform/builtin.hpp"
#include "netform/error.hpp"
#include "netform/forms.hpp"
#include "netform/net.hpp"
#include "netform/solver.hpp"

namespace netform::io {

using nlohmann::json;

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("parse error in " + path.string() + ": " + e.what());
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

// ---------------------------------------------------------------------------
// Space files: points, weights, metric ("euclidean" | "graph"), edges, delta

inline AmbientSpace space_from_json(const json& j) {
  try {
    const auto weights = j.at("weights").get<std::vector<double>>();
    const double delta = j.at("delta").get<double>();
    const auto metric = j.at("metric").get<std::string>();

    std::size_t dim = 0;
    std::vector<double> coords;
    if (j.contains("points")) {
      const auto pts = j.at("points").get<std::vector<std::vector<double>>>();
      if (pts.size() != weights.size()) throw InputError("points and weights differ in length");
      for (const auto& p : pts) {
        if (p.empty()) throw InputError("missing coordinates");
        if (dim == 0) dim = p.size();
        if (p.size() != dim) throw InputError("points have unequal dimension");
        coords.insert(coords.end(), p.begin(), p.end());
      }
    }

    if (metric == "euclidean") {
      if (j.contains("edges")) throw InputError("edges are only allowed with metric \"graph\"");
      if (dim == 0) throw InputError("missing coordinates in euclidean mode");
      return AmbientSpace::euclidean(dim, std::move(coords), weights, delta);
    }
    if (metric == "graph") {
      if (!j.contains("edges")) throw InputError("metric \"graph\" requires edges");
      std::vector<ProximityEdge> edges;
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw InputError("edge must be [i, j, length]");
        const auto a = e[0].get<long long>();
        const auto b = e[1].get<long long>();
        if (a < 0 || b < 0) throw InputError("edge endpoint out of range");
        edges.push_back({static_cast<std::size_t>(a), static_cast<std::size_t>(b), e[2].get<double>()});
      }
      return AmbientSpace::graph(weights, std::move(edges), delta, dim, std::move(coords));
    }
    throw InputError("unknown metric \"" + metric + "\"");
  } catch (const json::exception& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
}

inline json space_to_json(const AmbientSpace& space) {
  json j;
  if (space.mode() == MetricMode::arc) throw InputError("arc-metric spaces have no file form; use the builtin");
  if (space.has_coordinates()) {
    json pts = json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
      const auto p = space.point(i);
      pts.push_back(std::vector<double>(p.begin(), p.end()));
    }
    j["points"] = std::move(pts);
  }
  j["weights"] = std::vector<double>(space.weights().begin(), space.weights().end());
  j["metric"] = space.mode() == MetricMode::graph ? "graph" : "euclidean";
  if (space.mode() == MetricMode::graph) {
    json edges = json::array();
    for (const auto& e : space.edges()) edges.push_back(json::array({e.a, e.b, e.length}));
    j["edges"] = std::move(edges);
  }
  j["delta"] = space.delta();
  return j;
}

inline AmbientSpace load_space(const std::filesystem::path& path) {
  auto s = space_from_json(read_json(path));
  s.set_label(path.string());
  return s;
}

/// A builtin descriptor ("square:100") or a space file path. Relative
/// paths are tried against `base_dir` when not found as given.
inline AmbientSpace resolve_space(const std::string& ref, const std::filesystem::path& base_dir = {}) {
  if (builtin::is_builtin(ref)) return builtin::make(ref);
  std::filesystem::path p(ref);
  if (!std::filesystem::exists(p) && !base_dir.empty() && p.is_relative() &&
      std::filesystem::exists(base_dir / p)) {
    auto s = space_from_json(read_json(base_dir / p));
    s.set_label(ref);
    return s;
  }
  return load_space(p);
}

// ---------------------------------------------------------------------------
// Net files: space, r, vertices, adjacency (pairs), mu_r

inline json net_to_json(const Net& net) {
  json j;
  j["space"] = net.space_ref();
  j["r"] = net.r();
  j["build_order"] = Net::build_order();
  j["vertices"] = net.vertices();
  json adj = json::array();
  for (auto [a, b] : net.edges()) adj.push_back(json::array({a, b}));
  j["adjacency"] = std::move(adj);
  j["mu_r"] = net.mu_r();
  return j;
}

inline Net net_from_json(const json& j) {
  try {
    const auto vertices = j.at("vertices").get<std::vector<std::size_t>>();
    std::vector<std::vector<std::size_t>> adjacency(vertices.size());
    for (const auto& pair : j.at("adjacency")) {
      if (!pair.is_array() || pair.size() != 2) throw InputError("adjacency entries must be pairs");
      const auto a = pair[0].get<std::size_t>();
      const auto b = pair[1].get<std::size_t>();
      if (a >= vertices.size() || b >= vertices.size()) throw InputError("adjacency refers to a missing vertex");
      adjacency[a].push_back(b);
      adjacency[b].push_back(a);
    }
    return Net::from_parts(j.value("space", std::string{}), j.at("r").get<double>(), vertices, std::move(adjacency),
                           j.at("mu_r").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
}

inline void save_net(const std::filesystem::path& path, const Net& net) { write_json(path, net_to_json(net)); }
inline Net load_net(const std::filesystem::path& path) { return net_from_json(read_json(path)); }

/// The net together with the space it was built on.
struct LoadedNet {
  AmbientSpace space;
  Net net;
};

inline LoadedNet load_net_with_space(const std::filesystem::path& path) {
  Net net = load_net(path);
  if (net.space_ref().empty()) throw InputError("net file does not name its space");
  AmbientSpace space = resolve_space(net.space_ref(), path.parent_path());
  return LoadedNet{std::move(space), std::move(net)};
}

// ---------------------------------------------------------------------------
// Discrete functions and solutions

inline json discrete_to_json(const DiscreteFunction& f, const std::string& net_ref) {
  json j;
  j["net"] = net_ref;
  j["values"] = f.values;
  return j;
}

inline DiscreteFunction discrete_from_json(const json& j, const Net& net) {
  try {
    return make_discrete(net, j.at("values").get<std::vector<double>>());
  } catch (const json::exception& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
}

inline json solution_to_json(const HarmonicSolution& sol, const DomainPartition& part, const std::string& net_ref) {
  json j;
  j["net"] = net_ref;
  j["values"] = sol.values.values;
  j["residual"] = sol.residual;
  j["iterations"] = sol.iterations;
  j["energy"] = sol.energy;
  j["interior"] = part.interior;
  j["boundary"] = part.boundary;
  j["exterior"] = part.exterior;
  return j;
}

// ---------------------------------------------------------------------------
// CSV reports with a leading "# key: value" metadata block

class CsvReport {
 public:
  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void meta(const std::string& key, double value) { meta_.emplace_back(key, format(value)); }
  void columns(std::vector<std::string> names) { columns_ = std::move(names); }
  void row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

  static std::string format(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
  }
  static std::string format(std::size_t v) { return std::to_string(v); }
  static std::string format(bool v) { return v ? "true" : "false"; }

  std::string str() const {
    std::ostringstream os;
    for (const auto& [k, v] : meta_) os << "# " << k << ": " << v << "\n";
    join(os, columns_);
    for (const auto& r : rows_) join(os, r);
    return os.str();
  }

 private:
  static void join(std::ostringstream& os, const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) os << (k ? "," : "") << cells[k];
    os << "\n";
  }

  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace netform::io
