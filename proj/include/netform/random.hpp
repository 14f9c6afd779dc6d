#pragma once

// Seeded generators for test fields. Draws are derived from the raw
// mt19937_64 stream so sequences are identical across standard libraries.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "netform/ambient.hpp"

namespace netform {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(unit() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

/// Lipschitz field: three random tent bumps plus a multiple of the
/// distance to a random point. Works on any metric, coordinates or not.
inline ScalarField random_lipschitz_field(const AmbientSpace& space, Rng& rng) {
  struct Bump {
    std::size_t center;
    double radius;
    double amplitude;
  };
  std::vector<Bump> bumps;
  for (int k = 0; k < 3; ++k) {
    const std::size_t c = rng.index(space.size());
    const double radius = rng.uniform(0.2, 0.6);
    const double amp = rng.uniform(-1.0, 1.0);
    bumps.push_back({c, radius, amp});
  }
  const std::size_t anchor = rng.index(space.size());
  const double slope = rng.uniform(-1.0, 1.0);

  std::vector<double> values(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    double v = slope * space.distance(i, anchor);
    for (const auto& b : bumps) v += b.amplitude * std::max(0.0, 1.0 - space.distance(i, b.center) / b.radius);
    values[i] = v;
  }
  return ScalarField(std::move(values));
}

}  // namespace netform
