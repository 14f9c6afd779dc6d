#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "netform/netform.hpp"

using namespace netform;

namespace {

Net two_vertex(double mp, double mq) { return Net::from_parts("pair", 1.0, {0, 1}, {{1}, {0}}, {mp, mq}); }

DiscreteFunction random_function(const Net& net, Rng& rng, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(net.size());
  for (double& x : v) x = rng.uniform(lo, hi);
  return make_discrete(net, std::move(v));
}

// energy written out as the double sum over vertices and their neighbors
double energy_oracle(const Net& net, const std::vector<double>& a) {
  long double e = 0.0L;
  const long double r2 = static_cast<long double>(net.r()) * net.r();
  for (std::size_t x = 0; x < net.size(); ++x)
    for (std::size_t y : net.neighbors(x)) {
      const long double d = static_cast<long double>(a[y]) - a[x];
      e += d * d / r2 * net.mu(x);
    }
  return static_cast<double>(e);
}

Eigen::MatrixXd dense_laplacian_oracle(const Net& net) {
  const auto n = static_cast<Eigen::Index>(net.size());
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  const double r2 = net.r() * net.r();
  for (std::size_t x = 0; x < net.size(); ++x)
    for (std::size_t y : net.neighbors(x)) {
      // ordered pair (x, y) contributes mu(x) (e_y - e_x)(e_y - e_x)^T / r^2
      const auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
      L(i, i) += net.mu(x) / r2;
      L(j, j) += net.mu(x) / r2;
      L(i, j) -= net.mu(x) / r2;
      L(j, i) -= net.mu(x) / r2;
    }
  return L;
}

}  // namespace

TEST(Discretize, IntervalQuarterScale) {
  auto s = builtin::interval(101);
  auto net = build_net(s, 0.25);
  auto u = discretize(s, net, evaluate_field(s, "x0"));
  // brute force: mean of grid points k/100 with |k/100 - c| < 1/16
  for (std::size_t v = 0; v < net.size(); ++v) {
    const double c = 0.25 * static_cast<double>(v);
    double sum = 0.0;
    int count = 0;
    for (int k = 0; k <= 100; ++k) {
      if (std::abs(k / 100.0 - c) < 0.0625) {
        sum += k / 100.0;
        ++count;
      }
    }
    EXPECT_NEAR(u[v], sum / count, 1e-14);
  }
  EXPECT_NEAR(u[0], 0.03, 1e-14);
  EXPECT_NEAR(u[2], 0.5, 1e-14);
  EXPECT_NEAR(u[4], 0.97, 1e-14);
}

TEST(Discretize, LinearAndConstant) {
  auto s = builtin::square(50);
  auto net = build_net(s, 0.1);
  auto a = discretize(s, net, evaluate_field(s, "x0^2"));
  auto b = discretize(s, net, evaluate_field(s, "sin(3*x1)"));
  auto ab = discretize(s, net, evaluate_field(s, "x0^2 + sin(3*x1)"));
  auto c = discretize(s, net, evaluate_field(s, "2.5"));
  for (std::size_t v = 0; v < net.size(); ++v) {
    EXPECT_NEAR(ab[v], a[v] + b[v], 1e-14);
    EXPECT_NEAR(c[v], 2.5, 1e-15);
  }
}

TEST(Bilinear, TwoVertexExample) {
  auto net = two_vertex(0.3, 0.9);
  auto a = make_discrete(net, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(bilinear(net, a, a), 1.2);
  EXPECT_DOUBLE_EQ(energy(net, a), 1.2);
  EXPECT_EQ(bilinear(net, a, make_discrete(net, {4.0, 4.0})), 0.0);
  auto scaled = make_discrete(net, {0.0, -3.0});
  EXPECT_NEAR(energy(net, scaled), 9.0 * 1.2, 1e-14);
}

TEST(Bilinear, SymmetricAndPolarized) {
  auto s = builtin::square(50);
  auto net = build_net(s, 0.1);
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    auto a = random_function(net, rng);
    auto b = random_function(net, rng);
    std::vector<double> plus(net.size()), minus(net.size());
    for (std::size_t v = 0; v < net.size(); ++v) {
      plus[v] = a[v] + b[v];
      minus[v] = a[v] - b[v];
    }
    const double ab = bilinear(net, a, b);
    EXPECT_NEAR(ab, bilinear(net, b, a), 1e-12 * std::abs(ab));
    const double polar =
        0.25 * (energy(net, make_discrete(net, plus)) - energy(net, make_discrete(net, minus)));
    EXPECT_NEAR(ab, polar, 1e-12 * energy(net, a) + 1e-12 * energy(net, b));
  }
}

TEST(Bilinear, NetMismatch) {
  auto s = builtin::interval(101);
  auto n1 = build_net(s, 0.25);
  auto n2 = build_net(s, 0.125);
  auto a = discretize(s, n2, evaluate_field(s, "x0"));
  EXPECT_THROW(energy(n1, a), InputError);
}

TEST(Laplacian, TwoVertexAssembly) {
  auto net = two_vertex(0.3, 0.9);
  auto L = assemble_laplacian(net);
  EXPECT_DOUBLE_EQ(L.at(0, 0), 1.2);
  EXPECT_DOUBLE_EQ(L.at(1, 1), 1.2);
  EXPECT_DOUBLE_EQ(L.at(0, 1), -1.2);
  EXPECT_DOUBLE_EQ(L.at(1, 0), -1.2);
}

TEST(Laplacian, MatchesDenseOracle) {
  for (const char* spec : {"interval:101", "square:50", "gasket:6"}) {
    auto s = builtin::make(spec);
    auto net = build_net(s, 0.1);
    auto L = assemble_laplacian(net);
    const auto D = dense_laplacian_oracle(net);
    for (std::size_t i = 0; i < net.size(); ++i) {
      EXPECT_NEAR(L.row_sum(i), 0.0, 1e-12 * L.at(i, i));
      for (std::size_t j = 0; j < net.size(); ++j) {
        EXPECT_NEAR(L.at(i, j), D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), 1e-12 * D.norm());
      }
    }
    // positive semidefinite with the constants as kernel
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(D);
    EXPECT_GT(eig.eigenvalues()(0), -1e-9 * eig.eigenvalues().maxCoeff());
    EXPECT_LT(std::abs(eig.eigenvalues()(0)), 1e-9 * eig.eigenvalues().maxCoeff());
    EXPECT_GT(eig.eigenvalues()(1), 1e-9 * eig.eigenvalues().maxCoeff()) << "net graph must be connected";
  }
}

TEST(Laplacian, QuadraticFormEqualsEnergy) {
  auto s = builtin::interval(101);
  auto net = build_net(s, 0.05);
  auto L = assemble_laplacian(net);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    auto a = random_function(net, rng);
    const double e = energy(net, a);
    EXPECT_NEAR(L.quadratic(a.values), e, 1e-12 * e);
    EXPECT_NEAR(e, energy_oracle(net, a.values), 1e-12 * e);
  }
}

TEST(Truncate, Examples) {
  auto net = two_vertex(1.0, 1.0);
  auto t = truncate(make_discrete(net, {-0.5, 2.0}), 0.0, 1.0);
  EXPECT_EQ(t.values, (std::vector<double>{0.0, 1.0}));
  auto same = truncate(make_discrete(net, {0.2, 0.7}), 0.0, 1.0);
  EXPECT_EQ(same.values, (std::vector<double>{0.2, 0.7}));
  EXPECT_THROW(truncate(same, 1.0, 0.0), InputError);
  // single edge: difference 2.5 shrinks to 1.0
  const double before = energy(net, make_discrete(net, {-0.5, 2.0}));
  EXPECT_NEAR(energy(net, t) / before, 1.0 / 6.25, 1e-15);
}

TEST(Truncate, GraphMarkovOnRandomFunctions) {
  auto s = builtin::square(50);
  auto net = build_net(s, 0.1);
  Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    auto a = random_function(net, rng, -1.0, 2.0);
    const double e = energy(net, a);
    EXPECT_LE(energy(net, truncate(a, 0.0, 1.0)), e * (1.0 + 1e-12));
  }
}

TEST(Locality, OppositeCornerBumpsVanish) {
  auto s = builtin::square(100);
  auto net = build_net(s, 0.05);
  auto u = evaluate_field(s, "bump:0,0.3");
  auto v = evaluate_field(s, "bump:9999,0.3");
  auto rep = locality_test(s, net, u, v);
  EXPECT_TRUE(rep.separated());
  EXPECT_EQ(rep.value, 0.0);
  auto self = locality_test(s, net, u, u);
  EXPECT_GT(self.value, 0.0);
  EXPECT_NEAR(self.value, energy(net, discretize(s, net, u)), 1e-15 * self.value);
}

TEST(Continuity, EnergyLipschitzInSupNorm) {
  auto s = builtin::square(50);
  auto net = build_net(s, 0.1);
  const auto u = evaluate_field(s, "x0^2 - x1^2");
  const double e = energy(net, discretize(s, net, u));
  Rng rng(9);
  double last = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    std::vector<double> w(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) w[i] = u[i] + eps * rng.uniform(-1, 1);
    const double gap = std::abs(energy(net, discretize(s, net, ScalarField(w))) - e);
    EXPECT_LT(gap, last);
    last = gap;
    // |E(u+z) - E(u)| <= 2 sqrt(E(u) E(z)) + E(z) and E(z) <= 4 eps^2 sum mu deg / r^2
    double cap = 0.0;
    for (std::size_t x = 0; x < net.size(); ++x) cap += net.mu(x) * static_cast<double>(net.neighbors(x).size());
    cap *= 4.0 * eps * eps / (net.r() * net.r());
    EXPECT_LE(gap, 2.0 * std::sqrt(e * cap) + cap);
  }
}
