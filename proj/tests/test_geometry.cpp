#include <gtest/gtest.h>

#include <cmath>

#include "nonlocal/geometry.hpp"

using namespace nonlocal;

TEST(Domain, MakeDomainValidates) {
  auto d = make_domain(DomainKind::Interval, 1, 1.0);
  EXPECT_EQ(d.dim, 1);
  EXPECT_DOUBLE_EQ(d.radius, 1.0);
  auto b = make_domain(DomainKind::Ball, 3, 1.0);
  EXPECT_NEAR(domain_measure(b), 4.0 * pi / 3.0, 1e-14);
  EXPECT_THROW(make_domain(DomainKind::Interval, 2, 1.0), InvalidArgument);
  EXPECT_THROW(make_domain(DomainKind::Ball, 3, 0.0), InvalidArgument);
  EXPECT_THROW(make_domain(DomainKind::Ball, 3, -1.0), InvalidArgument);
}

TEST(Domain, Delta) {
  auto d = make_domain(DomainKind::Interval, 1, 1.0);
  EXPECT_DOUBLE_EQ(delta(d, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(delta(d, 0.75), 0.25);
  EXPECT_DOUBLE_EQ(delta(d, -0.75), 0.25);
  auto b = make_domain(DomainKind::Ball, 3, 2.0);
  EXPECT_DOUBLE_EQ(delta(b, 1.5), 0.5);
  const double p[3] = {0.0, 1.2, 0.9};
  EXPECT_NEAR(delta(b, std::span<const double>(p, 3)), 0.5, 1e-15);
  EXPECT_THROW(delta(d, 1.5), InvalidArgument);
}

TEST(Grid, UniformWeightsSumToLength) {
  auto g = build_grid(make_domain(DomainKind::Interval, 1, 1.0), 64, 1.0);
  EXPECT_EQ(g->size(), 64u);
  EXPECT_NEAR(g->total_weight(), 2.0, 1e-12);
}

TEST(Grid, GradedSingularIntegral) {
  auto g = build_grid(make_domain(DomainKind::Interval, 1, 1.0), 64, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i) acc += g->weights[i] / std::sqrt(g->delta[i]);
  EXPECT_NEAR(acc, 4.0, 1e-6);
}

TEST(Grid, BallVolume) {
  auto g = build_grid(make_domain(DomainKind::Ball, 3, 1.0), 64, 2.0);
  EXPECT_NEAR(g->total_weight(), 4.0 * pi / 3.0, 1e-8);
  auto g2 = build_grid(make_domain(DomainKind::Ball, 2, 1.5), 64, 2.0);
  EXPECT_NEAR(g2->total_weight(), pi * 2.25, 1e-10 * pi * 2.25);
}

TEST(Grid, Invariants) {
  for (auto kind : {DomainKind::Interval, DomainKind::Ball}) {
    const int n = kind == DomainKind::Interval ? 1 : 3;
    auto g = build_grid(make_domain(kind, n, 1.0), 128, 2.0);
    EXPECT_NEAR(g->total_weight(), domain_measure(g->domain), 1e-10 * domain_measure(g->domain));
    for (std::size_t i = 0; i < g->size(); ++i) {
      EXPECT_GT(g->weights[i], 0.0);
      EXPECT_GT(g->delta[i], 0.0);
      EXPECT_LE(g->cell_lo[i], g->nodes[i]);
      EXPECT_GE(g->cell_hi[i], g->nodes[i]);
      if (i > 0) {
        EXPECT_LT(g->nodes[i - 1], g->nodes[i]);
        EXPECT_NEAR(g->cell_hi[i - 1], g->cell_lo[i], 1e-15);
      }
    }
  }
  EXPECT_THROW(build_grid(make_domain(DomainKind::Interval, 1, 1.0), 4, 2.0), InvalidArgument);
  EXPECT_THROW(build_grid(make_domain(DomainKind::Interval, 1, 1.0), 64, 0.5), InvalidArgument);
}

TEST(Grid, WeightedIntegrals) {
  auto g = build_grid(make_domain(DomainKind::Interval, 1, 1.0), 256, 2.0);
  for (double a : {-0.5, 0.5, 1.0}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) acc += g->weights[i] * std::pow(g->delta[i], a);
    EXPECT_NEAR(acc, 2.0 / (a + 1.0), 1e-6) << "alpha=" << a;
  }
}

TEST(Grid, ConvergenceUnderRefinement) {
  auto f = [](double x) { return std::exp(x) * std::cos(3.0 * x); };
  // int_{-1}^{1} e^x cos 3x dx = [e^x (cos 3x + 3 sin 3x)/10]
  auto F = [](double x) { return std::exp(x) * (std::cos(3 * x) + 3 * std::sin(3 * x)) / 10.0; };
  const double exact = F(1.0) - F(-1.0);
  double prev = 1e300;
  for (std::size_t n : {64u, 128u, 256u}) {
    auto g = build_grid(make_domain(DomainKind::Interval, 1, 1.0), n, 2.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) acc += g->weights[i] * f(g->nodes[i]);
    const double err = std::abs(acc - exact);
    EXPECT_LE(err, 1.1 * prev + 1e-15);
    prev = err;
  }
}
