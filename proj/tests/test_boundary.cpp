#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nonlocal/boundary.hpp"

using namespace nonlocal;

namespace {

const DomainSpec unit_interval = make_domain(DomainKind::Interval, 1, 1.0);
const DomainSpec unit_ball3 = make_domain(DomainKind::Ball, 3, 1.0);

// Torsion G_0(1) = c (1 - x^2)^s on the interval; c from the closed form.
double torsion_constant(double s) {
  return std::tgamma(0.5) / (std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(0.5 + s));
}

}  // namespace

TEST(Martin, HarmonicProfileIsExact) {
  for (double s : {0.3, 0.5, 0.75}) {
    const auto op = make_operator(OperatorKind::RFL, s, unit_interval);
    const GridPtr g = build_grid(op.domain, 256);
    const GridFunction m1 = martin_apply(op, g, BoundaryData::constant(1.0));
    Eigen::ArrayXd q(static_cast<Eigen::Index>(g->size()));
    for (std::size_t i = 0; i < g->size(); ++i)
      q[static_cast<Eigen::Index>(i)] = m1[i] * std::pow(1.0 - g->nodes[i] * g->nodes[i], 1.0 - s);
    const double mean = q.mean();
    EXPECT_LT(std::sqrt((q - mean).square().mean()) / mean, 1e-8) << s;
  }
}

TEST(Martin, ClassicalIsAffine) {
  const auto op = make_operator(OperatorKind::Classical, 1.0, unit_interval);
  const GridPtr g = build_grid(op.domain, 128);
  const GridFunction v = martin_apply(op, g, BoundaryData{3.0, -1.0});
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double x = g->nodes[i];
    EXPECT_NEAR(v[i], 3.0 * (1.0 - x) / 2.0 - (1.0 + x) / 2.0, 1e-12);
  }
  const GridPtr odd = build_grid(op.domain, 129);
  const GridFunction w = martin_apply(op, odd, BoundaryData{2.0, 5.0});
  EXPECT_NEAR(w[64], 3.5, 1e-12);
}

TEST(Martin, LinearPositiveAndZero) {
  for (auto kind : {OperatorKind::RFL, OperatorKind::SFL}) {
    const auto op = make_operator(kind, 0.75, unit_interval, 128);
    const GridPtr g = build_grid(op.domain, 128);
    EXPECT_EQ(martin_apply(op, g, BoundaryData{}).values.cwiseAbs().maxCoeff(), 0.0);
    const GridFunction a = martin_apply(op, g, BoundaryData{1.0, 0.0});
    const GridFunction b = martin_apply(op, g, BoundaryData{0.0, 1.0});
    const GridFunction ab = martin_apply(op, g, BoundaryData{2.0, -3.0});
    EXPECT_GT(a.values.minCoeff(), 0.0);
    EXPECT_GT(b.values.minCoeff(), 0.0);
    EXPECT_LT((ab.values - 2.0 * a.values + 3.0 * b.values).cwiseAbs().maxCoeff(),
              1e-12 * ab.values.cwiseAbs().maxCoeff());
    // Mirror symmetry of the interval.
    for (std::size_t i = 0; i < g->size(); ++i) EXPECT_NEAR(a[i], b[g->size() - 1 - i], 1e-10 * a[i]);
  }
}

TEST(Martin, BallRestrictions) {
  const auto rfl = make_operator(OperatorKind::RFL, 0.75, unit_ball3);
  const GridPtr g = build_grid(rfl.domain, 16);
  EXPECT_THROW(martin_apply(rfl, g, BoundaryData{1.0, 2.0}), InvalidArgument);
  const GridFunction m1 = martin_apply(rfl, g, BoundaryData::constant(1.0));
  EXPECT_GT(m1.values.minCoeff(), 0.0);
  const auto ig = build_grid(unit_interval, 16);
  EXPECT_THROW(martin_apply(rfl, ig, BoundaryData::constant(1.0)), InvalidArgument);
  EXPECT_THROW(martin_apply(make_operator(OperatorKind::RFL, 0.75, unit_interval), g, BoundaryData::constant(1.0)),
               InvalidArgument);
  const double nan = std::nan("");
  EXPECT_THROW(martin_apply(make_operator(OperatorKind::RFL, 0.75, unit_interval), ig, BoundaryData{nan, 0.0}),
               InvalidArgument);
}

TEST(NormalDerivative, TorsionOracle) {
  // D_gamma G_0(1)(z) = lim G_0(1) / delta^s = c 2^s.
  for (double s : {0.5, 0.75}) {
    const auto op = make_operator(OperatorKind::RFL, s, unit_interval);
    const GridPtr g = build_grid(op.domain, 256);
    const double exact = torsion_constant(s) * std::pow(2.0, s);
    for (double z : {-1.0, 1.0})
      EXPECT_NEAR(gamma_normal_derivative_G0(op, constant(g, 1.0), z) / exact, 1.0, 2e-3) << s;
  }
  const auto op = make_operator(OperatorKind::RFL, 0.5, unit_interval);
  EXPECT_NEAR(gamma_normal_derivative_G0(op, constant(build_grid(op.domain, 256), 1.0), 1.0), std::sqrt(2.0), 1e-6);
}

TEST(NormalDerivative, LinearAndZero) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  const GridPtr g = build_grid(op.domain, 128);
  EXPECT_EQ(gamma_normal_derivative_G0(op, constant(g, 0.0), 1.0), 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const GridFunction f = sample(g, [&](double, double) { return u(rng); });
  const GridFunction h = sample(g, [&](double, double) { return u(rng); });
  const GridFunction fh{g, 2.0 * f.values - 0.5 * h.values};
  const double lhs = gamma_normal_derivative_G0(op, fh, -1.0);
  const double rhs = 2.0 * gamma_normal_derivative_G0(op, f, -1.0) - 0.5 * gamma_normal_derivative_G0(op, h, -1.0);
  EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(lhs)));
}

TEST(NormalDerivative, DualToMartin) {
  // int f M(h) = sum_z h(z) D_gamma G_0(f)(z)
  const auto op = make_operator(OperatorKind::RFL, 0.6, unit_interval);
  const GridPtr g = build_grid(op.domain, 128);
  const GridFunction f = sample(g, [](double x, double) { return std::exp(x) * (1.0 - x * x); });
  const BoundaryData h{1.5, -0.25};
  const double lhs = inner(f, martin_apply(op, g, h));
  const double rhs = h.minus * gamma_normal_derivative_G0(op, f, -1.0) + h.plus * gamma_normal_derivative_G0(op, f, 1.0);
  EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
}

TEST(NormalDerivative, Preconditions) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  const GridPtr g = build_grid(op.domain, 64);
  EXPECT_THROW(gamma_normal_derivative_G0(op, constant(g, 1.0), 0.5), InvalidArgument);
  EXPECT_THROW(gamma_normal_derivative_G0(op, constant(g, 1e13), 1.0), InvalidArgument);
  EXPECT_NO_THROW(gamma_normal_derivative_G0(op, constant(g, 10.0), 1.0, 100.0));
  const GridFunction inf_f = sample(g, [](double, double d) { return 1.0 / d; });
  EXPECT_THROW(gamma_normal_derivative_G0(op, inf_f, 1.0, 10.0), InvalidArgument);
}

TEST(Trace, OfMartinAndGreen) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  const GridPtr g = build_grid(op.domain, 512);
  const GridFunction m1 = martin_apply(op, g, BoundaryData::constant(1.0));
  for (double z : {-1.0, 1.0}) EXPECT_NEAR(weighted_trace(op, m1, z).value, 1.0, 1e-4);
  const GridFunction v = martin_apply(op, g, BoundaryData{2.0, 5.0});
  EXPECT_NEAR(weighted_trace(op, v, -1.0).value, 2.0, 1e-3);
  EXPECT_NEAR(weighted_trace(op, v, 1.0).value, 5.0, 1e-3);

  const DiscreteKernel dk = assemble_green_matrix(op, g);
  const GridFunction f = sample(g, [](double x, double) { return 1.0 + 0.5 * std::sin(3.0 * x); });
  const GridFunction u = apply_G0(dk, f);
  for (double z : {-1.0, 1.0}) EXPECT_LT(std::abs(weighted_trace(op, u, z).value), 1e-3);
}

TEST(Trace, ExplicitModeMatchesConstant) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  const GridPtr g = build_grid(op.domain, 256);
  const GridFunction m1 = martin_apply(op, g, BoundaryData::constant(1.0));
  const double k = martin_boundary_constant(op, g, 1.0).value;
  const double e = weighted_trace(op, m1, 1.0, TraceMode::RflExplicit).value;
  EXPECT_NEAR(e / (std::pow(std::tgamma(1.75), 2) * k), 1.0, 1e-10);
  EXPECT_GT(k, 0.0);
}

TEST(Trace, ProfileBracketUnderRefinement) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  auto bracket = [&](std::size_t n) {
    const GridPtr g = build_grid(op.domain, n);
    const GridFunction m1 = martin_apply(op, g, BoundaryData::constant(1.0));
    const Eigen::ArrayXd q = m1.values.array() * delta_of(*g).array().pow(op.b);
    return std::pair{q.minCoeff(), q.maxCoeff()};
  };
  const auto [a0, b0] = bracket(256);
  const auto [a1, b1] = bracket(512);
  EXPECT_NEAR(a1 / a0, 1.0, 0.05);
  EXPECT_NEAR(b1 / b0, 1.0, 0.05);
  EXPECT_GT(a0, 0.0);
}

TEST(Trace, Preconditions) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  const GridPtr g = build_grid(op.domain, 64);
  const GridFunction one = constant(g, 1.0);
  EXPECT_THROW(weighted_trace(op, one, 0.3), InvalidArgument);
  const auto sfl = make_operator(OperatorKind::SFL, 0.75, unit_interval, 64);
  EXPECT_THROW(weighted_trace(sfl, one, 1.0, TraceMode::RflExplicit), InvalidArgument);
}

TEST(Trace, SflMartinTrace) {
  const auto op = make_operator(OperatorKind::SFL, 0.75, unit_interval, 256);
  const GridPtr g = build_grid(op.domain, 256);
  const GridFunction m1 = martin_apply(op, g, BoundaryData::constant(1.0));
  EXPECT_GT(m1.values.minCoeff(), 0.0);
  EXPECT_NEAR(weighted_trace(op, m1, 1.0).value, 1.0, 1e-8);
}
