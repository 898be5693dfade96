#include <gtest/gtest.h>

#include <cmath>

#include "nonlocal/limits.hpp"

using namespace nonlocal;

namespace {

const std::vector<double> ladder{0.7, 0.8, 0.9, 0.95, 0.99};

OperatorFamily family(OperatorKind kind) {
  OperatorFamily f;
  f.kind = kind;
  f.domain = make_domain(DomainKind::Interval, 1, 1.0);
  f.N = 256;
  return f;
}

}  // namespace

TEST(SpectralLimit, SflEigenpairsConverge) {
  const SLimitReport r = spectral_convergence_s(family(OperatorKind::SFL), ladder);
  ASSERT_EQ(r.rows.size(), ladder.size());
  EXPECT_NEAR(r.limit_lambda_1, pi * pi / 4.0, 1e-4);
  EXPECT_TRUE(r.monotone);
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    EXPECT_LT(r.rows[k].omega, r.rows[k - 1].omega);
    EXPECT_LT(r.rows[k].lambda_1_gap, r.rows[k - 1].lambda_1_gap);
    EXPECT_GE(r.rows[k].alignment, r.rows[k - 1].alignment - 1e-12);
  }
  EXPECT_GE(r.rows.back().alignment, 0.999);
  EXPECT_LT(r.rows.back().lambda_1_gap / r.limit_lambda_1, 0.02);
}

TEST(SpectralLimit, RflEigenvalueApproachesClassical) {
  const SLimitReport r = spectral_convergence_s(family(OperatorKind::RFL), {0.9, 0.99});
  EXPECT_LT(r.rows[1].lambda_1_gap, r.rows[0].lambda_1_gap);
  EXPECT_GE(r.rows[1].alignment, 0.999);
}

TEST(ResolventLimit, Converges) {
  const auto fam = family(OperatorKind::SFL);
  const DataFn f = [](double x, double) { return std::cos(pi * x / 2.0); };
  const SLimitReport r = resolvent_convergence_s(fam, {0.9, 0.99}, 0.5, f);
  EXPECT_LT(r.rows[1].resolvent_dist, r.rows[0].resolvent_dist);

  // f = phi_1(1) is a single SFL mode: G f = f / (lambda_1(s) - lambda).
  const SLimitReport one = resolvent_convergence_s(fam, {0.95}, 0.5, f);
  const double l1s = one.rows[0].lambda_1, l11 = one.limit_lambda_1;
  const double fnorm = 1.0;  // ||cos(pi x / 2)||_L2(-1,1)
  EXPECT_NEAR(one.rows[0].resolvent_dist, fnorm * std::abs(1.0 / (l1s - 0.5) - 1.0 / (l11 - 0.5)), 1e-4);

  // Between lambda_1 and lambda_2 of the limit problem.
  const SLimitReport mid = resolvent_convergence_s(fam, {0.95, 0.99}, 5.0, [](double x, double) { return 1.0 + x; });
  EXPECT_LT(mid.rows[1].resolvent_dist, mid.rows[0].resolvent_dist);
}

TEST(LargeSolutionLimit, BlowUpFades) {
  const auto fam = family(OperatorKind::RFL);
  const DataFn g = [](double, double) { return 1.0; };
  const SLimitReport r = large_solution_limit_s(fam, ladder, 0.5, g, BoundaryData::constant(1.0));
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    EXPECT_DOUBLE_EQ(r.rows[k].b, 1.0 - ladder[k]);
    if (k) {
      EXPECT_LT(r.rows[k].sol_dist, r.rows[k - 1].sol_dist);
      EXPECT_LT(r.rows[k].kernel_dist, r.rows[k - 1].kernel_dist);
      EXPECT_GT(r.rows[k].boundary_fit, r.rows[k - 1].boundary_fit);
    }
    EXPECT_LT(r.rows[k].boundary_fit, 0.0);
  }
  EXPECT_LT(std::abs(r.rows.back().boundary_fit), 0.02);
  EXPECT_TRUE(r.monotone);
}

TEST(Ladder, Preconditions) {
  const auto fam = family(OperatorKind::SFL);
  EXPECT_THROW(spectral_convergence_s(fam, {}), InvalidArgument);
  EXPECT_THROW(spectral_convergence_s(fam, {0.9, 1.0}), InvalidArgument);
  EXPECT_THROW(resolvent_convergence_s(fam, {0.0}, 0.0, [](double, double) { return 1.0; }), InvalidArgument);
  EXPECT_THROW(large_solution_limit_s(family(OperatorKind::RFL), {1.2}, 0.0, [](double, double) { return 1.0; },
                                      BoundaryData{}),
               InvalidArgument);
}
