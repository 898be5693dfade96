#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nonlocal/solver.hpp"

using namespace nonlocal;

namespace {

const DomainSpec unit_interval = make_domain(DomainKind::Interval, 1, 1.0);

const DiscreteModel& model(double s) {
  static const DiscreteModel a = build_model(make_operator(OperatorKind::RFL, 0.75, unit_interval), 256);
  static const DiscreteModel b = build_model(make_operator(OperatorKind::RFL, 0.6, unit_interval), 256);
  return s == 0.6 ? b : a;
}

double l2(const GridPtr& g, const Eigen::VectorXd& v) { return weighted_norm(GridFunction{g, v}, NormSpec::l2()); }

GridFunction unit_random(const GridPtr& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  GridFunction f = sample(g, [&](double, double) { return nd(rng); });
  f.values /= weighted_norm(f, NormSpec::l2());
  return f;
}

GridFunction minus_group(const SpectralData& sd, std::size_t i, const GridFunction& f) {
  return GridFunction{f.grid, f.values - project_group(sd, i, f).values};
}

}  // namespace

TEST(Dirichlet, EigenfunctionData) {
  const DiscreteModel& m = model(0.75);
  const double l1 = m.spectrum.lambda(1);
  const SolveReport r = solve_dirichlet(m, lambda_context(m.spectrum, 0.5 * l1), m.spectrum.phi(1));
  EXPECT_LT(l2(m.grid, r.v.values - 2.0 / l1 * m.spectrum.phi(1).values), 1e-12);
  EXPECT_EQ(r.v_h.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dirichlet, SingularWeightedData) {
  const DiscreteModel& m = model(0.75);
  const GridFunction f = sample(m.grid, [](double, double d) { return std::pow(d, -0.5); });
  const SolveReport r = solve_dirichlet(m, lambda_context(m.spectrum, -2.0), f);
  EXPECT_TRUE(r.v.values.allFinite());
  EXPECT_GT(r.inf_v, 0.0);
  EXPECT_LT(r.green_residual, 1e-6 * weighted_norm(f, NormSpec::l2()));
}

TEST(Large, TrivialAndPureMartin) {
  const DiscreteModel& m = model(0.75);
  const GridFunction zero = constant(m.grid, 0.0);
  const SolveReport r0 = solve_large(m, lambda_context(m.spectrum, 0.3), zero, BoundaryData{});
  EXPECT_EQ(r0.v.values.cwiseAbs().maxCoeff(), 0.0);
  const SolveReport r1 = solve_large(m, lambda_context(m.spectrum, 0.0), zero, BoundaryData::constant(1.0));
  const GridFunction m1 = martin_apply(m.op, m.grid, BoundaryData::constant(1.0));
  EXPECT_LT((r1.v.values - m1.values).cwiseAbs().maxCoeff(), 1e-10 * m1.values.maxCoeff());
}

TEST(Large, DecompositionAndResiduals) {
  const DiscreteModel& m = model(0.75);
  const SpectralData& sd = m.spectrum;
  const GridFunction g = sample(m.grid, [](double x, double) { return 1.0 + x; });
  for (double lam : {0.5 * sd.lambda(1), 0.5 * (sd.lambda(1) + sd.lambda(2)), 0.5 * (sd.lambda(3) + sd.lambda(4))}) {
    const SolveReport r = solve_large(m, lambda_context(sd, lam), g, BoundaryData{2.0, 5.0});
    EXPECT_LT(l2(m.grid, r.v.values - r.v_h.values - r.explicit_part.values - r.u_perp.values), 1e-12 * l2(m.grid, r.v.values));
    EXPECT_LT(r.orth_residual, 1e-8);
    EXPECT_LT(r.green_residual, 1e-6);
    EXPECT_GT(r.sup_K, 0.0);
  }
}

TEST(Large, BoundaryTraceOfCorrectionVanishes) {
  const auto op = make_operator(OperatorKind::RFL, 0.75, unit_interval);
  const DiscreteModel m = build_model(op, 512);
  const SolveReport r = solve_large(m, lambda_context(m.spectrum, 0.5 * m.spectrum.lambda(1)), constant(m.grid, 1.0),
                                    BoundaryData{2.0, 5.0});
  const GridFunction w{m.grid, r.v.values - r.v_h.values};
  for (double z : {-1.0, 1.0}) EXPECT_LT(std::abs(weighted_trace(op, w, z).value), 1e-3);
  EXPECT_NEAR(weighted_trace(op, r.v, -1.0).value, 2.0, 1e-3);
  EXPECT_NEAR(weighted_trace(op, r.v, 1.0).value, 5.0, 1e-3);
}

TEST(Large, RejectsSingularAndBadData) {
  const DiscreteModel& m = model(0.75);
  const LambdaContext at = lambda_context(m.spectrum, m.spectrum.lambda(1), true);
  EXPECT_THROW(solve_large(m, at, constant(m.grid, 1.0), BoundaryData{}), SingularLambda);
  GridFunction bad = constant(m.grid, 1.0);
  bad.values[3] = std::nan("");
  EXPECT_THROW(solve_dirichlet(m, lambda_context(m.spectrum, 0.0), bad), InvalidArgument);
  const GridFunction other = constant(build_grid(unit_interval, 64), 1.0);
  EXPECT_THROW(solve_dirichlet(m, lambda_context(m.spectrum, 0.0), other), InvalidArgument);
}

TEST(Fredholm, Cases) {
  const DiscreteModel& m = model(0.75);
  const SpectralData& sd = m.spectrum;
  const GridFunction one = constant(m.grid, 1.0);
  const FredholmReport b = fredholm_diagnose(m, constant(m.grid, 0.0), BoundaryData::constant(1.0), 1);
  EXPECT_FALSE(b.converges);
  EXPECT_FALSE(b.a_plus.empty());
  EXPECT_TRUE(b.a_minus.empty());
  EXPECT_EQ(b.sign_from_below, 1);
  EXPECT_EQ(b.sign_from_above, -1);
  EXPECT_NEAR(b.projection_L2, std::abs(sd.lambda(1) * inner(martin_apply(m.op, m.grid, BoundaryData::constant(1.0)), sd.phi(1))), 1e-10);

  const FredholmReport a = fredholm_diagnose(m, minus_group(sd, 1, one), BoundaryData{}, 1);
  EXPECT_TRUE(a.converges);
  EXPECT_TRUE(a.a_plus.empty());
  EXPECT_EQ(a.sign_from_below, 0);

  const FredholmReport big = fredholm_diagnose(m, one, BoundaryData{}, 1, 1e6);
  EXPECT_FALSE(big.converges);
  EXPECT_TRUE(big.a_plus.empty());

  // phi_2 changes sign: both sets are populated.
  const FredholmReport two = fredholm_diagnose(m, sd.phi(2), BoundaryData{}, 2);
  EXPECT_FALSE(two.a_plus.empty());
  EXPECT_FALSE(two.a_minus.empty());
  EXPECT_THROW(fredholm_diagnose(m, one, BoundaryData{}, 0), InvalidArgument);
}

TEST(Sweep, BlowUpRateIsStable) {
  const DiscreteModel& m = model(0.75);
  const double l1 = m.spectrum.lambda(1);
  const SweepReport sw = sweep_lambda(m, constant(m.grid, 0.0), BoundaryData::constant(1.0), 1,
                                      {0.9 * l1, 0.95 * l1, 0.975 * l1, 0.9875 * l1});
  EXPECT_LT(sw.spread, 0.05);
  EXPECT_GT(sw.fitted_constant, 0.0);
  for (std::size_t k = 1; k < sw.rows.size(); ++k) EXPECT_GT(sw.rows[k].sup_K_Aplus, sw.rows[k - 1].sup_K_Aplus);
  EXPECT_LT(sw.uperp_band, 1.5);  // bounded while sup grows eightfold

  const SweepReport above = sweep_lambda(m, constant(m.grid, 0.0), BoundaryData::constant(1.0), 1,
                                         {1.0125 * l1, 1.025 * l1});
  EXPECT_LT(above.rows.front().proj_i, 0.0);
  EXPECT_GT(sw.rows.front().proj_i, 0.0);
}

TEST(Sweep, ConvergentCaseApproachesLimit) {
  const DiscreteModel& m = model(0.75);
  const SpectralData& sd = m.spectrum;
  const double l1 = sd.lambda(1);
  const GridFunction gp = minus_group(sd, 1, constant(m.grid, 1.0));
  const GridFunction limit = detail::spectral_sum(sd, coefficients(sd, gp), l1, sd.group_of(1).second, sd.size());
  double prev = 1e300;
  for (int k = 1; k <= 5; ++k) {
    const SolveReport r = solve_dirichlet(m, lambda_context(sd, l1 * (1.0 - std::pow(10.0, -k))), gp);
    const double d = weighted_norm(GridFunction{m.grid, r.v.values - limit.values}, NormSpec::l1_delta(0.75), 0.75);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Sweep, InteriorBlowUpAtLowerS) {
  const DiscreteModel& m = model(0.6);
  const double l1 = m.spectrum.lambda(1);
  std::vector<double> lams;
  for (int k = 1; k <= 4; ++k) lams.push_back(l1 * (1.0 - std::pow(10.0, -k)));
  const SweepReport sw = sweep_lambda(m, constant(m.grid, 1.0), BoundaryData{}, 1, lams);
  for (std::size_t k = 1; k < sw.rows.size(); ++k) {
    EXPECT_GT(sw.rows[k].inf_v, sw.rows[k - 1].inf_v);
    EXPECT_GT(sw.rows[k].sup_K, 9.0 * sw.rows[k - 1].sup_K);
  }
  EXPECT_GT(sw.rows.front().inf_v, 0.0);
}

TEST(Sweep, Preconditions) {
  const DiscreteModel& m = model(0.75);
  const double l1 = m.spectrum.lambda(1);
  const GridFunction one = constant(m.grid, 1.0);
  EXPECT_THROW(sweep_lambda(m, one, BoundaryData{}, 1, {}), InvalidArgument);
  EXPECT_THROW(sweep_lambda(m, one, BoundaryData{}, 1, {0.9 * l1, 1.1 * l1}), InvalidArgument);
  EXPECT_THROW(sweep_lambda(m, one, BoundaryData{}, 1, {l1}), InvalidArgument);
}

TEST(MaxPrinciple, HoldsBelowFirstEigenvalue) {
  const DiscreteModel& m = model(0.75);
  const double l1 = m.spectrum.lambda(1);
  for (double lam : {-5.0, 0.0, 0.9 * l1, 0.99 * l1}) {
    const MaxPrincipleReport r = check_max_principle(m, lambda_context(m.spectrum, lam), 30);
    EXPECT_EQ(r.failures, 0) << lam;
    EXPECT_GE(r.worst_ratio, 0.0);
  }
  const LambdaContext mid = lambda_context(m.spectrum, 0.5 * (l1 + m.spectrum.lambda(2)));
  EXPECT_THROW(check_max_principle(m, mid, 5), InvalidArgument);
  // Above lambda_1 the resolvent of phi_1 is negative.
  EXPECT_LT(apply_Glambda(m.spectrum, mid, m.spectrum.phi(1)).values.maxCoeff(), 0.0);
}

TEST(Poincare, InequalityAndQuotient) {
  const DiscreteModel& m = model(0.75);
  const PoincareReport r = check_poincare(m, 40);
  EXPECT_EQ(r.failures, 0);
  EXPECT_LE(r.max_ratio, 1.0 + 1e-8);
  EXPECT_LT(r.extremal_defect, 1e-10);
  const GridFunction p2 = m.spectrum.phi(2);
  const double q = m.spectrum.lambda(1) * inner(p2, apply_G0(m.kernel, p2)) / inner(p2, p2);
  EXPECT_NEAR(q, m.spectrum.lambda(1) / m.spectrum.lambda(2), 1e-10);
}

TEST(Notions, ResidualsAgree) {
  const DiscreteModel& m = model(0.75);
  const SpectralData& sd = m.spectrum;
  const LambdaContext half = lambda_context(sd, 0.5 * sd.lambda(1));
  const NotionReport e = check_notions(m, half, sd.phi(3));
  ASSERT_TRUE(e.neumann.has_value());
  for (const NotionResiduals& r : {e.spectral, *e.neumann}) {
    EXPECT_LT(r.r1, 1e-10);
    EXPECT_LT(r.r5, 1e-10);
    // Coefficient rounding is amplified by lambda_max / lambda_1 ~ 5e8 here.
    EXPECT_LT(r.r6, 1e-8);
  }

  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const NotionReport r = check_notions(m, half, unit_random(m.grid, rng));
    EXPECT_LT(r.spectral.max(), 1e-8);
    EXPECT_LT(r.neumann->max(), 1e-8);
  }
  const LambdaContext mid = lambda_context(sd, 0.5 * (sd.lambda(1) + sd.lambda(2)));
  EXPECT_FALSE(check_notions(m, mid, sd.phi(1)).neumann.has_value());

  const GridFunction f = unit_random(m.grid, rng);
  GridFunction u = apply_Glambda(sd, half, f);
  u.values += 0.01 * sd.phi(4).values;
  const NotionResiduals bad = notion_residuals(m, half, u, f);
  EXPECT_GT(bad.r1, 1e-3);
  EXPECT_GT(bad.r5, 1e-3);
  EXPECT_GT(bad.r6, 1e-3);
}

TEST(Notions, SignStructureNearEigenvalue) {
  const DiscreteModel& m = model(0.75);
  const SpectralData& sd = m.spectrum;
  const double l1 = sd.lambda(1);
  const GridFunction zero = constant(m.grid, 0.0);
  const SolveReport below = solve_large(m, lambda_context(sd, l1 * (1.0 - 1e-3)), zero, BoundaryData::constant(1.0));
  const SolveReport above = solve_large(m, lambda_context(sd, l1 * (1.0 + 1e-3)), zero, BoundaryData::constant(1.0));
  for (std::size_t i : compact_set(*m.grid)) {
    EXPECT_GT(below.v[i], 0.0);
    EXPECT_LT(above.v[i], 0.0);
  }
  // Rate: <v, phi_1> (lambda_1 - lambda) -> lambda_1 <M(1), phi_1>.
  const double target = l1 * inner(martin_apply(m.op, m.grid, BoundaryData::constant(1.0)), sd.phi(1));
  EXPECT_NEAR(inner(below.v, sd.phi(1)) * l1 * 1e-3 / target, 1.0, 1e-10);
}
