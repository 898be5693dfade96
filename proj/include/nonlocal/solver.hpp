#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include "nonlocal/boundary.hpp"
#include "nonlocal/model.hpp"

namespace nonlocal {

inline constexpr double default_K_fraction = 0.25;

/// Node indices of the compact set K = { delta >= frac * r }.
inline std::vector<std::size_t> compact_set(const QuadGrid& g, double frac = default_K_fraction) {
  if (!(frac > 0.0 && frac < 1.0)) throw InvalidArgument("compact_set: fraction must be in (0, 1)");
  std::vector<std::size_t> k;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.delta[i] >= frac * g.domain.radius) k.push_back(i);
  if (k.empty()) throw InvalidArgument("compact_set: no grid node in K");
  return k;
}

/// v = v_h + explicit + u_perp, where
///   explicit = sum_{j<=I} <g + lambda v_h, phi_j> phi_j / (lambda_j - lambda)
///   u_perp   = G_lambda restricted to E-perp applied to (g + lambda v_h)^perp.
struct SolveReport {
  LambdaContext ctx;
  GridFunction g;
  BoundaryData h;
  GridFunction v_h;
  GridFunction explicit_part;
  GridFunction u_perp;
  GridFunction v;
  double v_L1_dgamma = 0.0;
  double uperp_L1_dgamma = 0.0;
  double sup_K = 0.0;
  double inf_v = 0.0;
  double green_residual = 0.0;
  double orth_residual = 0.0;
  double uniform_constant = 0.0;  // ||u_perp d^g||_L1 / (||g d^g||_L1 + ||h||_inf)
};

inline SolveReport solve_large(const DiscreteModel& m, const LambdaContext& ctx, const GridFunction& g,
                               const BoundaryData& h, double k_frac = default_K_fraction) {
  if (ctx.singular) throw SingularLambda(ctx.lambda, ctx.nearest, m.spectrum.lambda(ctx.nearest));
  require_same_grid(g, m.grid, "solve_large");
  if (!g.values.allFinite()) throw InvalidArgument("solve_large: datum has non-finite values");
  const SpectralData& sd = m.spectrum;
  const double gamma = m.op.gamma;

  SolveReport rep;
  rep.ctx = ctx;
  rep.g = g;
  rep.h = h;
  rep.v_h = martin_apply(m.op, m.grid, h);
  const GridFunction rhs{m.grid, g.values + ctx.lambda * rep.v_h.values};
  const Eigen::VectorXd c = coefficients(sd, rhs);
  rep.explicit_part = detail::spectral_sum(sd, c, ctx.lambda, 0, ctx.I);
  rep.u_perp = detail::spectral_sum(sd, c, ctx.lambda, ctx.I, sd.size());
  rep.v = GridFunction{m.grid, rep.v_h.values + rep.explicit_part.values + rep.u_perp.values};

  const Eigen::VectorXd cp = coefficients(sd, rep.u_perp);
  rep.orth_residual = ctx.I ? cp.head(static_cast<Eigen::Index>(ctx.I)).cwiseAbs().maxCoeff() : 0.0;

  const GridFunction w{m.grid, rep.v.values - rep.v_h.values};
  const GridFunction res{m.grid, w.values - ctx.lambda * apply_G0(m.kernel, w).values -
                                     apply_G0(m.kernel, rhs).values};
  rep.green_residual = weighted_norm(res, NormSpec::l2());

  rep.v_L1_dgamma = weighted_norm(rep.v, NormSpec::l1_delta(gamma), gamma);
  rep.uperp_L1_dgamma = weighted_norm(rep.u_perp, NormSpec::l1_delta(gamma), gamma);
  for (std::size_t i : compact_set(*m.grid, k_frac)) rep.sup_K = std::max(rep.sup_K, std::abs(rep.v[i]));
  rep.inf_v = rep.v.values.minCoeff();
  const double data = weighted_norm(g, NormSpec::l1_delta(gamma), gamma) + h.sup();
  rep.uniform_constant = data > 0.0 ? rep.uperp_L1_dgamma / data : 0.0;
  return rep;
}

/// Homogeneous boundary data: v = G_lambda f.
inline SolveReport solve_dirichlet(const DiscreteModel& m, const LambdaContext& ctx, const GridFunction& f,
                                   double k_frac = default_K_fraction) {
  return solve_large(m, ctx, f, BoundaryData{}, k_frac);
}

// ---------------------------------------------------------------------------
// Fredholm alternative
// ---------------------------------------------------------------------------

struct FredholmReport {
  std::size_t index = 1;  // 1-based eigen index i
  double eigenvalue = 0.0;
  GridFunction projection;  // P_{E_i}(g + lambda_i v_h)
  double projection_L2 = 0.0;
  double projection_sup = 0.0;
  double epsilon = 0.0;
  std::vector<std::size_t> a_plus;
  std::vector<std::size_t> a_minus;
  bool converges = false;  // case (a): the projection vanishes
  // Limit of v on A+ as lambda -> lambda_i from below / above.
  int sign_from_below = 0;
  int sign_from_above = 0;
};

/// Default threshold: 1e-3 ||P||_inf.
inline FredholmReport fredholm_diagnose(const DiscreteModel& m, const GridFunction& g, const BoundaryData& h,
                                        std::size_t i, std::optional<double> eps = std::nullopt) {
  const SpectralData& sd = m.spectrum;
  if (i < 1 || i > sd.size()) throw InvalidArgument("fredholm_diagnose: eigen index out of range");
  FredholmReport rep;
  rep.index = i;
  rep.eigenvalue = sd.lambda(i);
  const GridFunction v_h = martin_apply(m.op, m.grid, h);
  const GridFunction rhs{m.grid, g.values + rep.eigenvalue * v_h.values};
  rep.projection = project_group(sd, i, rhs);
  rep.projection_L2 = weighted_norm(rep.projection, NormSpec::l2());
  rep.projection_sup = rep.projection.values.cwiseAbs().maxCoeff();
  const double rhs_l2 = weighted_norm(rhs, NormSpec::l2());
  rep.converges = rep.projection_L2 <= 1e-10 * std::max(rhs_l2, std::numeric_limits<double>::min());
  rep.epsilon = eps.value_or(1e-3 * rep.projection_sup);
  if (!rep.converges) {
    for (std::size_t k = 0; k < m.grid->size(); ++k) {
      if (rep.projection[k] > rep.epsilon) rep.a_plus.push_back(k);
      if (rep.projection[k] < -rep.epsilon) rep.a_minus.push_back(k);
    }
  }
  // v ~ P/(lambda_i - lambda): positive on A+ from below, negative from above.
  rep.sign_from_below = rep.a_plus.empty() ? 0 : 1;
  rep.sign_from_above = rep.a_plus.empty() ? 0 : -1;
  return rep;
}

struct SweepRow {
  double lambda = 0.0;
  double sup_K_Aplus = 0.0;
  double sup_K = 0.0;
  double inf_v = 0.0;
  double uperp_L1_dgamma = 0.0;
  double proj_i = 0.0;
};

struct SweepReport {
  std::size_t index = 1;
  double eigenvalue = 0.0;
  std::vector<SweepRow> rows;
  double fitted_constant = 0.0;  // mean of sup_{K cap A+}|v| |lambda_i - lambda|
  double spread = 0.0;           // (max - min) / mean of that product
  double uperp_band = 0.0;       // max / min of ||u_perp d^g||_L1 over the sweep
};

inline SweepReport sweep_lambda(const DiscreteModel& m, const GridFunction& g, const BoundaryData& h,
                                std::size_t i, const std::vector<double>& lambdas,
                                double k_frac = default_K_fraction) {
  if (lambdas.empty()) throw InvalidArgument("sweep_lambda: empty lambda list");
  const SpectralData& sd = m.spectrum;
  const double li = sd.lambda(i);
  const bool below = lambdas.front() < li;
  for (double l : lambdas)
    if ((l < li) != below || l == li)
      throw InvalidArgument("sweep_lambda: lambda list must lie strictly on one side of lambda_i");

  const FredholmReport fr = fredholm_diagnose(m, g, h, i);
  const auto kset = compact_set(*m.grid, k_frac);
  std::vector<std::size_t> ka;
  std::set_intersection(kset.begin(), kset.end(), fr.a_plus.begin(), fr.a_plus.end(), std::back_inserter(ka));
  if (ka.empty()) ka = kset;

  SweepReport rep;
  rep.index = i;
  rep.eigenvalue = li;
  std::vector<double> prod;
  const GridFunction phi_i = sd.phi(i);
  for (double l : lambdas) {
    const LambdaContext ctx = lambda_context(sd, l);
    const SolveReport s = solve_large(m, ctx, g, h, k_frac);
    SweepRow row;
    row.lambda = l;
    for (std::size_t k : ka) row.sup_K_Aplus = std::max(row.sup_K_Aplus, std::abs(s.v[k]));
    row.sup_K = s.sup_K;
    row.inf_v = s.inf_v;
    row.uperp_L1_dgamma = s.uperp_L1_dgamma;
    row.proj_i = inner(s.v, phi_i);
    rep.rows.push_back(row);
    prod.push_back(row.sup_K_Aplus * std::abs(li - l));
  }
  const auto [pmin, pmax] = std::minmax_element(prod.begin(), prod.end());
  rep.fitted_constant = std::accumulate(prod.begin(), prod.end(), 0.0) / static_cast<double>(prod.size());
  rep.spread = rep.fitted_constant > 0.0 ? (*pmax - *pmin) / rep.fitted_constant : 0.0;
  double umin = std::numeric_limits<double>::infinity(), umax = 0.0;
  for (const auto& r : rep.rows) {
    umin = std::min(umin, r.uperp_L1_dgamma);
    umax = std::max(umax, r.uperp_L1_dgamma);
  }
  rep.uperp_band = umin > 0.0 ? umax / umin : std::numeric_limits<double>::infinity();
  return rep;
}

// ---------------------------------------------------------------------------
// Verifiers
// ---------------------------------------------------------------------------

/// Random nonnegative data: uniform samples, powers delta^a (a > -1 - gamma)
/// and smooth bumps, cycled.
inline GridFunction random_nonnegative(const GridPtr& grid, double gamma, std::mt19937_64& rng, int kind) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = grid->domain.radius;
  switch (kind % 3) {
    case 0: return sample(grid, [&](double, double) { return u(rng); });
    case 1: {
      const double a = -(1.0 + gamma) + 0.2 + u(rng) * (1.0 + gamma);
      const double amp = 0.1 + u(rng);
      return sample(grid, [&](double, double d) { return amp * std::pow(d, a); });
    }
    default: {
      const double c = (grid->domain.kind == DomainKind::Ball ? u(rng) : 2.0 * u(rng) - 1.0) * r;
      const double w = (0.05 + 0.3 * u(rng)) * r;
      return sample(grid, [&](double x, double) { return std::exp(-(x - c) * (x - c) / (w * w)); });
    }
  }
}

struct MaxPrincipleReport {
  double lambda = 0.0;
  int trials = 0;
  int failures = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();  // min_i u_i / max_i u_i
  std::vector<GridFunction> offending;
};

inline MaxPrincipleReport check_max_principle(const DiscreteModel& m, const LambdaContext& ctx, int trials,
                                              std::uint64_t seed = 1) {
  if (!(ctx.lambda < ctx.lambda_1))
    throw InvalidArgument("check_max_principle: needs lambda < lambda_1");
  std::mt19937_64 rng(seed);
  MaxPrincipleReport rep;
  rep.lambda = ctx.lambda;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    const GridFunction f = random_nonnegative(m.grid, m.op.gamma, rng, t);
    const GridFunction u = apply_Glambda(m.spectrum, ctx, f);
    const double mx = u.values.maxCoeff(), mn = u.values.minCoeff();
    const double ratio = mn / mx;
    rep.worst_ratio = std::min(rep.worst_ratio, ratio);
    if (!(mn >= -1e-8 * mx)) {
      ++rep.failures;
      rep.offending.push_back(f);
    }
  }
  return rep;
}

struct PoincareReport {
  int trials = 0;
  int failures = 0;
  double max_ratio = 0.0;       // lambda_1 <phi, G_0 phi> / <phi, phi>
  double extremal_defect = 0.0; // |ratio(phi_1) - 1|
};

inline PoincareReport check_poincare(const DiscreteModel& m, int trials, std::uint64_t seed = 2) {
  const double l1 = m.spectrum.lambda(1);
  auto ratio = [&](const GridFunction& p) { return l1 * inner(p, apply_G0(m.kernel, p)) / inner(p, p); };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  PoincareReport rep;
  rep.trials = trials;
  for (int t = 0; t < trials; ++t) {
    GridFunction p = sample(m.grid, [&](double, double) { return nd(rng); });
    if (t % 2 == 1) p.values += 3.0 * nd(rng) * m.spectrum.phi(1).values;  // near-extremal cases
    const double q = ratio(p);
    rep.max_ratio = std::max(rep.max_ratio, q);
    if (q > 1.0 + 1e-8) ++rep.failures;
  }
  rep.extremal_defect = std::abs(ratio(m.spectrum.phi(1)) - 1.0);
  return rep;
}

/// r1 = ||u - G_lambda f||, r5 = ||u - lambda G_0 u - G_0 f||,
/// r6 = max_j |(lambda_j - lambda) <u, phi_j> - <f, phi_j>|.
struct NotionResiduals {
  double r1 = 0.0;
  double r5 = 0.0;
  double r6 = 0.0;
  double max() const { return std::max({r1, r5, r6}); }
};

inline NotionResiduals notion_residuals(const DiscreteModel& m, const LambdaContext& ctx, const GridFunction& u,
                                        const GridFunction& f) {
  NotionResiduals r;
  const GridFunction ref = apply_Glambda(m.spectrum, ctx, f);
  r.r1 = weighted_norm(GridFunction{m.grid, u.values - ref.values}, NormSpec::l2());
  r.r5 = weighted_norm(GridFunction{m.grid, u.values - ctx.lambda * apply_G0(m.kernel, u).values -
                                                apply_G0(m.kernel, f).values},
                       NormSpec::l2());
  const Eigen::VectorXd cu = coefficients(m.spectrum, u), cf = coefficients(m.spectrum, f);
  r.r6 = ((m.spectrum.eigenvalues.array() - ctx.lambda) * cu.array() - cf.array()).abs().maxCoeff();
  return r;
}

struct NotionReport {
  NotionResiduals spectral;
  std::optional<NotionResiduals> neumann;
};

/// Residuals of each available route (spectral always; Neumann when |lambda| < lambda_1).
inline NotionReport check_notions(const DiscreteModel& m, const LambdaContext& ctx, const GridFunction& f) {
  NotionReport rep;
  rep.spectral = notion_residuals(m, ctx, apply_Glambda(m.spectrum, ctx, f), f);
  if (std::abs(ctx.lambda) < ctx.lambda_1)
    rep.neumann = notion_residuals(m, ctx, apply_Glambda_neumann(m.kernel, ctx, f), f);
  return rep;
}

}  // namespace nonlocal
