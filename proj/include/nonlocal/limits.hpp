#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "nonlocal/solver.hpp"

namespace nonlocal {

/// A family of operators in s on a fixed domain and grid; s = 1 is served
/// by the classical Laplacian with exact kernels.
struct OperatorFamily {
  OperatorKind kind = OperatorKind::RFL;
  DomainSpec domain;
  std::size_t N = 256;
  double grading = 2.0;
  int sfl_terms = 0;  // 0: use N

  OperatorSpec at(double s) const {
    if (s == 1.0) return make_operator(OperatorKind::Classical, 1.0, domain);
    return make_operator(kind, s, domain, sfl_terms > 0 ? sfl_terms : static_cast<int>(N));
  }
  DiscreteModel model(double s) const { return build_model(at(s), N, grading); }
};

using DataFn = std::function<double(double, double)>;  // (x, delta) -> value

struct SLimitRow {
  double s = 0.0;
  double b = 0.0;
  double lambda_1 = 0.0;
  double lambda_1_gap = 0.0;   // |lambda_1(s) - lambda_1(1)|, discrete limit
  double omega = 0.0;          // sup_{j <= j_max} |mu_j(s) - mu_j(1)|
  double alignment = 0.0;      // |<phi_1(s), phi_1(1)>|
  double resolvent_dist = 0.0; // ||G_{s,lambda} f - G_{1,lambda} f||_L2
  double kernel_dist = 0.0;    // sup over K of |D_s - D_1| / D_1 at z = +r
  double sol_dist = 0.0;       // ||v(s) - v(1)||_{L1(K)}
  double sup_K = 0.0;          // ||v(s)||_{L^inf(K)}
  double boundary_fit = 0.0;   // slope of log|v| vs log delta, 5 nodes nearest +r
  double boundary_amp = 0.0;   // v(x_near) delta^{b(s)} at the nearest node
};

struct SLimitReport {
  std::vector<SLimitRow> rows;
  double limit_lambda_1 = 0.0;
  bool monotone = true;  // the tracked distance is nonincreasing (10% slack)
};

namespace detail {

inline void require_ladder(const std::vector<double>& s_list) {
  if (s_list.empty()) throw InvalidArgument("s-ladder is empty");
  for (double s : s_list)
    if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("s-ladder values must lie in (0, 1)");
}

inline bool nonincreasing(const std::vector<double>& v, double slack = 0.1) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > (1.0 + slack) * v[k - 1]) return false;
  return true;
}

inline double l1_on(const GridFunction& f, const std::vector<std::size_t>& k) {
  double acc = 0.0;
  for (std::size_t i : k) acc += f.grid->weights[i] * std::abs(f[i]);
  return acc;
}

}  // namespace detail

/// Eigenvalue and eigenfunction convergence as s -> 1. Tracks omega(1-s).
inline SLimitReport spectral_convergence_s(const OperatorFamily& fam, const std::vector<double>& s_list,
                                           std::size_t j_max = 5) {
  detail::require_ladder(s_list);
  const DiscreteModel lim = fam.model(1.0);
  SLimitReport rep;
  rep.limit_lambda_1 = lim.spectrum.lambda(1);
  std::vector<double> track;
  for (double s : s_list) {
    const DiscreteModel m = fam.model(s);
    SLimitRow row;
    row.s = s;
    row.b = m.op.b;
    row.lambda_1 = m.spectrum.lambda(1);
    row.lambda_1_gap = std::abs(row.lambda_1 - rep.limit_lambda_1);
    const std::size_t jm = std::min({j_max, m.spectrum.size(), lim.spectrum.size()});
    for (std::size_t j = 1; j <= jm; ++j)
      row.omega = std::max(row.omega, std::abs(1.0 / m.spectrum.lambda(j) - 1.0 / lim.spectrum.lambda(j)));
    // Same N and grading, so the nodes coincide; rebind to one grid.
    row.alignment = std::abs(inner(GridFunction{lim.grid, m.spectrum.phi(1).values}, lim.spectrum.phi(1)));
    track.push_back(row.omega);
    rep.rows.push_back(row);
  }
  rep.monotone = detail::nonincreasing(track);
  return rep;
}

/// ||G_{L_s - lambda} f - G_{L_1 - lambda} f||_{L2} along the ladder.
inline SLimitReport resolvent_convergence_s(const OperatorFamily& fam, const std::vector<double>& s_list,
                                            double lambda, const DataFn& f) {
  detail::require_ladder(s_list);
  const DiscreteModel lim = fam.model(1.0);
  const LambdaContext lctx = lambda_context(lim.spectrum, lambda);
  const GridFunction f1 = sample(lim.grid, f);
  const GridFunction u1 = apply_Glambda(lim.spectrum, lctx, f1);
  SLimitReport rep;
  rep.limit_lambda_1 = lim.spectrum.lambda(1);
  std::vector<double> track;
  for (double s : s_list) {
    const DiscreteModel m = fam.model(s);
    const LambdaContext ctx = lambda_context(m.spectrum, lambda);
    const GridFunction us = apply_Glambda(m.spectrum, ctx, sample(m.grid, f));
    SLimitRow row;
    row.s = s;
    row.b = m.op.b;
    row.lambda_1 = m.spectrum.lambda(1);
    row.lambda_1_gap = std::abs(row.lambda_1 - rep.limit_lambda_1);
    row.resolvent_dist = weighted_norm(GridFunction{m.grid, us.values - u1.values}, NormSpec::l2());
    track.push_back(row.resolvent_dist);
    rep.rows.push_back(row);
  }
  rep.monotone = detail::nonincreasing(track);
  return rep;
}

/// Large solutions v(s) = M_s(h) + G_{s,lambda}(g + lambda M_s(h)) against the
/// classical v(1), on the compact set K; records the boundary blow-up fit.
inline SLimitReport large_solution_limit_s(const OperatorFamily& fam, const std::vector<double>& s_list,
                                           double lambda, const DataFn& g, const BoundaryData& h,
                                           double k_frac = default_K_fraction) {
  detail::require_ladder(s_list);
  const DiscreteModel lim = fam.model(1.0);
  const SolveReport v1 = solve_large(lim, lambda_context(lim.spectrum, lambda), sample(lim.grid, g), h, k_frac);
  const auto kset = compact_set(*lim.grid, k_frac);
  const double r = fam.domain.radius;
  const bool ball = fam.domain.kind == DomainKind::Ball;
  SLimitReport rep;
  rep.limit_lambda_1 = lim.spectrum.lambda(1);
  std::vector<double> track;
  for (double s : s_list) {
    const DiscreteModel m = fam.model(s);
    const SolveReport vs = solve_large(m, lambda_context(m.spectrum, lambda), sample(m.grid, g), h, k_frac);
    SLimitRow row;
    row.s = s;
    row.b = m.op.b;
    row.lambda_1 = m.spectrum.lambda(1);
    row.lambda_1_gap = std::abs(row.lambda_1 - rep.limit_lambda_1);
    row.sol_dist = detail::l1_on(GridFunction{m.grid, vs.v.values - v1.v.values}, kset);
    row.sup_K = vs.sup_K;
    for (std::size_t i : kset) {
      const double y = m.grid->nodes[i];
      // On the ball the radial data only see the spherical mean of the kernel.
      const double d1 = ball ? radial_martin_average(lim.op, y) : poisson_kernel_classical(fam.domain, r, y);
      const double ds = ball ? radial_martin_average(m.op, y) : martin_kernel(m.op, r, y);
      row.kernel_dist = std::max(row.kernel_dist, std::abs(ds - d1) / d1);
    }
    const auto idx = detail::nodes_near(*m.grid, r, 5);
    std::vector<double> lx, ly;
    for (std::size_t i : idx) {
      lx.push_back(std::log(m.grid->delta[i]));
      ly.push_back(std::log(std::abs(vs.v[i])));
    }
    row.boundary_fit = least_squares_slope(lx, ly);
    row.boundary_amp = vs.v[idx.front()] * std::pow(m.grid->delta[idx.front()], row.b);
    track.push_back(row.sol_dist);
    rep.rows.push_back(row);
  }
  rep.monotone = detail::nonincreasing(track);
  return rep;
}

}  // namespace nonlocal
