#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nonlocal/discretize.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/kernels.hpp"

namespace nonlocal {

/// Boundary datum h: values at -r and +r on the interval; a single constant
/// on the sphere (minus == plus).
struct BoundaryData {
  double minus = 0.0;
  double plus = 0.0;

  static BoundaryData constant(double c) { return {c, c}; }
  bool is_zero() const { return minus == 0.0 && plus == 0.0; }
  double sup() const { return std::max(std::abs(minus), std::abs(plus)); }
};

namespace detail {

inline void require_martin(const OperatorSpec& op, const BoundaryData& h, const char* who) {
  if (op.domain.kind == DomainKind::Ball) {
    if (op.kind == OperatorKind::SFL)
      throw InvalidArgument(std::string(who) + ": no Martin kernel for SFL on the ball");
    if (h.minus != h.plus)
      throw InvalidArgument(std::string(who) + ": ball data must be a constant h");
  }
  if (!std::isfinite(h.minus) || !std::isfinite(h.plus))
    throw InvalidArgument(std::string(who) + ": boundary data must be finite");
}

// |S^{n-1}| r^{n-1} times the spherical mean of D_gamma G_0(z, x), |x| = rho.
inline double ball_martin_factor(const OperatorSpec& op, double rho) {
  const int n = op.domain.dim;
  const double r = op.domain.radius;
  return sphere_area(n) * std::pow(r, n - 1) * radial_martin_average(op, rho);
}

}  // namespace detail

/// v_h(x) = int_{boundary} D_gamma G_0(z, x) h(z) dH^{n-1}(z); counting
/// measure on the interval boundary.
inline GridFunction martin_apply(const OperatorSpec& op, const GridPtr& grid, const BoundaryData& h) {
  detail::require_martin(op, h, "martin_apply");
  if (!detail::same_domain(op.domain, grid->domain))
    throw InvalidArgument("martin_apply: operator and grid domains differ");
  GridFunction v = constant(grid, 0.0);
  if (h.is_zero()) return v;
  const double r = op.domain.radius;
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->nodes[i];
    double val;
    if (op.domain.kind == DomainKind::Ball) {
      val = h.plus * detail::ball_martin_factor(op, x);
    } else {
      val = 0.0;
      if (h.minus != 0.0) val += h.minus * martin_kernel(op, -r, x);
      if (h.plus != 0.0) val += h.plus * martin_kernel(op, r, x);
    }
    v.values[static_cast<Eigen::Index>(i)] = val;
  }
  return v;
}

/// D_gamma G_0(f)(z) = int D_gamma G_0(z, y) f(y) dy for bounded f. On the
/// ball f is radial and the value does not depend on z.
inline double gamma_normal_derivative_G0(const OperatorSpec& op, const GridFunction& f, double z,
                                         double cap = 1e12) {
  const QuadGrid& g = *f.grid;
  if (!detail::same_domain(op.domain, g.domain))
    throw InvalidArgument("gamma_normal_derivative_G0: operator and grid domains differ");
  if (!(f.values.cwiseAbs().maxCoeff() <= cap))
    throw InvalidArgument("gamma_normal_derivative_G0: datum exceeds the boundedness cap");
  const bool ball = op.domain.kind == DomainKind::Ball;
  if (ball && op.kind == OperatorKind::SFL)
    throw InvalidArgument("gamma_normal_derivative_G0: no Martin kernel for SFL on the ball");
  const double r = op.domain.radius;
  if (std::abs(std::abs(z) - r) > 1e-12 * r)
    throw InvalidArgument("gamma_normal_derivative_G0: z must lie on the boundary");
  double acc = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double fj = f[j];
    if (fj == 0.0) continue;
    const double k = ball ? radial_martin_average(op, g.nodes[j]) : martin_kernel(op, z, g.nodes[j]);
    acc += g.weights[j] * k * fj;
  }
  return acc;
}

enum class TraceMode { Ratio, RflExplicit };

inline std::string to_string(TraceMode m) { return m == TraceMode::Ratio ? "ratio" : "rfl_explicit"; }

struct TraceReport {
  double z = 0.0;
  double value = 0.0;
  double error = 0.0;
  std::vector<double> deltas;
  TraceMode mode = TraceMode::Ratio;
};

namespace detail {

// Indices of the `count` nodes nearest to the boundary point z, nearest first.
inline std::vector<std::size_t> nodes_near(const QuadGrid& g, double z, std::size_t count) {
  std::vector<std::size_t> idx;
  const bool ball = g.domain.kind == DomainKind::Ball;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (ball || (z > 0) == (g.nodes[i] > 0)) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return g.delta[a] < g.delta[b]; });
  if (idx.size() > count) idx.resize(count);
  return idx;
}

// Neville extrapolation to delta = 0 through the 5 given samples; the error
// estimate is the change when the farthest sample is dropped.
inline TraceReport extrapolate_trace(const QuadGrid& g, const std::vector<std::size_t>& idx,
                                     const std::vector<double>& q, double z, TraceMode mode) {
  TraceReport rep;
  rep.z = z;
  rep.mode = mode;
  for (std::size_t i : idx) rep.deltas.push_back(g.delta[i]);
  rep.value = extrapolate_to_zero(rep.deltas, q);
  const double lower = extrapolate_to_zero(std::span(rep.deltas).first(4), std::span(q).first(4));
  rep.error = std::abs(rep.value - lower);
  const double scale = std::max(std::abs(rep.value), 1e-8 * std::abs(q.front()));
  if (!std::isfinite(rep.value) || rep.error > std::max(scale, 1e-300))
    throw NumericalFailure("weighted_trace: extrapolation does not settle", rep.error);
  return rep;
}

}  // namespace detail

/// Weighted trace B u(z) = lim u(x) / M(1)(x). `RflExplicit` extrapolates
/// Gamma(1+s)^2 delta^{1-s} u instead.
inline TraceReport weighted_trace(const OperatorSpec& op, const GridFunction& u, double z,
                                  TraceMode mode = TraceMode::Ratio) {
  const QuadGrid& g = *u.grid;
  if (std::abs(std::abs(z) - op.domain.radius) > 1e-12 * op.domain.radius)
    throw InvalidArgument("weighted_trace: z must lie on the boundary");
  if (mode == TraceMode::RflExplicit && op.kind != OperatorKind::RFL)
    throw InvalidArgument("weighted_trace: explicit mode needs the restricted operator");
  const auto idx = detail::nodes_near(g, z, 5);
  if (idx.size() < 5) throw InvalidArgument("weighted_trace: fewer than 5 usable nodes");
  std::vector<double> q;
  if (mode == TraceMode::Ratio) {
    const GridFunction m1 = martin_apply(op, u.grid, BoundaryData::constant(1.0));
    for (std::size_t i : idx) q.push_back(u[i] / m1[i]);
  } else {
    const double c = std::pow(std::tgamma(1.0 + op.s), 2);
    for (std::size_t i : idx) q.push_back(c * std::pow(g.delta[i], 1.0 - op.s) * u[i]);
  }
  return detail::extrapolate_trace(g, idx, q, z, mode);
}

/// Measured lim delta^b M(1)(x) as x -> z, extrapolated like a trace.
inline TraceReport martin_boundary_constant(const OperatorSpec& op, const GridPtr& grid, double z) {
  const GridFunction m1 = martin_apply(op, grid, BoundaryData::constant(1.0));
  const auto idx = detail::nodes_near(*grid, z, 5);
  if (idx.size() < 5) throw InvalidArgument("martin_boundary_constant: fewer than 5 usable nodes");
  std::vector<double> q;
  for (std::size_t i : idx) q.push_back(std::pow(grid->delta[i], op.b) * m1[i]);
  return detail::extrapolate_trace(*grid, idx, q, z, TraceMode::Ratio);
}

}  // namespace nonlocal
