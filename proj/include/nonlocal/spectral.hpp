#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "nonlocal/discretize.hpp"
#include "nonlocal/errors.hpp"

namespace nonlocal {

/// Discrete eigenpairs of L: lambda_j = 1/mu_j for the eigenvalues mu_j of the
/// Nystrom operator, ascending, with W-orthonormal eigenvectors (columns).
struct SpectralData {
  GridPtr grid;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  // Half-open index ranges [first, last) of eigenvalue groups.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  double mult_tol = 1e-6;
  double mu_max = 0.0;
  std::size_t discarded = 0;

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
  double lambda(std::size_t j) const { return eigenvalues[static_cast<Eigen::Index>(j - 1)]; }
  /// phi_j, 1-based.
  GridFunction phi(std::size_t j) const {
    return GridFunction{grid, eigenvectors.col(static_cast<Eigen::Index>(j - 1))};
  }
  /// Group [first, last) (0-based) containing the 1-based index j.
  std::pair<std::size_t, std::size_t> group_of(std::size_t j) const {
    for (const auto& g : groups)
      if (j - 1 >= g.first && j - 1 < g.second) return g;
    throw InvalidArgument("SpectralData::group_of: index out of range");
  }
};

inline SpectralData eigendecompose(const DiscreteKernel& dk, double mult_tol = 1e-6) {
  const Eigen::MatrixXd& k = dk.matrix;
  const double scale = k.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw NumericalFailure("eigendecompose: zero kernel matrix");
  const double asym = (k - k.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) throw NumericalFailure("eigendecompose: matrix is not symmetric", asym / scale);

  const Eigen::VectorXd sw = weights_of(*dk.grid).cwiseSqrt();
  const Eigen::MatrixXd a = sw.asDiagonal() * k * sw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigendecompose: eigensolver failed");
  const Eigen::VectorXd& mu = es.eigenvalues();  // ascending
  const auto n = mu.size();
  const double mu_max = mu[n - 1];
  if (!(mu_max > 0.0)) throw NumericalFailure("eigendecompose: no positive eigenvalue");
  if (mu[0] < -1e-8 * mu_max)
    throw NumericalFailure("eigendecompose: operator is indefinite beyond tolerance", mu[0] / mu_max);

  const double floor = 1e-14 * mu_max;
  Eigen::Index kept = 0;
  while (kept < n && mu[n - 1 - kept] > floor) ++kept;

  SpectralData sd;
  sd.grid = dk.grid;
  sd.mult_tol = mult_tol;
  sd.mu_max = mu_max;
  sd.discarded = static_cast<std::size_t>(n - kept);
  sd.eigenvalues.resize(kept);
  sd.eigenvectors.resize(n, kept);
  const Eigen::VectorXd w = weights_of(*dk.grid);
  for (Eigen::Index j = 0; j < kept; ++j) {
    const Eigen::Index src = n - 1 - j;
    sd.eigenvalues[j] = 1.0 / mu[src];
    Eigen::VectorXd v = es.eigenvectors().col(src).cwiseQuotient(sw);
    bool flip;
    if (j == 0) {
      flip = w.dot(v) < 0.0;
    } else {
      const double cut = 1e-8 * v.cwiseAbs().maxCoeff();
      Eigen::Index first = 0;
      while (first < n && std::abs(v[first]) <= cut) ++first;
      flip = first < n && v[first] < 0.0;
    }
    sd.eigenvectors.col(j) = flip ? Eigen::VectorXd(-v) : v;
  }

  std::size_t start = 0;
  for (std::size_t j = 1; j <= static_cast<std::size_t>(kept); ++j) {
    const bool split = j == static_cast<std::size_t>(kept) ||
                       sd.eigenvalues[static_cast<Eigen::Index>(j)] -
                               sd.eigenvalues[static_cast<Eigen::Index>(j - 1)] >=
                           mult_tol * sd.eigenvalues[static_cast<Eigen::Index>(j)];
    if (split) {
      sd.groups.emplace_back(start, j);
      start = j;
    }
  }
  return sd;
}

/// lambda together with I (number of modes spanning E), lambda_bar =
/// lambda_{I+1} and d(lambda) = dist(lambda, spectrum).
///
/// I = min{ j : lambda_j >= lambda and lambda_{j+1} > lambda_j }, so E always
/// contains the first eigenvalue group at or above lambda.
struct LambdaContext {
  double lambda = 0.0;
  std::size_t I = 0;
  double lambda_bar = std::numeric_limits<double>::infinity();
  double dist = 0.0;
  double lambda_1 = 0.0;
  bool singular = false;
  std::size_t nearest = 1;
};

inline LambdaContext lambda_context(const SpectralData& sd, double lambda,
                                    bool allow_singular = false) {
  if (!std::isfinite(lambda)) throw InvalidArgument("lambda_context: lambda must be finite");
  LambdaContext ctx;
  ctx.lambda = lambda;
  ctx.lambda_1 = sd.lambda(1);
  const Eigen::VectorXd d = (sd.eigenvalues.array() - lambda).abs();
  Eigen::Index jn;
  ctx.dist = d.minCoeff(&jn);
  ctx.nearest = static_cast<std::size_t>(jn) + 1;
  const double lam_n = sd.eigenvalues[jn];
  ctx.singular = ctx.dist <= sd.mult_tol * std::abs(lam_n);
  if (ctx.singular && !allow_singular) throw SingularLambda(lambda, ctx.nearest, lam_n);

  ctx.I = sd.size();
  for (const auto& g : sd.groups) {
    const double v = sd.eigenvalues[static_cast<Eigen::Index>(g.first)];
    if (v >= lambda - sd.mult_tol * std::abs(v)) {
      ctx.I = g.second;
      break;
    }
  }
  if (ctx.I < sd.size()) ctx.lambda_bar = sd.eigenvalues[static_cast<Eigen::Index>(ctx.I)];
  return ctx;
}

/// <f, phi_j>_W for all retained modes.
inline Eigen::VectorXd coefficients(const SpectralData& sd, const GridFunction& f) {
  require_same_grid(f, sd.grid, "coefficients");
  return sd.eigenvectors.transpose() * weights_of(*sd.grid).cwiseProduct(f.values);
}

namespace detail {

// sum_j c_j phi_j / (lambda_j - lambda) over modes j in [from, to).
inline GridFunction spectral_sum(const SpectralData& sd, const Eigen::VectorXd& c,
                                        double lambda, std::size_t from, std::size_t to) {
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(c.size());
  for (std::size_t j = from; j < to; ++j) {
    const auto e = static_cast<Eigen::Index>(j);
    scaled[e] = c[e] / (sd.eigenvalues[e] - lambda);
  }
  return GridFunction{sd.grid, sd.eigenvectors * scaled};
}

}  // namespace detail

/// G_lambda f = sum_j <f, phi_j> phi_j / (lambda_j - lambda).
inline GridFunction apply_Glambda(const SpectralData& sd, const LambdaContext& ctx,
                                  const GridFunction& f) {
  if (ctx.singular)
    throw SingularLambda(ctx.lambda, ctx.nearest, sd.lambda(ctx.nearest));
  return detail::spectral_sum(sd, coefficients(sd, f), ctx.lambda, 0, sd.size());
}

/// Fixed-point iteration u <- lambda G_0 u + G_0 f, for |lambda| < lambda_1.
/// Stops when ||u - lambda G_0 u - G_0 f||_{L2} <= tol ||G_0 f||_{L2}.
inline GridFunction apply_Glambda_neumann(const DiscreteKernel& dk, const LambdaContext& ctx,
                                          const GridFunction& f, double tol = 1e-13,
                                          int max_iter = 100000) {
  if (!(std::abs(ctx.lambda) < ctx.lambda_1))
    throw InvalidArgument("apply_Glambda_neumann: needs |lambda| < lambda_1");
  const GridFunction g0f = apply_G0(dk, f);
  const double ref = std::max(weighted_norm(g0f, NormSpec::l2()), std::numeric_limits<double>::min());
  GridFunction u = g0f;
  if (ctx.lambda == 0.0) return u;
  double res = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    GridFunction next{dk.grid, ctx.lambda * apply_G0(dk, u).values + g0f.values};
    res = weighted_norm(GridFunction{dk.grid, next.values - u.values}, NormSpec::l2());
    u = std::move(next);
    if (res <= tol * ref) return u;
  }
  throw NumericalFailure("apply_Glambda_neumann: no convergence", res / ref);
}

/// f - sum_{j <= I} <f, phi_j> phi_j.
inline GridFunction project_perp(const SpectralData& sd, const LambdaContext& ctx,
                                 const GridFunction& f) {
  const Eigen::VectorXd c = coefficients(sd, f);
  const auto i = static_cast<Eigen::Index>(ctx.I);
  return GridFunction{sd.grid, f.values - sd.eigenvectors.leftCols(i) * c.head(i)};
}

/// Projection onto the eigenvalue group containing the 1-based index i.
inline GridFunction project_group(const SpectralData& sd, std::size_t i, const GridFunction& f) {
  const auto [first, last] = sd.group_of(i);
  const Eigen::VectorXd c = coefficients(sd, f);
  const auto a = static_cast<Eigen::Index>(first), len = static_cast<Eigen::Index>(last - first);
  return GridFunction{sd.grid, sd.eigenvectors.middleCols(a, len) * c.segment(a, len)};
}

/// G_lambda restricted to E-perp. Defined also at singular lambda, since the
/// singular group lies in E.
inline GridFunction apply_Glambda_perp(const SpectralData& sd, const LambdaContext& ctx,
                                       const GridFunction& f_perp) {
  const Eigen::VectorXd c = coefficients(sd, f_perp);
  const double scale = std::max(weighted_norm(f_perp, NormSpec::l2()), std::numeric_limits<double>::min());
  for (std::size_t j = 0; j < ctx.I; ++j) {
    if (std::abs(c[static_cast<Eigen::Index>(j)]) > 1e-8 * scale)
      throw InvalidArgument("apply_Glambda_perp: datum is not orthogonal to E");
  }
  return detail::spectral_sum(sd, c, ctx.lambda, ctx.I, sd.size());
}

/// (sum_j lambda_j^k <u, phi_j>^2)^{1/2}.
inline double spectral_norm_Hk(const SpectralData& sd, const GridFunction& u, double k) {
  if (!(k >= 0.0)) throw InvalidArgument("spectral_norm_Hk: k must be >= 0");
  const Eigen::VectorXd c = coefficients(sd, u);
  return std::sqrt((sd.eigenvalues.array().pow(k) * c.array().square()).sum());
}

}  // namespace nonlocal
