#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>

#include "nonlocal/detail/parallel.hpp"
#include "nonlocal/errors.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/kernels.hpp"

namespace nonlocal {

/// Values at the nodes of a grid.
struct GridFunction {
  GridPtr grid;
  Eigen::VectorXd values;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  double operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

inline void require_same_grid(const GridFunction& f, const GridPtr& g, const char* who) {
  if (f.grid != g || f.size() != g->size())
    throw InvalidArgument(std::string(who) + ": grid function lives on a different grid");
}

/// Samples fn(x_i, delta_i).
inline GridFunction sample(const GridPtr& grid,
                           const std::function<double(double, double)>& fn) {
  GridFunction f{grid, Eigen::VectorXd(static_cast<Eigen::Index>(grid->size()))};
  for (std::size_t i = 0; i < grid->size(); ++i)
    f.values[static_cast<Eigen::Index>(i)] = fn(grid->nodes[i], grid->delta[i]);
  return f;
}

inline GridFunction constant(const GridPtr& grid, double c) {
  return GridFunction{grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid->size()), c)};
}

inline Eigen::Map<const Eigen::VectorXd> weights_of(const QuadGrid& g) {
  return {g.weights.data(), static_cast<Eigen::Index>(g.weights.size())};
}

inline Eigen::Map<const Eigen::VectorXd> delta_of(const QuadGrid& g) {
  return {g.delta.data(), static_cast<Eigen::Index>(g.delta.size())};
}

enum class DiagonalRule { CellAverage, PointValue };

inline std::string to_string(DiagonalRule r) {
  return r == DiagonalRule::CellAverage ? "cell_average" : "point_value";
}

/// Nystrom matrix K_ij ~ G_0(x_i, x_j); G_0 f (x_i) ~ sum_j K_ij w_j f_j.
struct DiscreteKernel {
  Eigen::MatrixXd matrix;
  GridPtr grid;
  OperatorSpec op;
  DiagonalRule rule = DiagonalRule::CellAverage;
};

namespace detail {

inline bool same_domain(const DomainSpec& a, const DomainSpec& b) {
  return a.kind == b.kind && a.dim == b.dim && a.radius == b.radius;
}

// (1/w_i) int_cell G(x_i, y) dy, split at the node. `kern(t)` is the kernel at
// signed offset t = y - x_i, so the singular point is an exact endpoint.
// Offsets below 1e-150 (where |x-y|^2 underflows) contribute nothing
// measurable to an integrable singularity and are dropped.
template <class Kern>
double cell_average(const QuadGrid& g, std::size_t i, Kern&& kern) {
  const double x = g.nodes[i];
  const double left = x - g.cell_lo[i], right = g.cell_hi[i] - x;
  auto safe = [&](double t) { return std::abs(t) < 1e-150 ? 0.0 : kern(t); };
  double acc = 0.0;
  if (right > 0.0) acc += integrate_singular([&](double t) { return safe(t); }, 0.0, right);
  if (left > 0.0) acc += integrate_singular([&](double t) { return safe(-t); }, 0.0, left);
  return acc / g.weights[i];
}

inline Eigen::MatrixXd assemble_sfl(const OperatorSpec& op, const QuadGrid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const int m = op.sfl_terms;
  const double r = op.domain.radius;
  Eigen::MatrixXd phi(n, m);
  Eigen::VectorXd scale(m);
  for (int k = 1; k <= m; ++k) {
    scale[k - 1] = std::pow(dirichlet_eigenvalue(r, k), -0.5 * op.s);
    for (Eigen::Index i = 0; i < n; ++i)
      phi(i, k - 1) = sfl_eigenfunction(r, k, g.nodes[static_cast<std::size_t>(i)]) * scale[k - 1];
  }
  Eigen::MatrixXd k(n, n);
  k.setZero();
  k.selfadjointView<Eigen::Lower>().rankUpdate(phi);
  return k.selfadjointView<Eigen::Lower>();
}

}  // namespace detail

/// Nystrom assembly. Off-diagonal entries are kernel values; the diagonal is
/// the cell average of G_0(x_i, .) over the node's cell, which absorbs the
/// |x-y|^{2s-n} (or logarithmic) singularity. The spectral operator's
/// truncated series is smooth and uses point values throughout.
inline DiscreteKernel assemble_green_matrix(const OperatorSpec& op, const GridPtr& grid) {
  if (!grid) throw InvalidArgument("assemble_green_matrix: null grid");
  if (!detail::same_domain(op.domain, grid->domain))
    throw InvalidArgument("assemble_green_matrix: operator and grid domains differ");
  const QuadGrid& g = *grid;
  const auto n = static_cast<Eigen::Index>(g.size());
  DiscreteKernel dk{Eigen::MatrixXd(n, n), grid, op, DiagonalRule::CellAverage};

  if (op.kind == OperatorKind::SFL) {
    if (!(op.s > 0.5)) throw InvalidArgument("assemble_green_matrix: SFL needs s > 1/2");
    dk.matrix = detail::assemble_sfl(op, g);
    dk.rule = DiagonalRule::PointValue;
    return dk;
  }

  const double r = op.domain.radius;
  const int dim = op.domain.dim;
  const bool ball = op.domain.kind == DomainKind::Ball;
  const bool classical_interval = op.kind == OperatorKind::Classical && !ball;
  auto entry = [&](double x, double y) {
    if (classical_interval) return classical_green_interval(r, x, y);
    if (ball) return radial_green(op, x, y);
    return detail::boggio_green(op.s, 1, r, std::abs(x), std::abs(y), std::abs(x - y));
  };

  Eigen::MatrixXd& k = dk.matrix;
  detail::parallel_for(g.size(), [&](std::size_t i) {
    const double x = g.nodes[i];
    for (std::size_t j = 0; j < i; ++j) {
      k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(x, g.nodes[j]);
    }
    double diag;
    if (ball) {
      const double area = sphere_area(dim);
      diag = detail::cell_average(g, i, [&](double t) {
        const double y = x + t;
        if (t == 0.0 || y <= 0.0 || y >= r) return 0.0;
        return radial_green(op, x, y) * area * std::pow(y, dim - 1);
      });
    } else {
      diag = detail::cell_average(g, i, [&](double t) {
        const double y = x + t;
        if (t == 0.0 || std::abs(y) >= r) return 0.0;
        if (classical_interval) return classical_green_interval(r, x, y);
        return detail::boggio_green(op.s, 1, r, std::abs(x), std::abs(y), std::abs(t));
      });
    }
    k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag;
  });
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return dk;
}

/// u_i = sum_j K_ij w_j f_j.
inline GridFunction apply_G0(const DiscreteKernel& dk, const GridFunction& f) {
  require_same_grid(f, dk.grid, "apply_G0");
  Eigen::VectorXd wf = weights_of(*dk.grid).cwiseProduct(f.values);
  return GridFunction{dk.grid, dk.matrix * wf};
}

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

struct NormSpec {
  enum class Kind { L1Delta, L2, Linf, LinfOverDelta, Lp } kind = Kind::L2;
  double param = 0.0;

  static NormSpec l1_delta(double alpha) { return {Kind::L1Delta, alpha}; }
  static NormSpec l2() { return {Kind::L2, 0.0}; }
  static NormSpec linf() { return {Kind::Linf, 0.0}; }
  static NormSpec linf_over_delta(double alpha) { return {Kind::LinfOverDelta, alpha}; }
  static NormSpec lp(double p) { return {Kind::Lp, p}; }
};

/// Quadrature norms on the open grid. `gamma` is the operator's boundary
/// exponent; weights delta^alpha with alpha <= -1 - gamma are rejected.
inline double weighted_norm(const GridFunction& f, const NormSpec& spec,
                            std::optional<double> gamma = std::nullopt) {
  const QuadGrid& g = *f.grid;
  const auto w = weights_of(g);
  const auto d = delta_of(g);
  const Eigen::ArrayXd a = f.values.array().abs();
  switch (spec.kind) {
    case NormSpec::Kind::L1Delta: {
      const double lim = -1.0 - gamma.value_or(1.0);
      if (spec.param <= lim)
        throw InvalidArgument("weighted_norm: weight exponent outside the admissible range");
      return (w.array() * a * d.array().pow(spec.param)).sum();
    }
    case NormSpec::Kind::L2: return std::sqrt((w.array() * a.square()).sum());
    case NormSpec::Kind::Linf: return a.maxCoeff();
    case NormSpec::Kind::LinfOverDelta: return (a / d.array().pow(spec.param)).maxCoeff();
    case NormSpec::Kind::Lp:
      if (!(spec.param >= 1.0)) throw InvalidArgument("weighted_norm: Lp needs p >= 1");
      return std::pow((w.array() * a.pow(spec.param)).sum(), 1.0 / spec.param);
  }
  throw InvalidArgument("weighted_norm: unknown norm");
}

/// <u, v>_W = sum_i w_i u_i v_i.
inline double inner(const GridFunction& u, const GridFunction& v) {
  if (u.grid != v.grid) throw InvalidArgument("inner: grid mismatch");
  return (weights_of(*u.grid).array() * u.values.array() * v.values.array()).sum();
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

/// Writes `<stem>.bin` (row-major doubles) and `<stem>.json` (header).
inline void export_kernel(const DiscreteKernel& dk, const std::filesystem::path& stem) {
  const auto n = dk.matrix.rows();
  {
    std::ofstream out(stem.string() + ".bin", std::ios::binary);
    if (!out) throw InvalidArgument("export_kernel: cannot open " + stem.string() + ".bin");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double v = dk.matrix(i, j);
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
  }
  nlohmann::json h{{"N", n},
                   {"s", dk.op.s},
                   {"gamma", dk.op.gamma},
                   {"kind", to_string(dk.op.kind)},
                   {"domain", to_string(dk.op.domain.kind)},
                   {"n", dk.op.domain.dim},
                   {"r", dk.op.domain.radius},
                   {"diagonal_rule", to_string(dk.rule)},
                   {"layout", "row_major_float64"}};
  std::ofstream(stem.string() + ".json") << h.dump(2) << '\n';
}

}  // namespace nonlocal
