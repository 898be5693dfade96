#pragma once

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nonlocal/errors.hpp"
#include "nonlocal/geometry.hpp"
#include "nonlocal/numerics.hpp"

namespace nonlocal {

enum class OperatorKind { RFL, SFL, Classical };

inline std::string to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::RFL: return "rfl";
    case OperatorKind::SFL: return "sfl";
    case OperatorKind::Classical: return "classical";
  }
  return "?";
}

/// Operator order s, boundary exponent gamma and blow-up exponent
/// b = 1 - 2s + gamma, together with the domain it acts on.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::RFL;
  double s = 0.5;
  double gamma = 0.5;
  double b = 0.5;
  DomainSpec domain;
  int sfl_terms = 4096;
};

inline OperatorSpec make_operator(OperatorKind kind, double s,
                                  const DomainSpec& domain,
                                  int sfl_terms = 4096) {
  OperatorSpec op;
  op.kind = kind;
  op.domain = domain;
  op.sfl_terms = sfl_terms;
  switch (kind) {
    case OperatorKind::RFL:
      if (!(s > 0.0 && s <= 1.0))
        throw InvalidArgument("make_operator: RFL needs s in (0, 1]");
      op.s = s;
      op.gamma = s;
      break;
    case OperatorKind::SFL:
      if (!(s > 0.5 && s <= 1.0))
        throw InvalidArgument("make_operator: SFL needs s in (1/2, 1] so that gamma < 2s");
      if (domain.kind != DomainKind::Interval)
        throw InvalidArgument("make_operator: SFL is implemented on the interval only");
      if (sfl_terms < 1) throw InvalidArgument("make_operator: SFL truncation must be >= 1");
      op.s = s;
      op.gamma = 1.0;
      break;
    case OperatorKind::Classical:
      op.s = 1.0;
      op.gamma = 1.0;
      break;
  }
  op.b = 1.0 - 2.0 * op.s + op.gamma;
  return op;
}

// ---------------------------------------------------------------------------
// Boggio representation on the ball
// ---------------------------------------------------------------------------

/// J(rho) = int_0^rho t^{s-1} (1+t)^{-n/2} dt by double-exponential
/// quadrature: directly on [0, min(rho,1)], with t = e^w on [1, rho].
inline double boggio_integral_quadrature(double s, int n, double rho) {
  if (rho <= 0.0) return 0.0;
  const double half_n = 0.5 * n;
  auto head = [&](double t) { return std::pow(t, s - 1.0) * std::pow(1.0 + t, -half_n); };
  double value = integrate_singular(head, 0.0, std::min(rho, 1.0), 1e-14);
  if (rho > 1.0) {
    auto tail = [&](double w) { return std::exp(s * w) * std::pow(1.0 + std::exp(w), -half_n); };
    value += integrate_singular(tail, 0.0, std::log(rho), 1e-14);
  }
  return value;
}

namespace detail {

// B_x(a, b) for b > 0, with x given together with 1 - x to avoid cancellation.
inline double incomplete_beta(double a, double b, double x, double xc) {
  if (x <= 0.5) return boost::math::beta(a, b, x);
  return boost::math::beta(a, b) - boost::math::beta(b, a, xc);
}

}  // namespace detail

/// J(rho) with closed forms where available, otherwise the incomplete beta
/// function B_x(s, n/2 - s), x = rho/(1+rho). For n/2 - s in (-1, 0) the
/// second parameter is lifted with
///   B_x(a, b) = [(a+b) B_x(a, b+1) - x^a (1-x)^b] / b.
inline double boggio_integral(double s, int n, double rho) {
  if (rho <= 0.0) return 0.0;
  if (!std::isfinite(rho)) {
    const double bp = 0.5 * n - s;
    return bp > 0.0 ? boost::math::beta(s, bp) : std::numeric_limits<double>::infinity();
  }
  if (s == 1.0) {
    if (n == 2) return std::log1p(rho);
    const double e = 1.0 - 0.5 * n;
    return (std::pow(1.0 + rho, e) - 1.0) / e;
  }
  if (n == 1 && s == 0.5) return 2.0 * std::asinh(std::sqrt(rho));
  const double bp = 0.5 * n - s;
  const double x = rho / (1.0 + rho), xc = 1.0 / (1.0 + rho);
  if (bp > 0.0) return detail::incomplete_beta(s, bp, x, xc);
  if (bp > -1.0 && bp < 0.0) {
    const double lifted = detail::incomplete_beta(s, bp + 1.0, x, xc);
    return ((s + bp) * lifted - std::pow(x, s) * std::pow(xc, bp)) / bp;
  }
  return boggio_integral_quadrature(s, n, rho);
}

namespace detail {

inline double boggio_constant(double s, int n) {
  return std::tgamma(0.5 * n) /
         (std::pow(2.0, 2.0 * s) * std::pow(std::tgamma(s), 2) *
          std::pow(pi, 0.5 * n));
}

// Green's function of the restricted operator on B_r from |x|, |y|, |x-y|.
inline double boggio_green(double s, int n, double r, double abs_x,
                           double abs_y, double dist) {
  const double ax = (r - abs_x) * (r + abs_x);
  const double ay = (r - abs_y) * (r + abs_y);
  if (ax <= 0.0 || ay <= 0.0) return 0.0;
  const double rho = (ax * ay) / (r * r * dist * dist);
  return boggio_constant(s, n) * std::pow(dist, 2.0 * s - n) *
         boggio_integral(s, n, rho);
}

inline double norm(std::span<const double> x) {
  double acc = 0.0;
  for (double c : x) acc += c * c;
  return std::sqrt(acc);
}

inline double distance(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(acc);
}

inline void require_boggio(const OperatorSpec& op, const char* who) {
  if (op.kind == OperatorKind::SFL)
    throw InvalidArgument(std::string(who) + ": needs the restricted or classical operator");
}

inline void require_inside(const DomainSpec& d, double abs_x, const char* who) {
  if (!(abs_x < d.radius)) throw InvalidArgument(std::string(who) + ": point outside the domain");
}

inline void require_on_boundary(const DomainSpec& d, double abs_z, const char* who) {
  if (std::abs(abs_z - d.radius) > 1e-12 * d.radius)
    throw InvalidArgument(std::string(who) + ": z must lie on the boundary");
}

}  // namespace detail

/// Green's function of (-Delta)^s (restricted) on B_r, Boggio's formula.
/// Also valid at s = 1, where it is the classical Green's function.
inline double rfl_green_ball(const OperatorSpec& op, std::span<const double> x,
                             std::span<const double> y) {
  detail::require_boggio(op, "rfl_green_ball");
  const double ax = detail::norm(x), ay = detail::norm(y);
  detail::require_inside(op.domain, ax, "rfl_green_ball");
  detail::require_inside(op.domain, ay, "rfl_green_ball");
  const double dist = detail::distance(x, y);
  if (dist == 0.0)
    throw InvalidArgument("rfl_green_ball: diagonal x = y requested; use the cell rule");
  return detail::boggio_green(op.s, op.domain.dim, op.domain.radius, ax, ay, dist);
}

inline double rfl_green_ball(const OperatorSpec& op, double x, double y) {
  return rfl_green_ball(op, std::span<const double>(&x, 1),
                        std::span<const double>(&y, 1));
}

/// Classical Green's function of -d^2/dx^2 on (-r, r).
inline double classical_green_interval(double r, double x, double y) {
  const double hi = std::max(x, y), lo = std::min(x, y);
  return (r - hi) * (r + lo) / (2.0 * r);
}

// ---------------------------------------------------------------------------
// Spectral operator on the interval
// ---------------------------------------------------------------------------

/// L2-normalised Dirichlet eigenfunction sin(k pi (x+r)/(2r)) / sqrt(r).
inline double sfl_eigenfunction(double r, int k, double x) {
  return std::sin(k * pi * (x + r) / (2.0 * r)) / std::sqrt(r);
}

/// Dirichlet Laplacian eigenvalue (k pi / 2r)^2.
inline double dirichlet_eigenvalue(double r, int k) {
  const double a = k * pi / (2.0 * r);
  return a * a;
}

/// Truncated eigen-expansion sum_{k<=M} phi_k(x) phi_k(y) / mu_k^s.
inline double sfl_green_interval(const OperatorSpec& op, double x, double y) {
  if (op.kind != OperatorKind::SFL)
    throw InvalidArgument("sfl_green_interval: operator is not SFL");
  if (!(op.s > 0.5)) throw InvalidArgument("sfl_green_interval: needs s > 1/2");
  const double r = op.domain.radius;
  if (std::abs(x) > r || std::abs(y) > r)
    throw InvalidArgument("sfl_green_interval: point outside the domain");
  const double tx = pi * (x + r) / (2.0 * r), ty = pi * (y + r) / (2.0 * r);
  double acc = 0.0;
  // Sum from the smallest terms up.
  for (int k = op.sfl_terms; k >= 1; --k) {
    acc += std::sin(k * tx) * std::sin(k * ty) *
           std::pow(dirichlet_eigenvalue(r, k), -op.s);
  }
  return acc / r;
}

/// S_a(psi) = sum_{k>=1} sin(k psi) / k^a for a in (0, 1], psi in (0, 2 pi),
/// evaluated from the expansion of the polylogarithm about psi = 0:
///   Gamma(1-a) cos(pi a/2) psi^{a-1} + sum_j (-1)^j zeta(a-2j-1) psi^{2j+1}/(2j+1)!
class SineClausen {
public:
  explicit SineClausen(double a) : a_(a) {
    if (!(a > 0.0 && a <= 1.0)) throw InvalidArgument("SineClausen: a must be in (0, 1]");
    const double eps = 1.0 - a;
    lead_ = eps == 0.0 ? 0.5 * pi : std::tgamma(eps) * std::sin(0.5 * pi * eps);
    double fact = 1.0;
    for (int j = 0; j < kTerms; ++j) {
      const int m = 2 * j + 1;
      fact *= (m == 1) ? 1.0 : static_cast<double>(m - 1) * m;
      const double z = boost::math::zeta(a - m);
      coef_[j] = ((j % 2 == 0) ? 1.0 : -1.0) * z / fact;
    }
  }

  double operator()(double psi) const {
    if (!(psi > 0.0 && psi < 2.0 * pi))
      throw InvalidArgument("SineClausen: psi must lie in (0, 2 pi)");
    const double psi2 = psi * psi;
    double series = 0.0;
    for (int j = kTerms - 1; j >= 0; --j) series = series * psi2 + coef_[j];
    series *= psi;
    return lead_ * std::pow(psi, a_ - 1.0) + series;
  }

private:
  static constexpr int kTerms = 40;
  double a_;
  double lead_;
  std::array<double, kTerms> coef_{};
};

namespace detail {

// Angle psi such that D_1 G_0^{SFL}(z, y) = r^{-1} (pi/2r)^{1-2s} S_{2s-1}(psi).
inline double sfl_martin_angle(const OperatorSpec& op, double z, double y) {
  const double r = op.domain.radius;
  detail::require_on_boundary(op.domain, std::abs(z), "sfl_martin_kernel_interval");
  if (!(std::abs(y) < r)) throw InvalidArgument("sfl_martin_kernel_interval: y outside the domain");
  return z > 0 ? pi * (r - y) / (2.0 * r) : pi * (r + y) / (2.0 * r);
}

inline void require_sfl(const OperatorSpec& op) {
  if (op.kind != OperatorKind::SFL)
    throw InvalidArgument("sfl_martin_kernel_interval: operator is not SFL");
  if (!(op.s > 0.5)) throw InvalidArgument("sfl_martin_kernel_interval: needs s > 1/2");
}

}  // namespace detail

/// Martin kernel (inner 1-normal derivative of G_0) of the spectral operator
/// at z = +-r. Sums the full eigen-series in closed form.
inline double sfl_martin_kernel_interval(const OperatorSpec& op, double z, double y) {
  detail::require_sfl(op);
  const double r = op.domain.radius;
  const double psi = detail::sfl_martin_angle(op, z, y);
  const SineClausen clausen(2.0 * op.s - 1.0);
  return std::pow(pi / (2.0 * r), 1.0 - 2.0 * op.s) * clausen(psi) / r;
}

/// Same kernel from the Abel-summed eigen-series with weights q^k,
/// q = 1 - 1/M, extrapolated (Richardson, three levels) to q = 1.
inline double sfl_martin_kernel_interval_abel(const OperatorSpec& op, double z,
                                              double y, int m) {
  detail::require_sfl(op);
  if (m < 1) throw InvalidArgument("sfl_martin_kernel_interval_abel: M must be >= 1");
  const double r = op.domain.radius;
  const double psi = detail::sfl_martin_angle(op, z, y);
  const double expo = 1.0 - 2.0 * op.s;
  auto abel = [&](double eps) {
    const double lq = std::log1p(-eps);
    const int kmax = static_cast<int>(std::ceil(std::log(1e-18) / lq)) + 1;
    double acc = 0.0;
    for (int k = kmax; k >= 1; --k)
      acc += std::exp(k * lq) * std::pow(static_cast<double>(k), expo) * std::sin(k * psi);
    return acc;
  };
  const std::array<double, 3> h{1.0 / m, 0.5 / m, 0.25 / m};
  const std::array<double, 3> v{abel(h[0]), abel(h[1]), abel(h[2])};
  return std::pow(pi / (2.0 * r), expo) * extrapolate_to_zero(h, v) / r;
}

// ---------------------------------------------------------------------------
// Martin kernels on the ball
// ---------------------------------------------------------------------------

/// D_s G_0(z, y) = Gamma(n/2) / (2^s s Gamma(s)^2 pi^{n/2}) (r^2-|y|^2)^s / (r^s |z-y|^n).
inline double rfl_martin_kernel_ball(const OperatorSpec& op, std::span<const double> z,
                                     std::span<const double> y) {
  detail::require_boggio(op, "rfl_martin_kernel_ball");
  const double r = op.domain.radius;
  const int n = op.domain.dim;
  const double s = op.s;
  detail::require_on_boundary(op.domain, detail::norm(z), "rfl_martin_kernel_ball");
  const double ay = detail::norm(y);
  detail::require_inside(op.domain, ay, "rfl_martin_kernel_ball");
  const double dist = detail::distance(z, y);
  if (dist == 0.0) throw InvalidArgument("rfl_martin_kernel_ball: y = z");
  const double c = std::tgamma(0.5 * n) /
                   (std::pow(2.0, s) * s * std::pow(std::tgamma(s), 2) * std::pow(pi, 0.5 * n));
  return c * std::pow((r - ay) * (r + ay), s) / (std::pow(r, s) * std::pow(dist, n));
}

inline double rfl_martin_kernel_ball(const OperatorSpec& op, double z, double y) {
  return rfl_martin_kernel_ball(op, std::span<const double>(&z, 1),
                                std::span<const double>(&y, 1));
}

/// Classical Poisson kernel (r^2 - |y|^2) / (|S^{n-1}| r |z-y|^n).
inline double poisson_kernel_classical(const DomainSpec& d, std::span<const double> z,
                                       std::span<const double> y) {
  const double r = d.radius;
  detail::require_on_boundary(d, detail::norm(z), "poisson_kernel_classical");
  const double ay = detail::norm(y);
  detail::require_inside(d, ay, "poisson_kernel_classical");
  const double dist = detail::distance(z, y);
  if (dist == 0.0) throw InvalidArgument("poisson_kernel_classical: y = z");
  return (r - ay) * (r + ay) / (sphere_area(d.dim) * r * std::pow(dist, d.dim));
}

inline double poisson_kernel_classical(const DomainSpec& d, double z, double y) {
  return poisson_kernel_classical(d, std::span<const double>(&z, 1),
                                  std::span<const double>(&y, 1));
}

// ---------------------------------------------------------------------------
// Dispatchers
// ---------------------------------------------------------------------------

/// G_0(x, y) for interval coordinates, any implemented operator.
inline double green_function(const OperatorSpec& op, double x, double y) {
  switch (op.kind) {
    case OperatorKind::SFL: return sfl_green_interval(op, x, y);
    case OperatorKind::Classical:
      if (op.domain.kind == DomainKind::Interval && op.domain.dim == 1) {
        detail::require_inside(op.domain, std::abs(x), "green_function");
        detail::require_inside(op.domain, std::abs(y), "green_function");
        return classical_green_interval(op.domain.radius, x, y);
      }
      [[fallthrough]];
    case OperatorKind::RFL: return rfl_green_ball(op, x, y);
  }
  return 0.0;
}

/// G_0(x, y) for points of R^n.
inline double green_function(const OperatorSpec& op, std::span<const double> x,
                             std::span<const double> y) {
  if (x.size() == 1 && y.size() == 1) return green_function(op, x[0], y[0]);
  return rfl_green_ball(op, x, y);
}

/// Martin kernel D_gamma G_0(z, y) for interval coordinates (z = +-r).
inline double martin_kernel(const OperatorSpec& op, double z, double y) {
  switch (op.kind) {
    case OperatorKind::SFL: return sfl_martin_kernel_interval(op, z, y);
    case OperatorKind::Classical: return poisson_kernel_classical(op.domain, z, y);
    case OperatorKind::RFL: return rfl_martin_kernel_ball(op, z, y);
  }
  return 0.0;
}

/// Spherical average of G_0(rho e, rho' w) over w in S^{n-1}: the kernel
/// acting on radial functions of the ball. For n = 1 the "sphere" is {-1, 1}.
inline double radial_green(const OperatorSpec& op, double rho, double rho2) {
  detail::require_boggio(op, "radial_green");
  const int n = op.domain.dim;
  const double r = op.domain.radius;
  if (n == 1) {
    const double a = rho == rho2 ? 0.0 : detail::boggio_green(op.s, 1, r, rho, rho2, std::abs(rho - rho2));
    return 0.5 * (a + detail::boggio_green(op.s, 1, r, rho, rho2, rho + rho2));
  }
  auto integrand = [&](double theta) {
    // |x-y|^2 = (rho-rho')^2 + 2 rho rho' (1 - cos theta), stable near theta = 0.
    const double half = std::sin(0.5 * theta);
    const double dist2 = (rho - rho2) * (rho - rho2) + 4.0 * rho * rho2 * half * half;
    if (dist2 <= 0.0) return 0.0;
    return detail::boggio_green(op.s, n, r, rho, rho2, std::sqrt(dist2)) *
           std::pow(std::sin(theta), n - 2);
  };
  const double norm_const = sphere_area(n - 1) / sphere_area(n);
  return norm_const * integrate_singular(integrand, 0.0, pi, 1e-12);
}

/// Spherical average of the Martin kernel at radius rho:
/// |S^{n-1}|^{-1} int D(z, rho w) dw = c_D r^{2-n-s} (r^2 - rho^2)^{s-1}.
inline double radial_martin_average(const OperatorSpec& op, double rho) {
  detail::require_boggio(op, "radial_martin_average");
  const int n = op.domain.dim;
  const double r = op.domain.radius, s = op.s;
  detail::require_inside(op.domain, rho, "radial_martin_average");
  const double c = std::tgamma(0.5 * n) /
                   (std::pow(2.0, s) * s * std::pow(std::tgamma(s), 2) * std::pow(pi, 0.5 * n));
  return c * std::pow(r, 2.0 - n - s) * std::pow((r - rho) * (r + rho), s - 1.0);
}

// ---------------------------------------------------------------------------
// Two-sided bound validator
// ---------------------------------------------------------------------------

struct KernelBoundReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t sample_size = 0;
  bool log_case = false;
};

using Point = std::vector<double>;

/// Ratios G_0(x,y) / (|x-y|^{2s-n} min(delta^g(x) delta^g(y) / |x-y|^{2g}, 1))
/// over the sample. When n = 2s the comparison is
/// log(1 + delta^g(x) delta^g(y) / |x-y|^{2g}) and `log_case` is set.
inline KernelBoundReport check_K1_bounds(const OperatorSpec& op,
                                         std::span<const std::pair<Point, Point>> sample) {
  if (sample.empty()) throw InvalidArgument("check_K1_bounds: empty sample");
  KernelBoundReport rep;
  rep.log_case = std::abs(2.0 * op.s - op.domain.dim) < 1e-14;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  const double g = op.gamma;
  for (const auto& [x, y] : sample) {
    const double dist = detail::distance(x, y);
    if (dist == 0.0) throw InvalidArgument("check_K1_bounds: diagonal pair in sample");
    const double dx = delta(op.domain, x), dy = delta(op.domain, y);
    const double q = std::pow(dx * dy, g) / std::pow(dist, 2.0 * g);
    const double comparison =
        rep.log_case ? std::log1p(q) : std::pow(dist, 2.0 * op.s - op.domain.dim) * std::min(q, 1.0);
    const double ratio = green_function(op, x, y) / comparison;
    rep.min_ratio = std::min(rep.min_ratio, ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.sample_size = sample.size();
  return rep;
}

}  // namespace nonlocal
