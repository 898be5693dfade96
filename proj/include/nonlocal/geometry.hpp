#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "nonlocal/errors.hpp"
#include "nonlocal/numerics.hpp"

namespace nonlocal {

enum class DomainKind { Interval, Ball };

inline std::string to_string(DomainKind k) {
  return k == DomainKind::Interval ? "interval" : "ball";
}

/// Interval (-r, r) or the ball B_r in R^n, centred at the origin.
///
/// The interval boundary {-r, r} carries counting measure. Ball data is
/// radial only, so ball grids and grid functions are indexed by radius.
struct DomainSpec {
  DomainKind kind = DomainKind::Interval;
  int dim = 1;
  double radius = 1.0;
};

inline DomainSpec make_domain(DomainKind kind, int n, double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw InvalidArgument("make_domain: radius must be positive");
  if (kind == DomainKind::Interval && n != 1)
    throw InvalidArgument("make_domain: an interval has dimension 1");
  if (n < 1) throw InvalidArgument("make_domain: dimension must be >= 1");
  return DomainSpec{kind, n, r};
}

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2); equals 2 for n = 1.
inline double sphere_area(int n) {
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Lebesgue measure of the domain.
inline double domain_measure(const DomainSpec& d) {
  return sphere_area(d.dim) * std::pow(d.radius, d.dim) / d.dim;
}

/// Distance to the boundary for a point given by its coordinate (interval)
/// or radius (ball).
inline double delta(const DomainSpec& d, double x) {
  const double ax = std::abs(x);
  if (ax > d.radius) throw InvalidArgument("delta: point outside the domain");
  return d.radius - ax;
}

inline double delta(const DomainSpec& d, std::span<const double> x) {
  if (static_cast<int>(x.size()) != d.dim)
    throw InvalidArgument("delta: point dimension mismatch");
  double r2 = 0.0;
  for (double c : x) r2 += c * c;
  return delta(d, std::sqrt(r2));
}

/// Composite Gauss-Legendre grid under a boundary-graded power map.
///
/// Interval: u in (-1,1) split into equal panels, x = r sgn(u)(1-(1-|u|)^beta).
/// Ball: u in (0,1), radius rho = r(1-(1-u)^beta), weights carry
/// |S^{n-1}| rho^{n-1}. `cell_lo/cell_hi` partition the domain into one cell
/// per node (images of the cumulative Gauss weights); they are used for the
/// singular diagonal of Nystrom matrices.
struct QuadGrid {
  DomainSpec domain;
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> delta;
  std::vector<double> cell_lo;
  std::vector<double> cell_hi;
  double grading = 1.0;
  std::size_t panel_order = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  double total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
  }
};

using GridPtr = std::shared_ptr<const QuadGrid>;

namespace detail {

inline std::size_t choose_panel_order(std::size_t n, bool need_even_panels) {
  for (std::size_t q = 16; q >= 1; --q) {
    if (n % q == 0 && (!need_even_panels || (n / q) % 2 == 0)) return q;
  }
  for (std::size_t q = 16; q >= 1; --q)
    if (n % q == 0) return q;
  return 1;
}

}  // namespace detail

inline GridPtr build_grid(const DomainSpec& domain, std::size_t n,
                          double grading = 2.0) {
  if (n < 8) throw InvalidArgument("build_grid: need N >= 8");
  if (!(grading >= 1.0)) throw InvalidArgument("build_grid: grading must be >= 1");

  const bool interval = domain.kind == DomainKind::Interval;
  const std::size_t q = detail::choose_panel_order(n, interval);
  const std::size_t panels = n / q;
  const auto [gx, gw] = gauss_legendre(q);
  const double r = domain.radius;
  const double u_lo = interval ? -1.0 : 0.0;
  const double width = (1.0 - u_lo) / static_cast<double>(panels);

  // Coordinate map and its Jacobian in the reference variable u.
  auto map = [&](double u) {
    const double t = std::pow(1.0 - std::abs(u), grading);
    return interval ? std::copysign(r * (1.0 - t), u) : r * (1.0 - t);
  };
  auto jac = [&](double u) {
    return r * grading * std::pow(1.0 - std::abs(u), grading - 1.0);
  };

  auto grid = std::make_shared<QuadGrid>();
  grid->domain = domain;
  grid->grading = grading;
  grid->panel_order = q;
  grid->nodes.reserve(n);
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = u_lo + width * static_cast<double>(p);
    double edge = a;
    for (std::size_t k = 0; k < q; ++k) {
      const double u = a + 0.5 * width * (gx[k] + 1.0);
      const double wu = 0.5 * width * gw[k];
      const double x = map(u);
      double w = wu * jac(u);
      if (!interval) w *= sphere_area(domain.dim) * std::pow(x, domain.dim - 1);
      grid->nodes.push_back(x);
      grid->weights.push_back(w);
      grid->delta.push_back(interval ? r - std::abs(x) : r - x);
      grid->cell_lo.push_back(map(edge));
      edge = (k + 1 == q) ? a + width : edge + wu;
      grid->cell_hi.push_back(map(edge));
    }
  }
  return grid;
}

}  // namespace nonlocal
