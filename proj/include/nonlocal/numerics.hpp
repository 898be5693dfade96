#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal {

inline constexpr double pi = boost::math::constants::pi<double>();

/// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
inline std::pair<std::vector<double>, std::vector<double>>
gauss_legendre(std::size_t q) {
  if (q == 0) throw InvalidArgument("gauss_legendre: need at least one node");
  std::vector<double> x(q), w(q);
  const std::size_t half = (q + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_q.
    double z = std::cos(pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(q) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t k = 1; k <= q; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / static_cast<double>(k);
      }
      dp = static_cast<double>(q) * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[q - 1 - i] = z;
    w[i] = w[q - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (q % 2 == 1) x[q / 2] = 0.0;
  return {x, w};
}

/// Double-exponential quadrature for integrands with endpoint singularities.
template <class F>
double integrate_singular(F&& f, double a, double b, double rel_tol = 1e-12) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  return integrator.integrate(f, a, b, rel_tol);
}

/// Polynomial extrapolation to h = 0 through (h_i, y_i) (Neville).
inline double extrapolate_to_zero(std::span<const double> h,
                                  std::span<const double> y) {
  if (h.size() != y.size() || h.empty())
    throw InvalidArgument("extrapolate_to_zero: size mismatch");
  std::vector<double> p(y.begin(), y.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      p[i] = (h[i + m] * p[i] - h[i] * p[i + 1]) / (h[i + m] - h[i]);
    }
  }
  return p[0];
}

/// Slope of the least-squares line through (x_i, y_i).
inline double least_squares_slope(std::span<const double> x,
                                  std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nonlocal
