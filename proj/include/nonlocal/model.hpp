#pragma once

#include "nonlocal/discretize.hpp"
#include "nonlocal/spectral.hpp"

namespace nonlocal {

/// Operator, grid, Nystrom matrix and its spectrum, built together.
struct DiscreteModel {
  OperatorSpec op;
  GridPtr grid;
  DiscreteKernel kernel;
  SpectralData spectrum;
};

inline DiscreteModel build_model(const OperatorSpec& op, std::size_t n, double grading = 2.0,
                                 double mult_tol = 1e-6) {
  GridPtr grid = build_grid(op.domain, n, grading);
  DiscreteKernel dk = assemble_green_matrix(op, grid);
  SpectralData sd = eigendecompose(dk, mult_tol);
  return DiscreteModel{op, grid, std::move(dk), std::move(sd)};
}

}  // namespace nonlocal
