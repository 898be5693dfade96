#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>

namespace nonlocal {

/// Precondition or configuration violation (bad radius, N too small, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not reach its tolerance.
class NumericalFailure : public std::runtime_error {
public:
  NumericalFailure(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

private:
  double residual_;
};

/// Requested lambda lies on (or within the grouping tolerance of) the
/// discrete spectrum.
class SingularLambda : public std::domain_error {
public:
  SingularLambda(double lambda, std::size_t index, double eigenvalue)
      : std::domain_error(message(lambda, index, eigenvalue)),
        lambda_(lambda), index_(index), eigenvalue_(eigenvalue) {}

  double lambda() const noexcept { return lambda_; }
  /// 1-based index of the nearest eigenvalue.
  std::size_t nearest_index() const noexcept { return index_; }
  double nearest_eigenvalue() const noexcept { return eigenvalue_; }

private:
  static std::string message(double lambda, std::size_t index, double eig) {
    std::ostringstream os;
    os.precision(17);
    os << "lambda = " << lambda << " is singular: nearest eigenvalue lambda_"
       << index << " = " << eig;
    return os.str();
  }

  double lambda_;
  std::size_t index_;
  double eigenvalue_;
};

}  // namespace nonlocal
