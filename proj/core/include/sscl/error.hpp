#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sscl {

/// Bad user input: violated preconditions, invalid hyperparameters, shape
/// mismatches. The CLI maps this to exit code 2.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Unreadable or malformed data files.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A numerical solver gave up. Carries the best iterate it reached and the
/// optimality residual at that point.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, Eigen::VectorXd best, double residual)
      : std::runtime_error(what), best_(std::move(best)), residual_(residual) {}

  const Eigen::VectorXd& best_iterate() const noexcept { return best_; }
  double residual() const noexcept { return residual_; }

private:
  Eigen::VectorXd best_;
  double residual_;
};

}  // namespace sscl
