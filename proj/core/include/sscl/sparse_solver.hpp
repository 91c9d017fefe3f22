#pragma once

#include <vector>

#include <Eigen/Core>

namespace sscl {

/// min_v  0.5 v'Hv + c'v + gamma ||v||_1   with H symmetric positive definite.
struct L1QuadProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  double gamma = 0.0;

  Eigen::Index size() const noexcept { return c.size(); }
  double objective(const Eigen::VectorXd& v) const;

  /// Shape, finiteness, symmetry (1e-9) and positive definiteness checks.
  /// Throws InvalidArgument; the PD failure message carries the measured
  /// minimum eigenvalue.
  void validate() const;
};

struct FeatureSignOptions {
  int max_iterations = 1000;
  // Max subgradient violation accepted on return, relative to
  // max(1, |c|_inf, gamma, |H||v| entries).
  double tolerance = 1e-6;
};

struct FeatureSignStats {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> objective_trace;  // objective after every accepted step
};

/// Largest violation of the subgradient optimality conditions at v:
/// |(Hv+c)_j + gamma sign(v_j)| on the support, max(0, |(Hv+c)_j| - gamma) off it.
double optimality_residual(const L1QuadProblem& p, const Eigen::VectorXd& v);

/// Feature-sign search on a general PD quadratic. Alternates between
/// guessing the sign pattern of the solution and solving the
/// equality-constrained quadratic it induces, followed by a discrete line
/// search over the zero crossings.
///
/// `warm_start` may be empty (start from zero). When several inactive
/// coordinates violate optimality equally, the lowest index is activated.
/// Throws SolverError carrying the best iterate if the iteration cap is hit
/// or the final residual exceeds the scaled `options.tolerance`.
Eigen::VectorXd feature_sign_search(const L1QuadProblem& p,
                                    const Eigen::VectorXd& warm_start = {},
                                    const FeatureSignOptions& options = {},
                                    FeatureSignStats* stats = nullptr);

/// Ridge added to assembled coding problems: 1e-8 * trace(curvature) / k.
double coding_ridge(const Eigen::MatrixXd& curvature);

/// Single-point coding problem
///   min_v beta ||x - X v||^2 + gamma ||v||_1
/// as an L1QuadProblem: H = 2 beta X'X + ridge I, c = -2 beta X'x.
L1QuadProblem coding_problem(const Eigen::VectorXd& x, const Eigen::MatrixXd& context,
                             double beta, double gamma);

Eigen::VectorXd code_point(const Eigen::VectorXd& x, const Eigen::MatrixXd& context, double beta,
                           double gamma, const Eigen::VectorXd& warm_start = {});

/// Coefficient matrix, column i = code of training point i (k x n).
struct SparseCodes {
  Eigen::MatrixXd V;

  /// Fraction of exactly-zero coefficients in column i.
  double column_zero_fraction(Eigen::Index i) const;
  /// Fraction of exactly-zero coefficients overall.
  double zero_fraction() const;
};

}  // namespace sscl
