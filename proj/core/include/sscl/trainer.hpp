#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sscl/box_qp.hpp"
#include "sscl/context.hpp"
#include "sscl/dataset.hpp"
#include "sscl/sparse_solver.hpp"

namespace sscl {

/// Trade-off weights of the joint objective
///   0.5||w||^2 + alpha sum xi_i + beta sum ||x_i - X_i v_i||^2 + gamma sum ||v_i||_1
/// plus the neighbourhood size and the outer-loop stopping rule.
struct Hyperparams {
  double alpha = 1.0;   // hinge penalty, also the box bound on delta
  double beta = 1.0;    // reconstruction weight
  double gamma = 0.1;   // sparsity weight
  Eigen::Index k = 10;  // neighbours per context
  int max_outer = 30;
  double tol = 1e-5;    // relative change of the primal objective

  /// alpha <= sqrt(2 beta): since every delta_i <= alpha, this keeps the
  /// V-step curvature (2 beta - delta_i^2) X_i'X_i from going negative.
  bool satisfies_convexity_guard() const noexcept;

  /// Throws InvalidArgument naming the violated rule.
  void validate() const;

  std::string describe() const;
};

/// Everything about a training set that does not change during the
/// alternation: the standardized points with their contexts plus the per-point
/// products X_i'X_i and X_i'x_i.
struct TrainingProblem {
  Eigen::MatrixXd points;  // n x d
  ContextIndex contexts;
  std::vector<Eigen::MatrixXd> grams;
  std::vector<Eigen::VectorXd> projections;

  static TrainingProblem build(const Eigen::MatrixXd& points, Eigen::Index k, int jobs = 1);

  Eigen::Index size() const noexcept { return points.rows(); }
  Eigen::Index dim() const noexcept { return points.cols(); }
  Eigen::Index k() const noexcept { return contexts.k; }
};

/// Current iterate of the alternation. `w` must equal
/// sum_i delta_i y_i X_i v_i (see compute_w).
struct AlternationState {
  Eigen::VectorXd delta;  // n
  Eigen::MatrixXd V;      // k x n
  Eigen::VectorXd w;      // d
};

/// Reconstruction X_i v_i of point i.
Eigen::VectorXd reconstruction(const TrainingProblem& problem, const Eigen::MatrixXd& V,
                               Eigen::Index i);

/// w = sum_i delta_i y_i X_i v_i; points with delta_i = 0 contribute nothing.
Eigen::VectorXd compute_w(const Eigen::VectorXd& delta, const Eigen::VectorXd& signs,
                          const TrainingProblem& problem, const Eigen::MatrixXd& V);

/// The v_i-dependent part of the saddle objective for fixed delta:
///   H = (2 beta - delta_i^2) X_i'X_i + ridge I
///   c = -2 beta X_i'x_i - delta_i y_i X_i'u_i,   u_i = w - delta_i y_i X_i v_i
/// The ridge is 1e-8 trace(2 beta X_i'X_i)/k. Throws InvalidArgument if
/// delta_i^2 exceeds 2 beta beyond rounding.
L1QuadProblem assemble_vstep(Eigen::Index i, const TrainingProblem& problem,
                             const Eigen::VectorXd& signs, const AlternationState& state,
                             const Hyperparams& h);

/// Q_ij = y_i y_j (X_i v_i)'(X_j v_j) with box bound alpha.
BoxQP assemble_delta_step(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                          const Eigen::MatrixXd& V, const Hyperparams& h);

/// 0.5||w||^2 + alpha sum xi_i + beta sum ||x_i - X_i v_i||^2 + gamma sum ||v_i||_1,
/// xi_i = max(0, 1 - y_i w'X_i v_i).
double primal_objective(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                        const Eigen::MatrixXd& V, const Eigen::VectorXd& w, const Hyperparams& h);

/// Saddle objective for fixed (delta, V), with w = sum delta_i y_i X_i v_i:
///   -0.5||w||^2 + beta sum ||x_i - X_i v_i||^2 + gamma sum ||v_i||_1 + sum delta_i
double saddle_objective(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                        const AlternationState& state, const Hyperparams& h);

/// The quantity each V-sweep minimizes: the saddle objective plus the ridge
/// terms 0.5 ridge_i ||v_i||^2 that the assembled subproblems carry.
double vstep_objective(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                       const AlternationState& state, const Hyperparams& h);

struct TrainDiagnostics {
  Eigen::VectorXd slacks;                 // xi_i >= 0
  Eigen::VectorXd reconstruction_errors;  // ||x_i - X_i v_i||^2
  Eigen::VectorXd zero_fractions;         // per-point code sparsity
};

TrainDiagnostics diagnose(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                          const Eigen::MatrixXd& V, const Eigen::VectorXd& w);

struct IterationRecord {
  double vstep_before = 0.0;
  double vstep_after = 0.0;
  double dual_before = 0.0;
  double dual_after = 0.0;
  double saddle = 0.0;
  double primal = 0.0;
  int qp_sweeps = 0;
};

enum class StopReason {
  converged,      // relative primal change below tol
  cycle,          // primal repeats the value from two iterations back
  max_outer,
  solver_failure, // a V-step subproblem could not be solved; see stop_detail
};

std::string_view to_string(StopReason reason);

/// The returned (w, delta, codes) is the iterate with the lowest primal
/// objective seen, which is not necessarily the last one.
struct BinaryModel {
  Eigen::VectorXd w;
  DualState delta;
  SparseCodes codes;
  Hyperparams hyper;
  std::vector<double> objective_trace;  // primal after init, then after every outer iteration
  std::vector<IterationRecord> iterations;
  int monotonicity_violations = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::max_outer;
  std::string stop_detail;
  int best_iteration = 0;  // index into objective_trace of the returned iterate
};

struct TrainOptions {
  /// Observes every assembled V-step subproblem (point index, problem).
  std::function<void(Eigen::Index, const L1QuadProblem&)> on_vstep_problem;
  /// Relative slack allowed when auditing per-iteration monotonicity.
  double monotonicity_slack = 1e-9;
  int jobs = 1;  // used by train_ovr across classes
};

/// Alternating minimization for one +1/-1 labelling: initial codes from the
/// unsupervised coding problem with delta = 0, then repeated rounds of a
/// Gauss-Seidel V sweep (ascending i, warm-started), the box-QP delta step
/// and w recovery, until the relative primal change drops below h.tol or
/// h.max_outer rounds have run.
///
/// For fixed delta the V objective is convex per point but not jointly, so
/// on hard data the rounds can settle into a two-cycle or run off to huge
/// codes. A two-cycle ends the run, and so does a V-step solver failure
/// after the initial coding sweep; either way the lowest-primal iterate is
/// returned.
BinaryModel train_binary(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                         const Hyperparams& h, const TrainOptions& options = {});

/// Convenience overload: builds the contexts from already-preprocessed points.
BinaryModel train_binary(const Dataset& train, const Eigen::VectorXd& signs, const Hyperparams& h,
                         const TrainOptions& options = {});

/// One-vs-rest wrapper over train_binary.
struct ClassModel {
  BinaryModel fit;          // in-memory detail; only fit.w survives a model file
  Eigen::Index positives = 0;
  bool trained = false;     // false when the class has no training points
  bool flagged = false;     // fewer than 2 positive training points
};

struct Model {
  Hyperparams hyper;
  std::vector<std::string> class_names;
  std::vector<ClassModel> classes;
  Preprocessor preprocessor;
  Eigen::MatrixXd train_points;  // preprocessed, n x d
  std::vector<int> train_labels;

  Eigen::Index dim() const noexcept { return train_points.cols(); }
  int num_classes() const noexcept { return static_cast<int>(class_names.size()); }
  /// Mean zero fraction of the training codes over trained classes.
  double code_zero_fraction() const;
};

/// Fits the preprocessor on `train`, builds one shared context index and
/// trains class c against the rest for every class. Requires at least two
/// classes present in `train`.
Model train_ovr(const Dataset& train, const Hyperparams& h, const TrainOptions& options = {});

}  // namespace sscl
