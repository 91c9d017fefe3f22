#pragma once

#include <vector>

#include <Eigen/Core>

namespace sscl {

/// max_delta  -0.5 delta'Q delta + 1'delta   s.t. 0 <= delta_i <= upper.
///
/// For the trainer, Q_ij = y_i y_j (X_i v_i)'(X_j v_j): the Gram matrix of the
/// label-signed reconstructions, hence PSD.
struct BoxQP {
  Eigen::MatrixXd Q;
  double upper = 1.0;

  Eigen::Index size() const noexcept { return Q.rows(); }
  double objective(const Eigen::VectorXd& delta) const;
  /// Throws InvalidArgument on non-square/asymmetric (1e-9) Q, non-finite
  /// entries or a non-positive bound; with `check_psd` also rejects Q whose
  /// pivoted LDL' factor has a pivot below -1e-8 (relative).
  void validate(bool check_psd = true) const;
};

/// Box multipliers. The hinge multipliers epsilon_i = upper - delta_i are
/// implicit.
struct DualState {
  Eigen::VectorXd delta;
  double objective = 0.0;
  double kkt_violation = 0.0;
  int sweeps = 0;
};

struct BoxQPOptions {
  int max_sweeps = 10000;
  double tolerance = 1e-6;
  double degenerate_diagonal = 1e-12;
  bool check_psd = true;
};

/// Largest KKT violation at delta (gradient g = 1 - Q delta):
/// interior |g_i|, at zero max(0, g_i), at the bound max(0, -g_i).
double kkt_violation(const BoxQP& p, const Eigen::VectorXd& delta);

/// Cyclic exact coordinate ascent with clipping, coordinates 0..n-1 per
/// sweep. A coordinate with Q_ii <= degenerate_diagonal has a linear
/// objective and goes to whichever bound its gradient favours. Stops once the
/// KKT violation is within tolerance or after max_sweeps. The warm start is
/// clipped into the box. If `sweep_objectives` is given it receives the
/// objective before the first sweep and after every sweep.
DualState solve_box_qp(const BoxQP& p, const Eigen::VectorXd& warm_start = {},
                       const BoxQPOptions& options = {},
                       std::vector<double>* sweep_objectives = nullptr);

}  // namespace sscl
