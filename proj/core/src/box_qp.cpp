#include "sscl/box_qp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "sscl/error.hpp"
#include "sscl/log.hpp"
#include "sscl/text_io.hpp"

#include <spdlog/spdlog.h>

namespace sscl {

double BoxQP::objective(const Eigen::VectorXd& delta) const {
  return -0.5 * delta.dot(Q * delta) + delta.sum();
}

void BoxQP::validate(bool check_psd) const {
  if (Q.rows() != Q.cols() || Q.rows() == 0) throw InvalidArgument("Q must be square and non-empty");
  if (!Q.allFinite()) throw InvalidArgument("Q contains NaN or infinite entries");
  if (!(upper > 0.0) || !std::isfinite(upper)) throw InvalidArgument("box bound must be finite and > 0");
  const double scale = std::max(1.0, Q.cwiseAbs().maxCoeff());
  const double asym = (Q - Q.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale) {
    throw InvalidArgument("Q is not symmetric (max asymmetry " + format_double(asym, 6) + ")");
  }
  if (check_psd) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Q);
    const double min_pivot = ldlt.vectorD().minCoeff();
    if (min_pivot < -1e-8 * scale) {
      throw InvalidArgument("Q is not positive semidefinite (pivot " + format_double(min_pivot, 6) + ")");
    }
  }
}

double kkt_violation(const BoxQP& p, const Eigen::VectorXd& delta) {
  const Eigen::VectorXd g = Eigen::VectorXd::Ones(delta.size()) - p.Q * delta;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < delta.size(); ++i) {
    double v = 0.0;
    if (delta(i) <= 0.0) v = std::max(0.0, g(i));
    else if (delta(i) >= p.upper) v = std::max(0.0, -g(i));
    else v = std::abs(g(i));
    worst = std::max(worst, v);
  }
  return worst;
}

DualState solve_box_qp(const BoxQP& p, const Eigen::VectorXd& warm_start,
                       const BoxQPOptions& options, std::vector<double>* sweep_objectives) {
  p.validate(options.check_psd);
  const auto n = p.size();
  const double upper = p.upper;

  DualState state;
  state.delta = Eigen::VectorXd::Zero(n);
  if (warm_start.size() != 0) {
    if (warm_start.size() != n) throw InvalidArgument("warm start size does not match Q");
    if (!warm_start.allFinite()) throw InvalidArgument("warm start contains NaN");
    state.delta = warm_start.cwiseMax(0.0).cwiseMin(upper);
  }
  auto& delta = state.delta;

  Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - p.Q * delta;
  if (sweep_objectives) {
    sweep_objectives->clear();
    sweep_objectives->push_back(p.objective(delta));
  }

  state.kkt_violation = kkt_violation(p, delta);
  while (state.kkt_violation > options.tolerance && state.sweeps < options.max_sweeps) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double qii = p.Q(i, i);
      double next = 0.0;
      if (qii <= options.degenerate_diagonal) {
        next = grad(i) > 0.0 ? upper : 0.0;
      } else {
        next = std::clamp(delta(i) + grad(i) / qii, 0.0, upper);
      }
      const double step = next - delta(i);
      if (step != 0.0) {
        grad.noalias() -= step * p.Q.col(i);
        delta(i) = next;
      }
    }
    ++state.sweeps;
    // Refresh the gradient so rounding from the incremental updates never
    // accumulates into the stopping test.
    grad = Eigen::VectorXd::Ones(n) - p.Q * delta;
    if (!grad.allFinite()) throw InvalidArgument("NaN encountered in box QP sweep");
    state.kkt_violation = kkt_violation(p, delta);
    if (sweep_objectives) sweep_objectives->push_back(p.objective(delta));
  }
  state.objective = p.objective(delta);
  if (state.kkt_violation > options.tolerance) {
    logger()->warn("box QP stopped after {} sweeps with KKT violation {:.3g}", state.sweeps,
                   state.kkt_violation);
  }
  return state;
}

}  // namespace sscl
