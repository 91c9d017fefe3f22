#include "sscl/sparse_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "sscl/error.hpp"
#include "sscl/text_io.hpp"

namespace sscl {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double L1QuadProblem::objective(const Eigen::VectorXd& v) const {
  return 0.5 * v.dot(H * v) + c.dot(v) + gamma * v.lpNorm<1>();
}

void L1QuadProblem::validate() const {
  const auto k = size();
  if (k < 1) throw InvalidArgument("empty L1 problem");
  if (H.rows() != k || H.cols() != k) {
    throw InvalidArgument("H must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be finite and >= 0");
  if (!H.allFinite() || !c.allFinite()) throw InvalidArgument("L1 problem contains non-finite values");
  const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
    throw InvalidArgument("H is not symmetric (max asymmetry " + format_double(asym, 6) + ")");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H, Eigen::EigenvaluesOnly);
    throw InvalidArgument("H is not positive definite (min eigenvalue " +
                          format_double(eig.eigenvalues().minCoeff(), 6) + ")");
  }
}

double optimality_residual(const L1QuadProblem& p, const Eigen::VectorXd& v) {
  const Eigen::VectorXd g = p.H * v + p.c;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double r = v(j) != 0.0 ? std::abs(g(j) + p.gamma * sign_of(v(j)))
                                 : std::max(0.0, std::abs(g(j)) - p.gamma);
    worst = std::max(worst, r);
  }
  return worst;
}

Eigen::VectorXd feature_sign_search(const L1QuadProblem& p, const Eigen::VectorXd& warm_start,
                                    const FeatureSignOptions& options, FeatureSignStats* stats) {
  p.validate();
  const auto k = p.size();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(k);
  if (warm_start.size() != 0) {
    if (warm_start.size() != k) {
      throw InvalidArgument("warm start has size " + std::to_string(warm_start.size()) +
                            ", problem has " + std::to_string(k));
    }
    if (!warm_start.allFinite()) throw InvalidArgument("warm start is not finite");
    x = warm_start;
  }

  Eigen::VectorXi theta(k);
  for (Eigen::Index j = 0; j < k; ++j) theta(j) = sign_of(x(j));

  const double scale = std::max({1.0, p.c.lpNorm<Eigen::Infinity>(), p.gamma});
  const double inner_tol = 1e-3 * options.tolerance * scale;
  double fx = p.objective(x);
  if (stats) {
    stats->objective_trace.clear();
    stats->objective_trace.push_back(fx);
  }

  bool converged = false;
  bool settled = false;  // last feature-sign step made no progress
  int iter = 0;
  std::vector<Eigen::Index> active;
  active.reserve(static_cast<std::size_t>(k));

  for (; iter < options.max_iterations; ++iter) {
    const Eigen::VectorXd g = p.H * x + p.c;

    double support_violation = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
      if (x(j) != 0.0) support_violation = std::max(support_violation, std::abs(g(j) + p.gamma * theta(j)));
    }

    if (support_violation <= inner_tol || settled) {
      Eigen::Index pick = -1;
      double best = p.gamma + inner_tol;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (x(j) == 0.0 && std::abs(g(j)) > best) {
          best = std::abs(g(j));
          pick = j;
        }
      }
      if (pick < 0) {
        converged = true;
        break;
      }
      theta(pick) = g(pick) > 0.0 ? -1 : 1;
    }

    active.clear();
    for (Eigen::Index j = 0; j < k; ++j) {
      if (theta(j) != 0) active.push_back(j);
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd h_aa(m, m);
    Eigen::VectorXd rhs(m), x_a(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const auto ja = active[static_cast<std::size_t>(a)];
      for (Eigen::Index b = 0; b < m; ++b) h_aa(a, b) = p.H(ja, active[static_cast<std::size_t>(b)]);
      rhs(a) = -(p.c(ja) + p.gamma * theta(ja));
      x_a(a) = x(ja);
    }
    const Eigen::VectorXd x_new = h_aa.llt().solve(rhs);

    // Discrete line search over the segment x_a -> x_new: the end point and
    // every point where an active coefficient crosses zero.
    Eigen::VectorXd best_x = x;
    double best_f = fx;
    auto consider = [&](double t, Eigen::Index zero_at) {
      Eigen::VectorXd cand = x;
      for (Eigen::Index a = 0; a < m; ++a) {
        cand(active[static_cast<std::size_t>(a)]) = x_a(a) + t * (x_new(a) - x_a(a));
      }
      if (zero_at >= 0) cand(active[static_cast<std::size_t>(zero_at)]) = 0.0;
      const double fc = p.objective(cand);
      if (fc < best_f) {
        best_f = fc;
        best_x = std::move(cand);
      }
    };
    for (Eigen::Index a = 0; a < m; ++a) {
      if (x_a(a) != 0.0 && x_a(a) * x_new(a) <= 0.0) {
        consider(x_a(a) / (x_a(a) - x_new(a)), a);
      }
    }
    consider(1.0, -1);

    const double progress_floor = 1e-15 * std::max(1.0, std::abs(fx));
    settled = !(best_f < fx - progress_floor);
    if (best_f < fx) {
      x = std::move(best_x);
      fx = best_f;
      if (stats) stats->objective_trace.push_back(fx);
    }
    // Coefficients that landed on zero leave the active set; a guessed sign
    // that did not pan out is re-derived from the gradient next pass.
    for (Eigen::Index j = 0; j < k; ++j) theta(j) = sign_of(x(j));
  }

  const double residual = optimality_residual(p, x);
  // Rounding in H x + c grows with the size of its terms, so the acceptance
  // threshold does too.
  const double term_scale = (p.H.cwiseAbs() * x.cwiseAbs()).maxCoeff();
  const double accept = options.tolerance * std::max(scale, term_scale);
  if (stats) {
    stats->iterations = iter;
    stats->residual = residual;
  }
  if (!converged) {
    throw SolverError("feature-sign search hit the iteration cap (" +
                          std::to_string(options.max_iterations) + "), residual " +
                          format_double(residual, 6),
                      x, residual);
  }
  if (residual > accept) {
    throw SolverError("feature-sign search stalled with residual " + format_double(residual, 6),
                      x, residual);
  }
  return x;
}

double coding_ridge(const Eigen::MatrixXd& curvature) {
  if (curvature.rows() == 0) return 0.0;
  const double ridge = 1e-8 * curvature.trace() / static_cast<double>(curvature.rows());
  // An all-zero context (every neighbour at the origin) still needs a PD problem.
  return ridge > 0.0 ? ridge : 1e-12;
}

L1QuadProblem coding_problem(const Eigen::VectorXd& x, const Eigen::MatrixXd& context, double beta,
                             double gamma) {
  if (context.rows() != x.size()) {
    throw InvalidArgument("context has " + std::to_string(context.rows()) +
                          " rows, point has dimension " + std::to_string(x.size()));
  }
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  L1QuadProblem p;
  p.H = 2.0 * beta * (context.transpose() * context);
  p.H.diagonal().array() += coding_ridge(p.H);
  p.c = -2.0 * beta * (context.transpose() * x);
  p.gamma = gamma;
  return p;
}

Eigen::VectorXd code_point(const Eigen::VectorXd& x, const Eigen::MatrixXd& context, double beta,
                           double gamma, const Eigen::VectorXd& warm_start) {
  const auto p = coding_problem(x, context, beta, gamma);
  return feature_sign_search(p, warm_start);
}

double SparseCodes::column_zero_fraction(Eigen::Index i) const {
  if (V.rows() == 0) return 0.0;
  return static_cast<double>((V.col(i).array() == 0.0).count()) / static_cast<double>(V.rows());
}

double SparseCodes::zero_fraction() const {
  if (V.size() == 0) return 0.0;
  return static_cast<double>((V.array() == 0.0).count()) / static_cast<double>(V.size());
}

}  // namespace sscl
