#include "sscl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "sscl/error.hpp"
#include "sscl/log.hpp"
#include "sscl/parallel.hpp"
#include "sscl/text_io.hpp"

namespace sscl {

bool Hyperparams::satisfies_convexity_guard() const noexcept {
  return alpha <= std::sqrt(2.0 * beta);
}

void Hyperparams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be finite and > 0");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("beta must be finite and > 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be finite and >= 0");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (max_outer < 1) throw InvalidArgument("max_outer must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");
  if (!satisfies_convexity_guard()) {
    throw InvalidArgument("convexity guard violated: alpha <= sqrt(2*beta) is required (alpha=" +
                          format_double(alpha, 6) + ", sqrt(2*beta)=" +
                          format_double(std::sqrt(2.0 * beta), 6) + ")");
  }
}

std::string Hyperparams::describe() const {
  std::ostringstream out;
  out << "alpha=" << format_double(alpha) << " beta=" << format_double(beta)
      << " gamma=" << format_double(gamma) << " k=" << k << " max_outer=" << max_outer
      << " tol=" << format_double(tol);
  return out.str();
}

TrainingProblem TrainingProblem::build(const Eigen::MatrixXd& points, Eigen::Index k, int jobs) {
  TrainingProblem p;
  p.points = points;
  p.contexts = build_index(points, k, jobs);
  const auto n = points.rows();
  p.grams.resize(static_cast<std::size_t>(n));
  p.projections.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& X = p.contexts.context_mats[static_cast<std::size_t>(i)];
    p.grams[static_cast<std::size_t>(i)] = X.transpose() * X;
    p.projections[static_cast<std::size_t>(i)] = X.transpose() * points.row(i).transpose();
  }
  return p;
}

Eigen::VectorXd reconstruction(const TrainingProblem& problem, const Eigen::MatrixXd& V,
                               Eigen::Index i) {
  return problem.contexts.context_mats[static_cast<std::size_t>(i)] * V.col(i);
}

Eigen::VectorXd compute_w(const Eigen::VectorXd& delta, const Eigen::VectorXd& signs,
                          const TrainingProblem& problem, const Eigen::MatrixXd& V) {
  const auto n = problem.size();
  if (delta.size() != n || signs.size() != n || V.cols() != n || V.rows() != problem.k()) {
    throw InvalidArgument("compute_w: inconsistent shapes");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Zero(problem.dim());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (delta(i) == 0.0) continue;
    w.noalias() += (delta(i) * signs(i)) * reconstruction(problem, V, i);
  }
  return w;
}

namespace {

double vstep_ridge(const TrainingProblem& problem, Eigen::Index i, double beta) {
  return coding_ridge(2.0 * beta * problem.grams[static_cast<std::size_t>(i)]);
}

void check_signs(const Eigen::VectorXd& signs, Eigen::Index n) {
  if (signs.size() != n) throw InvalidArgument("label vector length does not match the data");
  bool pos = false, neg = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (signs(i) == 1.0) pos = true;
    else if (signs(i) == -1.0) neg = true;
    else throw InvalidArgument("binary labels must be +1 or -1");
  }
  if (!pos || !neg) throw InvalidArgument("both classes required");
}

}  // namespace

L1QuadProblem assemble_vstep(Eigen::Index i, const TrainingProblem& problem,
                             const Eigen::VectorXd& signs, const AlternationState& state,
                             const Hyperparams& h) {
  const double di = state.delta(i);
  const double yi = signs(i);
  const double curvature = 2.0 * h.beta - di * di;
  if (curvature < -1e-12 * 2.0 * h.beta) {
    throw InvalidArgument("V-step for point " + std::to_string(i) +
                          " is not convex: delta_i^2 > 2*beta (alpha <= sqrt(2*beta) is required)");
  }
  const auto& gram = problem.grams[static_cast<std::size_t>(i)];
  const auto& X = problem.contexts.context_mats[static_cast<std::size_t>(i)];

  L1QuadProblem p;
  p.H = std::max(curvature, 0.0) * gram;
  p.H.diagonal().array() += vstep_ridge(problem, i, h.beta);
  p.c = -2.0 * h.beta * problem.projections[static_cast<std::size_t>(i)];
  if (di != 0.0) {
    const Eigen::VectorXd u = state.w - (di * yi) * (X * state.V.col(i));
    p.c.noalias() -= (di * yi) * (X.transpose() * u);
  }
  p.gamma = h.gamma;
  return p;
}

BoxQP assemble_delta_step(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                          const Eigen::MatrixXd& V, const Hyperparams& h) {
  const auto n = problem.size();
  Eigen::MatrixXd Z(problem.dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) Z.col(i) = signs(i) * reconstruction(problem, V, i);
  BoxQP qp;
  qp.Q.resize(n, n);
  qp.Q.triangularView<Eigen::Lower>() = Z.transpose() * Z;
  qp.Q.triangularView<Eigen::StrictlyUpper>() = qp.Q.transpose();
  qp.upper = h.alpha;
  return qp;
}

double primal_objective(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                        const Eigen::MatrixXd& V, const Eigen::VectorXd& w, const Hyperparams& h) {
  double hinge = 0.0, recon = 0.0, l1 = 0.0;
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    const Eigen::VectorXd xhat = reconstruction(problem, V, i);
    hinge += std::max(0.0, 1.0 - signs(i) * w.dot(xhat));
    recon += (problem.points.row(i).transpose() - xhat).squaredNorm();
    l1 += V.col(i).lpNorm<1>();
  }
  return 0.5 * w.squaredNorm() + h.alpha * hinge + h.beta * recon + h.gamma * l1;
}

double saddle_objective(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                        const AlternationState& state, const Hyperparams& h) {
  const Eigen::VectorXd w = compute_w(state.delta, signs, problem, state.V);
  double recon = 0.0, l1 = 0.0;
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    recon += (problem.points.row(i).transpose() - reconstruction(problem, state.V, i)).squaredNorm();
    l1 += state.V.col(i).lpNorm<1>();
  }
  return -0.5 * w.squaredNorm() + h.beta * recon + h.gamma * l1 + state.delta.sum();
}

double vstep_objective(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                       const AlternationState& state, const Hyperparams& h) {
  double ridge_terms = 0.0;
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    ridge_terms += 0.5 * vstep_ridge(problem, i, h.beta) * state.V.col(i).squaredNorm();
  }
  return saddle_objective(problem, signs, state, h) + ridge_terms;
}

TrainDiagnostics diagnose(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                          const Eigen::MatrixXd& V, const Eigen::VectorXd& w) {
  const auto n = problem.size();
  TrainDiagnostics d;
  d.slacks.resize(n);
  d.reconstruction_errors.resize(n);
  d.zero_fractions.resize(n);
  const SparseCodes codes{V};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xhat = reconstruction(problem, V, i);
    d.slacks(i) = std::max(0.0, 1.0 - signs(i) * w.dot(xhat));
    d.reconstruction_errors(i) = (problem.points.row(i).transpose() - xhat).squaredNorm();
    d.zero_fractions(i) = codes.column_zero_fraction(i);
  }
  return d;
}

namespace {

bool increased(double before, double after, double slack) {
  return after > before + slack * std::max(1.0, std::abs(before));
}

void vstep_sweep(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                 AlternationState& state, const Hyperparams& h, const TrainOptions& options,
                 int outer) {
  for (Eigen::Index i = 0; i < problem.size(); ++i) {
    const auto p = assemble_vstep(i, problem, signs, state, h);
    if (options.on_vstep_problem) options.on_vstep_problem(i, p);
    Eigen::VectorXd v_new;
    try {
      v_new = feature_sign_search(p, state.V.col(i));
    } catch (const SolverError& e) {
      throw SolverError("outer iteration " + std::to_string(outer) + ", point " +
                            std::to_string(i) + ": " + e.what(),
                        e.best_iterate(), e.residual());
    }
    const double di = state.delta(i);
    if (di != 0.0) {
      const auto& X = problem.contexts.context_mats[static_cast<std::size_t>(i)];
      state.w.noalias() += (di * signs(i)) * (X * (v_new - state.V.col(i)));
    }
    state.V.col(i) = v_new;
  }
  state.w = compute_w(state.delta, signs, problem, state.V);
}

}  // namespace

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::converged: return "converged";
    case StopReason::cycle: return "cycle";
    case StopReason::max_outer: return "max_outer";
    case StopReason::solver_failure: return "solver_failure";
  }
  return "?";
}

BinaryModel train_binary(const TrainingProblem& problem, const Eigen::VectorXd& signs,
                         const Hyperparams& h, const TrainOptions& options) {
  h.validate();
  const auto n = problem.size();
  check_signs(signs, n);
  if (problem.k() != h.k) throw InvalidArgument("training contexts were built with a different k");

  AlternationState state;
  state.delta = Eigen::VectorXd::Zero(n);
  state.V = Eigen::MatrixXd::Zero(problem.k(), n);
  state.w = Eigen::VectorXd::Zero(problem.dim());

  // delta = 0 reduces every V-step to plain coding of x_i over its context.
  vstep_sweep(problem, signs, state, h, options, 0);

  BinaryModel model;
  model.hyper = h;
  double previous = primal_objective(problem, signs, state.V, state.w, h);
  model.objective_trace.push_back(previous);
  model.delta.delta = state.delta;

  AlternationState best = state;
  DualState best_dual = model.delta;
  double best_primal = previous;

  auto relative_change = [](double a, double b) {
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
  };

  for (int outer = 1; outer <= h.max_outer; ++outer) {
    IterationRecord rec;
    rec.vstep_before = vstep_objective(problem, signs, state, h);
    try {
      vstep_sweep(problem, signs, state, h, options, outer);
    } catch (const SolverError& e) {
      model.stop_reason = StopReason::solver_failure;
      model.stop_detail = e.what();
      logger()->warn("stopping early, keeping the best iterate: {}", e.what());
      break;
    }
    rec.vstep_after = vstep_objective(problem, signs, state, h);
    if (increased(rec.vstep_before, rec.vstep_after, options.monotonicity_slack)) {
      ++model.monotonicity_violations;
      logger()->warn("V-sweep {} raised its objective: {:.17g} -> {:.17g}", outer,
                     rec.vstep_before, rec.vstep_after);
    }

    const auto qp = assemble_delta_step(problem, signs, state.V, h);
    rec.dual_before = qp.objective(state.delta);
    BoxQPOptions qp_options;
    qp_options.check_psd = false;  // Gram matrix by construction
    auto dual = solve_box_qp(qp, state.delta, qp_options);
    rec.dual_after = dual.objective;
    rec.qp_sweeps = dual.sweeps;
    if (rec.dual_after < rec.dual_before - options.monotonicity_slack * std::max(1.0, std::abs(rec.dual_before))) {
      ++model.monotonicity_violations;
      logger()->warn("delta step {} lowered the dual: {:.17g} -> {:.17g}", outer, rec.dual_before,
                     rec.dual_after);
    }
    state.delta = dual.delta;
    state.w = compute_w(state.delta, signs, problem, state.V);

    rec.saddle = saddle_objective(problem, signs, state, h);
    rec.primal = primal_objective(problem, signs, state.V, state.w, h);
    model.iterations.push_back(rec);
    model.objective_trace.push_back(rec.primal);
    logger()->debug("outer {}: primal {:.10g} saddle {:.10g} qp sweeps {}", outer, rec.primal,
                    rec.saddle, rec.qp_sweeps);

    if (rec.primal < best_primal) {
      best_primal = rec.primal;
      best = state;
      best_dual = std::move(dual);
      model.best_iteration = outer;
    }

    const auto& trace = model.objective_trace;
    if (relative_change(rec.primal, previous) < h.tol) {
      model.converged = true;
      model.stop_reason = StopReason::converged;
      break;
    }
    if (trace.size() >= 3 && relative_change(rec.primal, trace[trace.size() - 3]) < h.tol) {
      model.stop_reason = StopReason::cycle;
      logger()->info("alternation settled into a two-cycle at iteration {}", outer);
      break;
    }
    previous = rec.primal;
  }

  model.delta = std::move(best_dual);
  model.w = std::move(best.w);
  model.codes.V = std::move(best.V);
  return model;
}

BinaryModel train_binary(const Dataset& train, const Eigen::VectorXd& signs, const Hyperparams& h,
                         const TrainOptions& options) {
  h.validate();
  train.validate();
  check_signs(signs, train.size());
  const auto problem = TrainingProblem::build(train.features, h.k, options.jobs);
  return train_binary(problem, signs, h, options);
}

double Model::code_zero_fraction() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& c : classes) {
    if (!c.trained || c.fit.codes.V.size() == 0) continue;
    sum += c.fit.codes.zero_fraction();
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

Model train_ovr(const Dataset& train, const Hyperparams& h, const TrainOptions& options) {
  h.validate();
  train.validate();
  const auto counts = train.class_counts();
  const auto present = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; });
  if (train.num_classes() < 2 || present < 2) {
    throw InvalidArgument("at least 2 classes are required for training");
  }

  Model model;
  model.hyper = h;
  model.class_names = train.class_names;
  model.preprocessor = Preprocessor::fit(train);
  const auto prepared = model.preprocessor.apply(train);
  model.train_points = prepared.features;
  model.train_labels = prepared.labels;

  const auto problem = TrainingProblem::build(prepared.features, h.k, options.jobs);
  const auto C = static_cast<std::size_t>(train.num_classes());
  model.classes.resize(C);

  parallel_for(C, options.jobs, [&](std::size_t c) {
    auto& cm = model.classes[c];
    cm.positives = counts[c];
    if (cm.positives == 0) return;
    cm.flagged = cm.positives < 2;
    Eigen::VectorXd signs(train.size());
    for (Eigen::Index i = 0; i < train.size(); ++i) {
      signs(i) = prepared.labels[static_cast<std::size_t>(i)] == static_cast<int>(c) ? 1.0 : -1.0;
    }
    TrainOptions inner = options;
    inner.jobs = 1;
    cm.fit = train_binary(problem, signs, h, inner);
    cm.trained = true;
  });

  for (std::size_t c = 0; c < C; ++c) {
    if (model.classes[c].flagged) {
      logger()->warn("class '{}' has only {} training point(s); its model is unreliable",
                     model.class_names[c], model.classes[c].positives);
    } else if (!model.classes[c].trained) {
      logger()->info("class '{}' is absent from the training data; it is never predicted",
                     model.class_names[c]);
    }
  }
  return model;
}

}  // namespace sscl
