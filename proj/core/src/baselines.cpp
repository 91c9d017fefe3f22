#include "sscl/baselines.hpp"

#include <string>

#include "sscl/context.hpp"
#include "sscl/error.hpp"
#include "sscl/sparse_solver.hpp"

namespace sscl {

int knn_classify(const Dataset& train, const Eigen::VectorXd& x, Eigen::Index k) {
  const auto ctx = query_context(train.features, x, k);
  std::vector<int> votes(static_cast<std::size_t>(train.num_classes()), 0);
  for (auto id : ctx.ids) ++votes[static_cast<std::size_t>(train.labels[static_cast<std::size_t>(id)])];
  int best = 0;
  for (int c = 1; c < train.num_classes(); ++c) {
    if (votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)]) best = c;
  }
  return best;
}

SrbcClassifier::SrbcClassifier(const Dataset& train, double beta, double gamma)
    : dictionary_(train.features.transpose()),
      labels_(train.labels),
      num_classes_(train.num_classes()),
      beta_(beta),
      gamma_(gamma) {
  if (train.num_classes() < 2) throw InvalidArgument("SRBC needs at least 2 classes");
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  hessian_ = 2.0 * beta * (dictionary_.transpose() * dictionary_);
  hessian_.diagonal().array() += coding_ridge(hessian_);
}

Eigen::VectorXd SrbcClassifier::residuals(const Eigen::VectorXd& x) const {
  if (x.size() != dictionary_.rows()) {
    throw InvalidArgument("SRBC expects dimension " + std::to_string(dictionary_.rows()));
  }
  L1QuadProblem p;
  p.H = hessian_;
  p.c = -2.0 * beta_ * (dictionary_.transpose() * x);
  p.gamma = gamma_;
  const Eigen::VectorXd v = feature_sign_search(p);

  Eigen::VectorXd res(num_classes_);
  for (int c = 0; c < num_classes_; ++c) {
    Eigen::VectorXd xhat = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      if (v(j) != 0.0 && labels_[static_cast<std::size_t>(j)] == c) xhat.noalias() += v(j) * dictionary_.col(j);
    }
    res(c) = (x - xhat).norm();
  }
  return res;
}

int SrbcClassifier::classify(const Eigen::VectorXd& x) const {
  const auto res = residuals(x);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < res.size(); ++c) {
    if (res(c) < res(best)) best = c;
  }
  return static_cast<int>(best);
}

int srbc_classify(const Dataset& train, const Eigen::VectorXd& x, double beta, double gamma) {
  return SrbcClassifier(train, beta, gamma).classify(x);
}

}  // namespace sscl
