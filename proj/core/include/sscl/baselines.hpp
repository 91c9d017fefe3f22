#pragma once

#include <Eigen/Core>

#include "sscl/dataset.hpp"

namespace sscl {

/// Majority vote over the k Euclidean nearest training points. Vote ties go
/// to the smallest class id, distance ties to the smallest point index.
int knn_classify(const Dataset& train, const Eigen::VectorXd& x, Eigen::Index k);

/// Sparse-representation classifier: codes x over the whole training set as
/// dictionary (same coding problem as the contexts use), then picks the class
/// whose coefficients alone reconstruct x with the least residual.
class SrbcClassifier {
public:
  SrbcClassifier(const Dataset& train, double beta, double gamma);

  int classify(const Eigen::VectorXd& x) const;
  /// Per-class residuals ||x - D mask_c(v)||_2.
  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const;

private:
  Eigen::MatrixXd dictionary_;  // d x n, column j = training point j
  Eigen::MatrixXd hessian_;     // 2 beta D'D + ridge
  std::vector<int> labels_;
  int num_classes_;
  double beta_;
  double gamma_;
};

int srbc_classify(const Dataset& train, const Eigen::VectorXd& x, double beta, double gamma);

}  // namespace sscl
