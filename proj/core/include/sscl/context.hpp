#pragma once

#include <vector>

#include <Eigen/Core>

#include "sscl/dataset.hpp"

namespace sscl {

/// Exact k-nearest-neighbour contexts of every training point.
///
/// neighbor_ids[i] lists k training indices in ascending Euclidean distance
/// (ties by ascending index) and never contains i itself. Column j of
/// context_mats[i] is the feature vector of neighbor_ids[i][j], so each
/// context matrix is d x k.
struct ContextIndex {
  Eigen::Index k = 0;
  std::vector<std::vector<Eigen::Index>> neighbor_ids;
  std::vector<std::vector<double>> distances;
  std::vector<Eigen::MatrixXd> context_mats;

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(neighbor_ids.size()); }
};

/// Brute-force index over the rows of `points` (n x d). Requires 1 <= k <= n-1.
/// `jobs` > 1 splits the query points across threads; the result is identical.
ContextIndex build_index(const Eigen::MatrixXd& points, Eigen::Index k, int jobs = 1);
ContextIndex build_index(const Dataset& train, Eigen::Index k, int jobs = 1);

struct ContextQuery {
  Eigen::MatrixXd matrix;  // d x k
  std::vector<Eigen::Index> ids;
  std::vector<double> distances;
};

/// k nearest rows of `points` to an unseen x (nothing is excluded).
/// Requires 1 <= k <= n.
ContextQuery query_context(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                           Eigen::Index k);

}  // namespace sscl
