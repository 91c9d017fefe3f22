#include "sscl/context.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sscl/error.hpp"
#include "sscl/parallel.hpp"

namespace sscl {

namespace {

struct Candidate {
  double dist2;
  Eigen::Index id;
  bool operator<(const Candidate& o) const noexcept {
    return dist2 < o.dist2 || (dist2 == o.dist2 && id < o.id);
  }
};

// k smallest (distance, index) pairs; `skip` < 0 disables self-exclusion.
std::vector<Candidate> nearest(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& x,
                               Eigen::Index k, Eigen::Index skip) {
  std::vector<Candidate> all;
  all.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index j = 0; j < points.rows(); ++j) {
    if (j == skip) continue;
    all.push_back({(points.row(j) - x).squaredNorm(), j});
  }
  const auto kk = static_cast<std::ptrdiff_t>(k);
  std::partial_sort(all.begin(), all.begin() + kk, all.end());
  all.resize(static_cast<std::size_t>(k));
  return all;
}

}  // namespace

ContextIndex build_index(const Eigen::MatrixXd& points, Eigen::Index k, int jobs) {
  const auto n = points.rows();
  if (k < 1 || k > n - 1) {
    throw InvalidArgument("k must satisfy 1 <= k <= n-1 (k=" + std::to_string(k) +
                          ", n=" + std::to_string(n) + ")");
  }
  ContextIndex index;
  index.k = k;
  index.neighbor_ids.resize(static_cast<std::size_t>(n));
  index.distances.resize(static_cast<std::size_t>(n));
  index.context_mats.resize(static_cast<std::size_t>(n));

  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    const auto found = nearest(points, points.row(static_cast<Eigen::Index>(i)), k,
                               static_cast<Eigen::Index>(i));
    auto& ids = index.neighbor_ids[i];
    auto& dists = index.distances[i];
    auto& mat = index.context_mats[i];
    mat.resize(points.cols(), k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& c = found[static_cast<std::size_t>(j)];
      ids.push_back(c.id);
      dists.push_back(std::sqrt(c.dist2));
      mat.col(j) = points.row(c.id).transpose();
    }
  });
  return index;
}

ContextIndex build_index(const Dataset& train, Eigen::Index k, int jobs) {
  return build_index(train.features, k, jobs);
}

ContextQuery query_context(const Eigen::MatrixXd& points, const Eigen::VectorXd& x,
                           Eigen::Index k) {
  if (x.size() != points.cols()) {
    throw InvalidArgument("query has dimension " + std::to_string(x.size()) + ", index has " +
                          std::to_string(points.cols()));
  }
  if (k < 1 || k > points.rows()) {
    throw InvalidArgument("k must satisfy 1 <= k <= n (k=" + std::to_string(k) +
                          ", n=" + std::to_string(points.rows()) + ")");
  }
  if (!x.allFinite()) throw InvalidArgument("query contains non-finite values");
  const auto found = nearest(points, x.transpose(), k, -1);
  ContextQuery q;
  q.matrix.resize(points.cols(), k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const auto& c = found[static_cast<std::size_t>(j)];
    q.ids.push_back(c.id);
    q.distances.push_back(std::sqrt(c.dist2));
    q.matrix.col(j) = points.row(c.id).transpose();
  }
  return q;
}

}  // namespace sscl
