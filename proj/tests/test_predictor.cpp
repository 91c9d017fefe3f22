#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "sscl/error.hpp"
#include "sscl/predictor.hpp"

using namespace sscl;

namespace {

Hyperparams small_hyper(Eigen::Index k) {
  Hyperparams h;
  h.k = k;
  return h;
}

}  // namespace

TEST_CASE("argmax ties go to the lowest id") {
  CHECK(argmax_lowest(Eigen::Vector3d(0.0, 0.0, 0.0)) == 0);
  CHECK(argmax_lowest(Eigen::Vector3d(1.0, 2.0, 2.0)) == 1);
  CHECK(argmax_lowest(Eigen::Vector3d(kUntrainedScore, -5.0, kUntrainedScore)) == 1);
  CHECK_THROWS_AS(argmax_lowest(Eigen::VectorXd()), InvalidArgument);
}

TEST_CASE("training points of well separated blobs predict their own label") {
  const auto train = oracle::blobs(2, 15, 2, 6.0, 41);
  const auto m = train_ovr(train, small_hyper(3));
  for (Eigen::Index i = 0; i < train.size(); ++i) {
    const auto p = predict(m, train.features.row(i).transpose());
    CHECK(p.label == train.labels[static_cast<std::size_t>(i)]);
    CHECK(p.neighbor_ids.front() == i);  // the point itself is the closest training point
    CHECK(p.code.size() == 3);
  }
}

TEST_CASE("all-zero weights score zero everywhere and pick class 0") {
  const auto train = oracle::blobs(3, 8, 2, 3.0, 2);
  auto m = train_ovr(train, small_hyper(3));
  for (auto& c : m.classes) c.fit.w.setZero();
  const auto p = predict(m, Eigen::Vector2d(0.3, -2.0));
  CHECK(p.scores.isZero(0.0));
  CHECK(p.label == 0);
}

TEST_CASE("negating the weights of a two-class model swaps every prediction") {
  const auto train = oracle::blobs(2, 20, 3, 2.0, 7);
  const auto test = oracle::blobs(2, 10, 3, 2.0, 8);
  auto m = train_ovr(train, small_hyper(4));
  // Break the mirror symmetry so both scores cannot tie.
  m.classes[1].fit.w = -m.classes[0].fit.w;
  const auto before = predict_batch(m, test);
  for (auto& c : m.classes) c.fit.w = -c.fit.w;
  const auto after = predict_batch(m, test);
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (before[i].scores(0) == before[i].scores(1)) continue;
    CHECK(before[i].label != after[i].label);
  }
}

TEST_CASE("rescaling raw features leaves predictions unchanged") {
  const auto train = oracle::blobs(3, 12, 3, 3.0, 12);
  const auto test = oracle::blobs(3, 6, 3, 3.0, 13);
  auto scaled_train = train;
  auto scaled_test = test;
  const Eigen::Vector3d factor(10.0, 0.5, 3.0);
  scaled_train.features = train.features * factor.asDiagonal();
  scaled_test.features = test.features * factor.asDiagonal();
  const auto a = predict_batch(train_ovr(train, small_hyper(4)), test);
  const auto b = predict_batch(train_ovr(scaled_train, small_hyper(4)), scaled_test);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].label == b[i].label);
}

TEST_CASE("batch prediction is independent of the job count and checks dimensions") {
  const auto train = oracle::blobs(2, 15, 2, 2.0, 3);
  const auto test = oracle::blobs(2, 25, 2, 2.0, 4);
  const auto m = train_ovr(train, small_hyper(3));
  const auto one = predict_batch(m, test, 1);
  const auto four = predict_batch(m, test, 4);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].label == four[i].label);
    CHECK(one[i].scores == four[i].scores);
  }
  CHECK_THROWS_AS(predict(m, Eigen::Vector3d::Zero()), InvalidArgument);
  CHECK_THROWS_AS(predict(m, Eigen::Vector2d(std::nan(""), 0.0)), InvalidArgument);

  std::ostringstream out;
  write_predictions_csv(out, m, test, one, true);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header == "index,true_label,predicted,score_0,score_1");
}
