#include <random>

#include <benchmark/benchmark.h>

#include "sscl/box_qp.hpp"
#include "sscl/context.hpp"
#include "sscl/dataset.hpp"
#include "sscl/harness.hpp"
#include "sscl/sparse_solver.hpp"
#include "sscl/trainer.hpp"

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

void BM_FeatureSign(benchmark::State& state) {
  const auto k = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd X = gaussian(2 * k, k, 1);
  const Eigen::VectorXd x = gaussian(2 * k, 1, 2).col(0);
  const auto p = sscl::coding_problem(x, X, 1.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(sscl::feature_sign_search(p));
}
BENCHMARK(BM_FeatureSign)->Arg(5)->Arg(10)->Arg(30);

void BM_BoxQP(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd G = gaussian(10, n, 3);
  const sscl::BoxQP p{G.transpose() * G, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(sscl::solve_box_qp(p).objective);
}
BENCHMARK(BM_BoxQP)->Arg(50)->Arg(200)->Arg(400);

void BM_BuildIndex(benchmark::State& state) {
  const Eigen::MatrixXd pts = gaussian(state.range(0), 20, 4);
  for (auto _ : state) benchmark::DoNotOptimize(sscl::build_index(pts, 10).k);
}
BENCHMARK(BM_BuildIndex)->Arg(200)->Arg(1000);

void BM_TrainBinary(benchmark::State& state) {
  const auto data = sscl::gen_synthetic(sscl::SyntheticKind::two_gauss, state.range(0), 10, 42, 4.0);
  Eigen::VectorXd y(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) y(i) = data.labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
  const sscl::Hyperparams h;
  for (auto _ : state) benchmark::DoNotOptimize(sscl::train_binary(data, y, h).w);
}
BENCHMARK(BM_TrainBinary)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
