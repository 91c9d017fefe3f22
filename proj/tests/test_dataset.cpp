#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "sscl/dataset.hpp"
#include "sscl/error.hpp"

using namespace sscl;

namespace {

Dataset parse(const std::string& text, CsvOptions options = {}) {
  std::istringstream in(text);
  return parse_csv(in, options);
}

}  // namespace

TEST_CASE("missing cell is imputed with the observed column mean") {
  const auto data = parse("1,0.5,2\n2,?,4\n1,1.5,6\n");
  REQUIRE(data.size() == 3);
  REQUIRE(data.dim() == 2);
  CHECK(data.features(1, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(data.has_missing());
  CHECK(data.missing(1, 0));
  CHECK_FALSE(data.missing(0, 0));
}

TEST_CASE("labels map to dense ids in first-appearance order") {
  const auto data = parse("b,1\na,2\nb,3\nc,4\n");
  CHECK(data.class_names == std::vector<std::string>{"b", "a", "c"});
  CHECK(data.labels == std::vector<int>{0, 1, 0, 2});
}

TEST_CASE("header, comments and last-column labels") {
  const auto data = parse("# generated\nf1,f2,label\n1,2,x\n3,4,y\n",
                          {.has_header = true, .label_column = LabelColumn::last});
  CHECK(data.size() == 2);
  CHECK(data.features(1, 1) == 4.0);
  CHECK(data.class_names == std::vector<std::string>{"x", "y"});
}

TEST_CASE("csv errors") {
  CHECK_THROWS_WITH_AS(parse(""), "no rows", DataError);
  CHECK_THROWS_AS(parse("1,2,3\n1,2\n"), DataError);
  CHECK_THROWS_AS(parse("1,?\n2,?\n"), DataError);  // column entirely missing
  CHECK_THROWS_AS(parse("1,abc\n"), DataError);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), DataError);
}

TEST_CASE("two-gauss with a huge separation is separable at zero") {
  const auto data = gen_synthetic(SyntheticKind::two_gauss, 4, 1, 7, 100.0);
  double min_pos = 1e300, max_neg = -1e300;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (data.labels[static_cast<std::size_t>(i)] == 1) min_pos = std::min(min_pos, data.features(i, 0));
    else max_neg = std::max(max_neg, data.features(i, 0));
  }
  CHECK(max_neg < 0.0);
  CHECK(min_pos > 0.0);
  CHECK(min_pos > max_neg);
}

TEST_CASE("generator is deterministic and checks its preconditions") {
  const auto a = gen_synthetic(SyntheticKind::two_gauss, 40, 3, 11, 2.0);
  const auto b = gen_synthetic(SyntheticKind::two_gauss, 40, 3, 11, 2.0);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.class_counts() == std::vector<Eigen::Index>{20, 20});
  CHECK_THROWS_AS(gen_synthetic(SyntheticKind::two_gauss, 3, 1, 7, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gen_synthetic(SyntheticKind::xor_ring, 8, 1, 7, 1.0), InvalidArgument);
  CHECK_THROWS_AS(parse_synthetic_kind("moons"), InvalidArgument);

  const auto x = gen_synthetic(SyntheticKind::xor_ring, 400, 2, 5, 6.0);
  int agree = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const bool same_sign = x.features(i, 0) * x.features(i, 1) > 0;
    agree += (same_sign == (x.labels[static_cast<std::size_t>(i)] == 0)) ? 1 : 0;
  }
  CHECK(agree > 390);  // xor rule holds except for rare far-tail samples
}

TEST_CASE("two-point z-score and the zero-variance rule") {
  Dataset d;
  d.features.resize(2, 2);
  d.features << 1, 5, 3, 5;
  d.labels = {0, 1};
  d.class_names = {"a", "b"};
  const auto s = fit_standardizer(d);
  CHECK(s.means(0) == 2.0);
  CHECK(s.stddevs(0) == 1.0);
  CHECK(s.stddevs(1) == 0.0);
  const auto z = apply_standardizer(s, d);
  CHECK(z.features(0, 0) == -1.0);
  CHECK(z.features(1, 0) == 1.0);
  CHECK(z.features(0, 1) == 0.0);
  CHECK(z.features(1, 1) == 0.0);

  Dataset wrong = d;
  wrong.features.resize(2, 3);
  CHECK_THROWS_AS(apply_standardizer(s, wrong), InvalidArgument);
}

TEST_CASE("standardizing its own fit data gives zero mean, unit stddev, and is idempotent") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Dataset d;
    d.features = Eigen::MatrixXd::Random(15 + trial, 4) * (1.0 + trial) + Eigen::MatrixXd::Constant(15 + trial, 4, 3.0 * trial);
    d.features.col(3).setConstant(7.0);
    d.labels.assign(static_cast<std::size_t>(d.size()), 0);
    d.class_names = {"only"};
    const auto z = apply_standardizer(fit_standardizer(d), d);
    const auto s = fit_standardizer(z);
    for (Eigen::Index j = 0; j < 4; ++j) {
      CHECK(std::abs(s.means(j)) < 1e-9);
      if (j < 3) CHECK(std::abs(s.stddevs(j) - 1.0) < 1e-9);
      else CHECK(s.stddevs(j) == 0.0);
    }
    const auto zz = apply_standardizer(s, z);
    CHECK((zz.features - z.features).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("imputation then standardization is finite whenever each column has an observation") {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution hole(0.4);
  for (int trial = 0; trial < 30; ++trial) {
    std::ostringstream csv;
    const int n = 6, d = 5;
    std::vector<std::vector<std::string>> cells(n, std::vector<std::string>(d));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < d; ++j) cells[i][j] = hole(rng) ? "?" : std::to_string(i * 1.5 - j);
    }
    for (int j = 0; j < d; ++j) cells[static_cast<std::size_t>(trial % n)][j] = "1";
    for (int i = 0; i < n; ++i) {
      csv << (i % 2);
      for (int j = 0; j < d; ++j) csv << ',' << cells[i][j];
      csv << '\n';
    }
    const auto data = parse(csv.str());
    const auto pre = Preprocessor::fit(data);
    CHECK(pre.apply(data).features.allFinite());
  }
}

TEST_CASE("text round trip is stable") {
  auto data = gen_synthetic(SyntheticKind::two_gauss, 12, 3, 5, 1.5);
  std::ostringstream first;
  write_csv(first, data);
  std::istringstream in(first.str());
  const auto back = parse_csv(in);
  CHECK(back.features == data.features);  // 17 digits round-trips exactly
  CHECK(back.labels == data.labels);
  std::ostringstream second;
  write_csv(second, back);
  CHECK(first.str() == second.str());
}

TEST_CASE("missing cells survive a round trip and training-fold imputation uses train rows only") {
  const auto data = parse("a,1,10\nb,?,20\na,3,?\nb,5,40\n");
  std::ostringstream out;
  write_csv(out, data);
  CHECK(out.str().find('?') != std::string::npos);

  const std::vector<Eigen::Index> train_rows{0, 1, 2};
  const auto train = data.subset(train_rows);
  const auto imp = fit_imputer(train);
  CHECK(imp.fill(0) == doctest::Approx(2.0));   // mean of 1 and 3; row 3 is held out
  CHECK(imp.fill(1) == doctest::Approx(15.0));  // mean of 10 and 20
}

TEST_CASE("arrhythmia loader rejects tables of the wrong shape") {
  const auto dir = std::filesystem::temp_directory_path() / "sscl_test_dataset";
  std::filesystem::create_directories(dir);
  const auto path = dir / "small.data";
  {
    std::ofstream out(path);
    out << "1,2,3,1\n4,5,6,2\n";
  }
  CHECK_THROWS_AS(load_arrhythmia(path), DataError);
}
