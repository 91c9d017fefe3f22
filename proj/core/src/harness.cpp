#include "sscl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>

#include <spdlog/spdlog.h>

#include "sscl/baselines.hpp"
#include "sscl/error.hpp"
#include "sscl/log.hpp"
#include "sscl/parallel.hpp"
#include "sscl/predictor.hpp"
#include "sscl/text_io.hpp"

namespace sscl {

std::vector<int> kfold_split(Eigen::Index n, int folds, std::uint64_t seed) {
  if (folds < 2 || folds > n) {
    throw InvalidArgument("folds must satisfy 2 <= folds <= n (folds=" + std::to_string(folds) +
                          ", n=" + std::to_string(n) + ")");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  const auto base = n / folds;
  const auto extra = n % folds;
  std::size_t pos = 0;
  for (int f = 0; f < folds; ++f) {
    const auto len = base + (f < extra ? 1 : 0);
    for (Eigen::Index j = 0; j < len; ++j) assignment[static_cast<std::size_t>(order[pos++])] = f;
  }
  return assignment;
}

Method parse_method(std::string_view name) {
  if (name == "sscl") return Method::sscl;
  if (name == "knn") return Method::knn;
  if (name == "srbc") return Method::srbc;
  if (name == "majority") return Method::majority;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "' (expected sscl, knn, srbc or majority)");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::sscl: return "sscl";
    case Method::knn: return "knn";
    case Method::srbc: return "srbc";
    case Method::majority: return "majority";
  }
  return "?";
}

MethodFactory make_method(Method method, const Hyperparams& h) {
  switch (method) {
    case Method::sscl:
      return [h](const Dataset& train) {
        auto model = std::make_shared<const Model>(train_ovr(train, h));
        FoldModel fm;
        fm.code_zero_fraction = model->code_zero_fraction();
        fm.predict = [model](const Dataset& test) {
          std::vector<int> out;
          for (const auto& p : predict_batch(*model, test)) out.push_back(p.label);
          return out;
        };
        return fm;
      };
    case Method::knn:
      return [h](const Dataset& train) {
        auto pre = Preprocessor::fit(train);
        auto prepared = std::make_shared<const Dataset>(pre.apply(train));
        FoldModel fm;
        fm.predict = [pre, prepared, k = h.k](const Dataset& test) {
          const auto t = pre.apply(test);
          std::vector<int> out;
          for (Eigen::Index i = 0; i < t.size(); ++i) {
            out.push_back(knn_classify(*prepared, t.features.row(i).transpose(), k));
          }
          return out;
        };
        return fm;
      };
    case Method::srbc:
      return [h](const Dataset& train) {
        auto pre = Preprocessor::fit(train);
        auto clf = std::make_shared<const SrbcClassifier>(pre.apply(train), h.beta, h.gamma);
        FoldModel fm;
        fm.predict = [pre, clf](const Dataset& test) {
          const auto t = pre.apply(test);
          std::vector<int> out;
          for (Eigen::Index i = 0; i < t.size(); ++i) out.push_back(clf->classify(t.features.row(i).transpose()));
          return out;
        };
        return fm;
      };
    case Method::majority:
      return [](const Dataset& train) {
        const auto counts = train.class_counts();
        const int top = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        FoldModel fm;
        fm.predict = [top](const Dataset& test) {
          return std::vector<int>(static_cast<std::size_t>(test.size()), top);
        };
        return fm;
      };
  }
  throw InvalidArgument("unknown method");
}

bool CVResult::any_failed() const {
  return std::any_of(failed.begin(), failed.end(), [](char f) { return f != 0; });
}

double CVResult::mean_zero_fraction() const {
  double sum = 0.0;
  int count = 0;
  for (double z : zero_fractions) {
    if (std::isfinite(z)) {
      sum += z;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / count;
}

CVResult run_cv(const Dataset& data, std::string_view method_name, const MethodFactory& factory,
                int folds, std::uint64_t seed, const CVOptions& options) {
  data.validate();
  CVResult result;
  result.method = std::string(method_name);
  result.seed = seed;
  result.assignment = kfold_split(data.size(), folds, seed);

  const auto F = static_cast<std::size_t>(folds);
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  result.accuracies.assign(F, nan);
  result.failed.assign(F, 0);
  result.errors.assign(F, {});
  result.confusion.assign(F, Eigen::MatrixXi::Zero(data.num_classes(), data.num_classes()));
  result.seconds.assign(F, 0.0);
  result.zero_fractions.assign(F, nan);

  parallel_for(F, options.jobs, [&](std::size_t f) {
    std::vector<Eigen::Index> train_rows, test_rows;
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      (result.assignment[static_cast<std::size_t>(i)] == static_cast<int>(f) ? test_rows : train_rows)
          .push_back(i);
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      const auto train = data.subset(train_rows);
      const auto test = data.subset(test_rows);
      const auto fm = factory(train);
      const auto predicted = fm.predict(test);
      if (predicted.size() != test_rows.size()) throw InvalidArgument("prediction count mismatch");
      Eigen::Index correct = 0;
      auto& confusion = result.confusion[f];
      for (std::size_t t = 0; t < predicted.size(); ++t) {
        const int truth = test.labels[t];
        const int guess = predicted[t];
        if (guess < 0 || guess >= data.num_classes()) throw InvalidArgument("predicted class out of range");
        ++confusion(truth, guess);
        if (truth == guess) ++correct;
      }
      result.accuracies[f] = static_cast<double>(correct) / static_cast<double>(test_rows.size());
      result.zero_fractions[f] = fm.code_zero_fraction;
    } catch (const std::exception& e) {
      result.failed[f] = 1;
      result.errors[f] = e.what();
      logger()->warn("{} fold {} failed: {}", method_name, f, e.what());
    }
    if (options.record_time) {
      result.seconds[f] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  });

  std::vector<double> ok;
  for (std::size_t f = 0; f < F; ++f) {
    if (!result.failed[f]) ok.push_back(result.accuracies[f]);
  }
  if (ok.empty()) {
    result.mean = nan;
    result.stddev = nan;
  } else {
    result.mean = std::accumulate(ok.begin(), ok.end(), 0.0) / static_cast<double>(ok.size());
    double ss = 0.0;
    for (double a : ok) ss += (a - result.mean) * (a - result.mean);
    result.stddev = ok.size() > 1 ? std::sqrt(ss / static_cast<double>(ok.size() - 1)) : 0.0;
  }
  return result;
}

CVResult run_cv(const Dataset& data, Method method, const Hyperparams& h, int folds,
                std::uint64_t seed, const CVOptions& options) {
  if (method == Method::sscl) h.validate();
  if (method == Method::knn && (h.k < 1)) throw InvalidArgument("k must be >= 1");
  auto result = run_cv(data, to_string(method), make_method(method, h), folds, seed, options);
  result.hyper = h;
  return result;
}

SweepParam parse_sweep_param(std::string_view name) {
  if (name == "alpha") return SweepParam::alpha;
  if (name == "beta") return SweepParam::beta;
  if (name == "gamma") return SweepParam::gamma;
  if (name == "k") return SweepParam::k;
  throw InvalidArgument("unknown sweep parameter '" + std::string(name) +
                        "' (expected alpha, beta, gamma or k)");
}

std::string_view to_string(SweepParam param) {
  switch (param) {
    case SweepParam::alpha: return "alpha";
    case SweepParam::beta: return "beta";
    case SweepParam::gamma: return "gamma";
    case SweepParam::k: return "k";
  }
  return "?";
}

std::vector<SweepPoint> sweep(const Dataset& data, Method method, const Hyperparams& base,
                              SweepParam param, const std::vector<double>& values, int folds,
                              std::uint64_t seed, const CVOptions& options) {
  if (values.empty()) throw InvalidArgument("sweep needs at least one value");
  std::vector<SweepPoint> points(values.size());
  for (std::size_t v = 0; v < values.size(); ++v) {
    auto& pt = points[v];
    pt.param = param;
    pt.value = values[v];
  }

  CVOptions inner = options;
  inner.jobs = 1;
  parallel_for(values.size(), options.jobs, [&](std::size_t v) {
    auto& pt = points[v];
    Hyperparams h = base;
    switch (param) {
      case SweepParam::alpha: h.alpha = pt.value; break;
      case SweepParam::beta: h.beta = pt.value; break;
      case SweepParam::gamma: h.gamma = pt.value; break;
      case SweepParam::k:
        if (pt.value < 1 || pt.value != std::floor(pt.value)) {
          pt.skipped = true;
          pt.reason = "k must be a positive integer";
          return;
        }
        h.k = static_cast<Eigen::Index>(pt.value);
        break;
    }
    if (!h.satisfies_convexity_guard() && method == Method::sscl) {
      pt.skipped = true;
      pt.reason = "convexity guard";
      return;
    }
    try {
      if (method == Method::sscl) h.validate();
    } catch (const InvalidArgument& e) {
      pt.skipped = true;
      pt.reason = e.what();
      return;
    }
    pt.result = run_cv(data, method, h, folds, seed, inner);
  });
  return points;
}

void write_cv_csv(std::ostream& out, const std::vector<CVResult>& results,
                  std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "method,fold,accuracy,seconds\n";
  for (const auto& r : results) {
    for (int f = 0; f < r.folds(); ++f) {
      const auto i = static_cast<std::size_t>(f);
      out << r.method << ',' << f << ',' << format_double(r.accuracies[i]) << ','
          << format_double(r.seconds[i]) << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points,
                     std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "param,value,mean_acc,std_acc,skipped,zero_frac\n";
  for (const auto& p : points) {
    out << to_string(p.param) << ',' << format_double(p.value) << ',';
    if (p.skipped) {
      out << "nan,nan,skipped: " << p.reason << ",nan\n";
    } else {
      out << format_double(p.result.mean) << ',' << format_double(p.result.stddev) << ",0,"
          << format_double(p.result.mean_zero_fraction()) << '\n';
    }
  }
}

namespace {

template <class Row, class Parse>
std::vector<Row> read_rows(std::istream& in, std::string_view header, std::size_t arity,
                           Parse parse) {
  std::vector<Row> rows;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (!seen_header) {
      if (body != header) throw DataError("unexpected CSV header '" + std::string(body) + "'");
      seen_header = true;
      continue;
    }
    const auto cells = split_commas(body);
    if (cells.size() != arity) throw DataError("bad row '" + std::string(body) + "'");
    rows.push_back(parse(cells));
  }
  if (!seen_header) throw DataError("missing CSV header");
  return rows;
}

}  // namespace

std::vector<CvCsvRow> read_cv_csv(std::istream& in) {
  return read_rows<CvCsvRow>(in, "method,fold,accuracy,seconds", 4, [](const auto& c) {
    return CvCsvRow{std::string(c[0]), static_cast<int>(parse_double(c[1])), parse_double(c[2]),
                    parse_double(c[3])};
  });
}

std::vector<SweepCsvRow> read_sweep_csv(std::istream& in) {
  return read_rows<SweepCsvRow>(in, "param,value,mean_acc,std_acc,skipped,zero_frac", 6,
                                [](const auto& c) {
                                  return SweepCsvRow{std::string(c[0]), parse_double(c[1]),
                                                     parse_double(c[2]), parse_double(c[3]),
                                                     c[4] != "0", parse_double(c[5])};
                                });
}

}  // namespace sscl
