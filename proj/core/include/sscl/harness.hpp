#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sscl/dataset.hpp"
#include "sscl/trainer.hpp"

namespace sscl {

/// Seeded shuffle of 0..n-1 cut into `folds` contiguous chunks whose sizes
/// differ by at most one (the first n % folds chunks get the extra point).
/// Returns the fold id of every point.
std::vector<int> kfold_split(Eigen::Index n, int folds, std::uint64_t seed);

enum class Method { sscl, knn, srbc, majority };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// A model fitted on one training split. `predict` maps raw (unprocessed)
/// rows to class ids; each method owns its preprocessing so nothing from the
/// held-out rows leaks into fitting.
struct FoldModel {
  std::function<std::vector<int>(const Dataset& test)> predict;
  double code_zero_fraction = std::numeric_limits<double>::quiet_NaN();
};

using MethodFactory = std::function<FoldModel(const Dataset& train)>;

MethodFactory make_method(Method method, const Hyperparams& h);

struct CVOptions {
  int jobs = 1;
  bool record_time = false;  // wall-clock per fold; off keeps outputs reproducible
};

struct CVResult {
  std::string method;
  std::vector<double> accuracies;       // NaN for a failed fold
  std::vector<char> failed;             // 1 if the fold threw; not vector<bool>, folds write concurrently
  std::vector<std::string> errors;      // empty unless the fold failed
  std::vector<Eigen::MatrixXi> confusion;  // rows = true class, cols = predicted
  std::vector<double> seconds;          // zeros unless timing was requested
  std::vector<double> zero_fractions;   // per-fold mean code sparsity (NaN if n/a)
  std::vector<int> assignment;          // fold id per point
  double mean = 0.0;                    // over successful folds
  double stddev = 0.0;                  // sample stddev over successful folds
  std::uint64_t seed = 0;
  Hyperparams hyper;

  int folds() const noexcept { return static_cast<int>(accuracies.size()); }
  bool any_failed() const;
  /// Mean of the finite per-fold zero fractions (NaN if none).
  double mean_zero_fraction() const;
};

CVResult run_cv(const Dataset& data, Method method, const Hyperparams& h, int folds,
                std::uint64_t seed, const CVOptions& options = {});

/// Generic form used by run_cv; `factory` is called once per fold.
CVResult run_cv(const Dataset& data, std::string_view method_name, const MethodFactory& factory,
                int folds, std::uint64_t seed, const CVOptions& options = {});

enum class SweepParam { alpha, beta, gamma, k };

SweepParam parse_sweep_param(std::string_view name);
std::string_view to_string(SweepParam param);

struct SweepPoint {
  SweepParam param = SweepParam::gamma;
  double value = 0.0;
  bool skipped = false;
  std::string reason;  // why it was skipped
  CVResult result;     // empty when skipped
};

/// One cross validation per value with the same fold assignment for all of
/// them. Values that break the convexity guard (or are otherwise invalid for
/// the parameter) are reported as skipped.
std::vector<SweepPoint> sweep(const Dataset& data, Method method, const Hyperparams& base,
                              SweepParam param, const std::vector<double>& values, int folds,
                              std::uint64_t seed, const CVOptions& options = {});

// CSV outputs. Comment lines start with '#'.
//   boxplot: method,fold,accuracy,seconds
//   sweep:   param,value,mean_acc,std_acc,skipped,zero_frac
void write_cv_csv(std::ostream& out, const std::vector<CVResult>& results,
                  std::string_view comment = {});
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points,
                     std::string_view comment = {});

struct CvCsvRow {
  std::string method;
  int fold = 0;
  double accuracy = 0.0;
  double seconds = 0.0;
};
struct SweepCsvRow {
  std::string param;
  double value = 0.0;
  double mean_acc = 0.0;
  double std_acc = 0.0;
  bool skipped = false;
  double zero_frac = 0.0;
};

std::vector<CvCsvRow> read_cv_csv(std::istream& in);
std::vector<SweepCsvRow> read_sweep_csv(std::istream& in);

}  // namespace sscl
