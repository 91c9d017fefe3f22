#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace sscl {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Labelled feature matrix. Row i of `features` is point i; `labels[i]` is a
/// dense index into `class_names`.
///
/// `missing` records which cells were absent in the source file (empty when
/// none were). The stored value for a missing cell is whatever imputation last
/// filled in, so cross validation can re-impute from training rows only.
struct Dataset {
  Eigen::MatrixXd features;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  BoolMatrix missing;

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dim() const noexcept { return features.cols(); }
  int num_classes() const noexcept { return static_cast<int>(class_names.size()); }
  bool has_missing() const noexcept { return missing.size() != 0; }

  /// Throws InvalidArgument if shapes, label ids or finiteness are off.
  void validate() const;

  /// Rows in the given order; class_names are kept whole so ids stay stable
  /// across folds.
  Dataset subset(std::span<const Eigen::Index> rows) const;

  /// Number of points per class id.
  std::vector<Eigen::Index> class_counts() const;
};

enum class LabelColumn { first, last };

struct CsvOptions {
  bool has_header = false;
  LabelColumn label_column = LabelColumn::first;
};

/// Reads a comma-separated file: one label column plus numeric features,
/// "?" marks a missing cell, lines starting with '#' are comments. Missing
/// cells are filled with the mean of the observed entries in their column.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});

/// UCI Arrhythmia layout: no header, class label in the last column.
/// Rejects files that are not 452 x 279.
Dataset load_arrhythmia(const std::filesystem::path& path);

/// Label in column 0, 17 significant digits, missing cells written as "?".
void write_csv(std::ostream& out, const Dataset& data, std::string_view comment = {});
void save_csv(const std::filesystem::path& path, const Dataset& data,
              std::string_view comment = {});

enum class SyntheticKind {
  two_gauss,  // n/2 points per class, unit covariance, centres at -/+ separation * e1
  xor_ring,   // four unit-covariance clusters at (+-s, +-s) in the first two dims;
              // class 1 when the signs differ (needs d >= 2)
};

SyntheticKind parse_synthetic_kind(std::string_view name);
std::string_view to_string(SyntheticKind kind);

Dataset gen_synthetic(SyntheticKind kind, Eigen::Index n, Eigen::Index d,
                      std::uint64_t seed, double separation);

/// Per-column z-scoring fitted on training rows.
struct Standardizer {
  Eigen::VectorXd means;
  Eigen::VectorXd stddevs;  // population stddev; < 1e-12 means "centre only"

  static constexpr double kMinStddev = 1e-12;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

Standardizer fit_standardizer(const Dataset& train);
Dataset apply_standardizer(const Standardizer& s, const Dataset& data);

/// Column means of observed training entries, used to fill missing cells.
/// A column with no observed training entry is filled with 0.
struct Imputer {
  Eigen::VectorXd fill;
};

Imputer fit_imputer(const Dataset& train);
Dataset apply_imputer(const Imputer& imputer, const Dataset& data);

/// Imputation followed by standardization, both fitted on the same rows.
struct Preprocessor {
  Imputer imputer;
  Standardizer standardizer;

  static Preprocessor fit(const Dataset& train);
  Dataset apply(const Dataset& data) const;
};

}  // namespace sscl
