#include "sscl/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

#include "sscl/error.hpp"
#include "sscl/text_io.hpp"

namespace sscl {

void Dataset::validate() const {
  const auto n = size();
  if (n < 2) throw InvalidArgument("dataset needs at least 2 points, got " + std::to_string(n));
  if (dim() < 1) throw InvalidArgument("dataset needs at least 1 feature");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw InvalidArgument("label count " + std::to_string(labels.size()) +
                          " does not match point count " + std::to_string(n));
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes()) {
      throw InvalidArgument("label id " + std::to_string(y) + " outside class list");
    }
  }
  if (!features.allFinite()) throw InvalidArgument("dataset contains non-finite values");
  if (has_missing() && (missing.rows() != n || missing.cols() != dim())) {
    throw InvalidArgument("missing-value mask has the wrong shape");
  }
}

Dataset Dataset::subset(std::span<const Eigen::Index> rows) const {
  Dataset out;
  out.class_names = class_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
  out.labels.reserve(rows.size());
  if (has_missing()) out.missing.resize(out.features.rows(), dim());
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(rows.size()); ++r) {
    const auto src = rows[static_cast<std::size_t>(r)];
    out.features.row(r) = features.row(src);
    out.labels.push_back(labels[static_cast<std::size_t>(src)]);
    if (has_missing()) out.missing.row(r) = missing.row(src);
  }
  return out;
}

std::vector<Eigen::Index> Dataset::class_counts() const {
  std::vector<Eigen::Index> counts(class_names.size(), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

namespace {

constexpr std::string_view kMissing = "?";

}  // namespace

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> holes;
  std::vector<std::string> raw_labels;
  std::size_t arity = 0;
  bool header_pending = options.has_header;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    auto cells = split_commas(body);
    if (arity == 0) {
      arity = cells.size();
      if (arity < 2) throw DataError("line " + std::to_string(line_no) + ": need a label and at least one feature");
    } else if (cells.size() != arity) {
      throw DataError("line " + std::to_string(line_no) + ": expected " + std::to_string(arity) +
                      " columns, got " + std::to_string(cells.size()));
    }
    const std::size_t label_at = options.label_column == LabelColumn::first ? 0 : arity - 1;
    raw_labels.emplace_back(cells[label_at]);
    std::vector<double> values;
    std::vector<bool> hole;
    values.reserve(arity - 1);
    hole.reserve(arity - 1);
    for (std::size_t c = 0; c < arity; ++c) {
      if (c == label_at) continue;
      if (cells[c] == kMissing) {
        values.push_back(0.0);
        hole.push_back(true);
      } else {
        try {
          values.push_back(parse_double(cells[c]));
        } catch (const DataError& e) {
          throw DataError("line " + std::to_string(line_no) + ", column " + std::to_string(c) +
                          ": " + e.what());
        }
        if (!std::isfinite(values.back())) {
          throw DataError("line " + std::to_string(line_no) + ": non-finite value");
        }
        hole.push_back(false);
      }
    }
    rows.push_back(std::move(values));
    holes.push_back(std::move(hole));
  }
  if (rows.empty()) throw DataError("no rows");

  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(arity - 1);
  Dataset data;
  data.features.resize(n, d);
  bool any_missing = false;
  BoolMatrix mask(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      data.features(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      mask(i, j) = holes[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      any_missing = any_missing || mask(i, j);
    }
  }

  std::unordered_map<std::string, int> ids;
  for (const auto& name : raw_labels) {
    auto [it, inserted] = ids.try_emplace(name, static_cast<int>(data.class_names.size()));
    if (inserted) data.class_names.push_back(name);
    data.labels.push_back(it->second);
  }

  if (any_missing) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (mask.col(j).all()) {
        throw DataError("column " + std::to_string(j + 1) + " has no observed values");
      }
    }
    data.missing = std::move(mask);
    data = apply_imputer(fit_imputer(data), data);
  }
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  return parse_csv(in, options);
}

Dataset load_arrhythmia(const std::filesystem::path& path) {
  auto data = load_csv(path, CsvOptions{.has_header = false, .label_column = LabelColumn::last});
  if (data.size() != 452 || data.dim() != 279) {
    throw DataError("expected the 452 x 279 Arrhythmia table, got " + std::to_string(data.size()) +
                    " x " + std::to_string(data.dim()));
  }
  if (data.num_classes() > 16) throw DataError("Arrhythmia has at most 16 classes");
  return data;
}

void write_csv(std::ostream& out, const Dataset& data, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << data.class_names[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])];
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
      out << ',';
      if (data.has_missing() && data.missing(i, j)) {
        out << kMissing;
      } else {
        out << format_double(data.features(i, j));
      }
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data, std::string_view comment) {
  std::ostringstream out;
  write_csv(out, data, comment);
  write_file_atomic(path, out.str());
}

SyntheticKind parse_synthetic_kind(std::string_view name) {
  if (name == "two-gauss") return SyntheticKind::two_gauss;
  if (name == "xor-ring") return SyntheticKind::xor_ring;
  throw InvalidArgument("unknown generator kind '" + std::string(name) +
                        "' (expected two-gauss or xor-ring)");
}

std::string_view to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::two_gauss: return "two-gauss";
    case SyntheticKind::xor_ring: return "xor-ring";
  }
  return "?";
}

Dataset gen_synthetic(SyntheticKind kind, Eigen::Index n, Eigen::Index d, std::uint64_t seed,
                      double separation) {
  if (n < 4 || n % 2 != 0) {
    throw InvalidArgument("n must be even and >= 4, got " + std::to_string(n));
  }
  if (d < 1) throw InvalidArgument("d must be >= 1");
  if (kind == SyntheticKind::xor_ring && d < 2) throw InvalidArgument("xor-ring needs d >= 2");
  if (!std::isfinite(separation)) throw InvalidArgument("separation must be finite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Dataset data;
  data.class_names = {"0", "1"};
  data.features.resize(n, d);
  data.labels.resize(static_cast<std::size_t>(n));
  const auto half = n / 2;

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = normal(rng);
    int label = 0;
    if (kind == SyntheticKind::two_gauss) {
      label = i < half ? 0 : 1;
      data.features(i, 0) += label == 0 ? -separation : separation;
    } else {
      // Quadrant cycles through (+,+), (-,-), (+,-), (-,+); the first two are
      // class 0 and the last two class 1.
      const auto q = i % 4;
      const double sx = (q == 0 || q == 2) ? 1.0 : -1.0;
      const double sy = (q == 0 || q == 3) ? 1.0 : -1.0;
      data.features(i, 0) += sx * separation;
      data.features(i, 1) += sy * separation;
      label = q < 2 ? 0 : 1;
    }
    data.labels[static_cast<std::size_t>(i)] = label;
  }
  return data;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& x) const {
  if (x.size() != means.size()) {
    throw InvalidArgument("standardizer expects dimension " + std::to_string(means.size()) +
                          ", got " + std::to_string(x.size()));
  }
  Eigen::VectorXd out = x - means;
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    if (stddevs(j) >= kMinStddev) out(j) /= stddevs(j);
  }
  return out;
}

Standardizer fit_standardizer(const Dataset& train) {
  if (train.size() < 1) throw InvalidArgument("cannot fit a standardizer on zero rows");
  Standardizer s;
  s.means = train.features.colwise().mean().transpose();
  const Eigen::MatrixXd centred = train.features.rowwise() - s.means.transpose();
  s.stddevs =
      (centred.colwise().squaredNorm() / static_cast<double>(train.size())).cwiseSqrt().transpose();
  return s;
}

Dataset apply_standardizer(const Standardizer& s, const Dataset& data) {
  if (data.dim() != s.means.size()) {
    throw InvalidArgument("standardizer fitted on dimension " + std::to_string(s.means.size()) +
                          ", data has " + std::to_string(data.dim()));
  }
  Dataset out = data;
  out.features.rowwise() -= s.means.transpose();
  for (Eigen::Index j = 0; j < out.dim(); ++j) {
    if (s.stddevs(j) >= Standardizer::kMinStddev) out.features.col(j) /= s.stddevs(j);
  }
  return out;
}

Imputer fit_imputer(const Dataset& train) {
  Imputer imp;
  imp.fill = Eigen::VectorXd::Zero(train.dim());
  for (Eigen::Index j = 0; j < train.dim(); ++j) {
    double sum = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < train.size(); ++i) {
      if (train.has_missing() && train.missing(i, j)) continue;
      sum += train.features(i, j);
      ++count;
    }
    if (count > 0) imp.fill(j) = sum / static_cast<double>(count);
  }
  return imp;
}

Dataset apply_imputer(const Imputer& imputer, const Dataset& data) {
  if (data.dim() != imputer.fill.size()) throw InvalidArgument("imputer dimension mismatch");
  Dataset out = data;
  if (!out.has_missing()) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    for (Eigen::Index j = 0; j < out.dim(); ++j) {
      if (out.missing(i, j)) out.features(i, j) = imputer.fill(j);
    }
  }
  return out;
}

Preprocessor Preprocessor::fit(const Dataset& train) {
  Preprocessor p;
  p.imputer = fit_imputer(train);
  p.standardizer = fit_standardizer(apply_imputer(p.imputer, train));
  return p;
}

Dataset Preprocessor::apply(const Dataset& data) const {
  return apply_standardizer(standardizer, apply_imputer(imputer, data));
}

}  // namespace sscl
