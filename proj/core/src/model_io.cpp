#include "sscl/model_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "sscl/error.hpp"
#include "sscl/text_io.hpp"

namespace sscl {

namespace {

constexpr std::string_view kMagic = "SSCL v1";

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j) out << ' ' << format_double(v(j));
}

class Reader {
public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream line(std::string_view expected_tag) {
    std::string text;
    if (!std::getline(in_, text)) fail("unexpected end of file, expected '" + std::string(expected_tag) + "'");
    ++line_no_;
    std::istringstream fields(text);
    std::string tag;
    fields >> tag;
    if (tag != expected_tag) fail("expected '" + std::string(expected_tag) + "', found '" + tag + "'");
    return fields;
  }

  std::string rest_of(std::istringstream& fields) {
    std::string rest;
    std::getline(fields, rest);
    if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
    return rest;
  }

  double number(std::istringstream& fields) {
    std::string token;
    if (!(fields >> token)) fail("missing number");
    try {
      return parse_double(token);
    } catch (const DataError& e) {
      fail(e.what());
    }
  }

  long long integer(std::istringstream& fields) {
    long long v = 0;
    if (!(fields >> v)) fail("missing integer");
    return v;
  }

  Eigen::VectorXd vector(std::istringstream& fields, Eigen::Index d) {
    Eigen::VectorXd v(d);
    for (Eigen::Index j = 0; j < d; ++j) v(j) = number(fields);
    std::string extra;
    if (fields >> extra) fail("too many values");
    return v;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw DataError("model file line " + std::to_string(line_no_) + ": " + why);
  }

  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const Model& model) {
  const auto& h = model.hyper;
  out << kMagic << '\n';
  out << "hyper " << format_double(h.alpha) << ' ' << format_double(h.beta) << ' '
      << format_double(h.gamma) << ' ' << h.k << ' ' << h.max_outer << ' ' << format_double(h.tol)
      << '\n';
  out << "classes " << model.class_names.size() << '\n';
  for (const auto& name : model.class_names) out << "class " << name << '\n';
  out << "dims " << model.train_points.rows() << ' ' << model.train_points.cols() << '\n';
  out << "impute";
  write_vector(out, model.preprocessor.imputer.fill);
  out << "\nmeans";
  write_vector(out, model.preprocessor.standardizer.means);
  out << "\nstddevs";
  write_vector(out, model.preprocessor.standardizer.stddevs);
  out << '\n';
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const auto& cm = model.classes[c];
    out << "weight " << c << ' ' << (cm.trained ? 1 : 0) << ' ' << (cm.flagged ? 1 : 0) << ' '
        << cm.positives;
    write_vector(out, cm.trained ? cm.fit.w : Eigen::VectorXd::Zero(model.dim()).eval());
    out << '\n';
  }
  for (Eigen::Index i = 0; i < model.train_points.rows(); ++i) {
    out << "train " << model.train_labels[static_cast<std::size_t>(i)];
    write_vector(out, model.train_points.row(i).transpose());
    out << '\n';
  }
  out << "end\n";
}

Model read_model(std::istream& in) {
  Reader r(in);
  std::string magic;
  if (!std::getline(in, magic) || magic != kMagic) {
    throw DataError("not an SSCL v1 model file");
  }
  ++r.line_no_;

  Model model;
  {
    auto f = r.line("hyper");
    auto& h = model.hyper;
    h.alpha = r.number(f);
    h.beta = r.number(f);
    h.gamma = r.number(f);
    h.k = static_cast<Eigen::Index>(r.integer(f));
    h.max_outer = static_cast<int>(r.integer(f));
    h.tol = r.number(f);
  }
  auto f = r.line("classes");
  const auto C = r.integer(f);
  if (C < 2) r.fail("a model needs at least 2 classes");
  for (long long c = 0; c < C; ++c) {
    auto cf = r.line("class");
    model.class_names.push_back(r.rest_of(cf));
  }
  auto df = r.line("dims");
  const auto n = static_cast<Eigen::Index>(r.integer(df));
  const auto d = static_cast<Eigen::Index>(r.integer(df));
  if (n < 1 || d < 1) r.fail("bad dimensions");
  if (model.hyper.k < 1 || model.hyper.k > n) r.fail("k does not fit the stored training set");

  auto imp = r.line("impute");
  model.preprocessor.imputer.fill = r.vector(imp, d);
  auto mf = r.line("means");
  model.preprocessor.standardizer.means = r.vector(mf, d);
  auto sf = r.line("stddevs");
  model.preprocessor.standardizer.stddevs = r.vector(sf, d);

  model.classes.resize(static_cast<std::size_t>(C));
  for (long long c = 0; c < C; ++c) {
    auto wf = r.line("weight");
    if (r.integer(wf) != c) r.fail("weights out of order");
    auto& cm = model.classes[static_cast<std::size_t>(c)];
    cm.trained = r.integer(wf) != 0;
    cm.flagged = r.integer(wf) != 0;
    cm.positives = static_cast<Eigen::Index>(r.integer(wf));
    cm.fit.w = r.vector(wf, d);
    cm.fit.hyper = model.hyper;
  }

  model.train_points.resize(n, d);
  model.train_labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto tf = r.line("train");
    const auto y = r.integer(tf);
    if (y < 0 || y >= C) r.fail("training label out of range");
    model.train_labels[static_cast<std::size_t>(i)] = static_cast<int>(y);
    model.train_points.row(i) = r.vector(tf, d).transpose();
  }
  r.line("end");
  return model;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  std::ostringstream out;
  write_model(out, model);
  write_file_atomic(path, out.str());
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  return read_model(in);
}

}  // namespace sscl
