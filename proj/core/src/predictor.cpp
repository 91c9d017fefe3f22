#include "sscl/predictor.hpp"

#include <ostream>
#include <string>

#include "sscl/context.hpp"
#include "sscl/error.hpp"
#include "sscl/parallel.hpp"
#include "sscl/sparse_solver.hpp"
#include "sscl/text_io.hpp"

namespace sscl {

int argmax_lowest(const Eigen::VectorXd& scores) {
  if (scores.size() == 0) throw InvalidArgument("argmax of an empty score vector");
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c) {
    if (scores(c) > scores(best)) best = c;
  }
  return static_cast<int>(best);
}

Prediction predict_prepared(const Model& model, const Eigen::VectorXd& x_std) {
  if (x_std.size() != model.dim()) {
    throw InvalidArgument("model expects dimension " + std::to_string(model.dim()) + ", got " +
                          std::to_string(x_std.size()));
  }
  auto ctx = query_context(model.train_points, x_std, model.hyper.k);
  Prediction out;
  out.code = code_point(x_std, ctx.matrix, model.hyper.beta, model.hyper.gamma);
  const Eigen::VectorXd xhat = ctx.matrix * out.code;
  out.scores.resize(model.num_classes());
  for (int c = 0; c < model.num_classes(); ++c) {
    const auto& cm = model.classes[static_cast<std::size_t>(c)];
    out.scores(c) = cm.trained ? cm.fit.w.dot(xhat) : kUntrainedScore;
  }
  out.label = argmax_lowest(out.scores);
  out.neighbor_ids = std::move(ctx.ids);
  return out;
}

Prediction predict(const Model& model, const Eigen::VectorXd& x) {
  if (x.size() != model.dim()) {
    throw InvalidArgument("model expects dimension " + std::to_string(model.dim()) + ", got " +
                          std::to_string(x.size()));
  }
  if (!x.allFinite()) throw InvalidArgument("input point contains non-finite values");
  return predict_prepared(model, model.preprocessor.standardizer.apply(x));
}

std::vector<Prediction> predict_batch(const Model& model, const Dataset& data, int jobs) {
  if (data.dim() != model.dim()) {
    throw InvalidArgument("model expects dimension " + std::to_string(model.dim()) + ", data has " +
                          std::to_string(data.dim()));
  }
  const auto prepared = model.preprocessor.apply(data);
  std::vector<Prediction> out(static_cast<std::size_t>(data.size()));
  parallel_for(out.size(), jobs, [&](std::size_t i) {
    out[i] = predict_prepared(model, prepared.features.row(static_cast<Eigen::Index>(i)).transpose());
  });
  return out;
}

void write_predictions_csv(std::ostream& out, const Model& model, const Dataset& data,
                           const std::vector<Prediction>& predictions, bool with_truth,
                           std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "index";
  if (with_truth) out << ",true_label";
  out << ",predicted";
  for (int c = 0; c < model.num_classes(); ++c) out << ",score_" << c;
  out << '\n';
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    out << i;
    if (with_truth) out << ',' << data.class_names[static_cast<std::size_t>(data.labels[i])];
    out << ',' << model.class_names[static_cast<std::size_t>(p.label)];
    for (Eigen::Index c = 0; c < p.scores.size(); ++c) out << ',' << format_double(p.scores(c));
    out << '\n';
  }
}

}  // namespace sscl
