#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "sscl/dataset.hpp"
#include "sscl/trainer.hpp"

namespace sscl {

struct Prediction {
  int label = 0;                          // argmax of scores, lowest id on ties
  Eigen::VectorXd scores;                 // w_c' X v per class
  Eigen::VectorXd code;                   // sparse code of the point over its context
  std::vector<Eigen::Index> neighbor_ids; // indices into the model's training points
};

/// Score assigned to a class the model never trained (no training points).
/// Finite and below any real decision value, so such a class never wins.
inline constexpr double kUntrainedScore = -1.0e300;

/// argmax with ties going to the lowest index.
int argmax_lowest(const Eigen::VectorXd& scores);

/// Label-free path for an unseen point: preprocess with the model's
/// imputer/standardizer, take the k nearest training points as context, code
/// the point over them (no classification term, since the label is unknown)
/// and score every class.
Prediction predict(const Model& model, const Eigen::VectorXd& x);

/// Same, for a point already in the model's standardized space.
Prediction predict_prepared(const Model& model, const Eigen::VectorXd& x_std);

/// Predicts every row; missing cells (per data.missing) are re-imputed with
/// the model's training means before standardization.
std::vector<Prediction> predict_batch(const Model& model, const Dataset& data, int jobs = 1);

/// "index,true_label,predicted,score_0..score_{C-1}" (true_label only when
/// `with_truth`). Labels are written by class name.
void write_predictions_csv(std::ostream& out, const Model& model, const Dataset& data,
                           const std::vector<Prediction>& predictions, bool with_truth,
                           std::string_view comment = {});

}  // namespace sscl
