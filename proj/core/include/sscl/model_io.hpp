#pragma once

#include <filesystem>
#include <iosfwd>

#include "sscl/trainer.hpp"

namespace sscl {

// Plain-text model file, numbers at 17 significant digits:
//
//   SSCL v1
//   hyper <alpha> <beta> <gamma> <k> <max_outer> <tol>
//   classes <C>
//   class <name>                                    (C lines, id order)
//   dims <n> <d>
//   impute <d values>
//   means <d values>
//   stddevs <d values>
//   weight <class id> <trained 0|1> <flagged 0|1> <positives> <d values>   (C lines)
//   train <label id> <d values>                     (n lines, standardized)
//   end
//
// Only what prediction needs is stored: per-class w, the preprocessor and the
// standardized training points that supply test-time contexts.

void write_model(std::ostream& out, const Model& model);
Model read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace sscl
