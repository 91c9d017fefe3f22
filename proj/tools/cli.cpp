#include "cli.hpp"

#include <cstdint>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "sscl/dataset.hpp"
#include "sscl/error.hpp"
#include "sscl/harness.hpp"
#include "sscl/log.hpp"
#include "sscl/model_io.hpp"
#include "sscl/predictor.hpp"
#include "sscl/text_io.hpp"
#include "sscl/trainer.hpp"

namespace sscl::cli {

namespace {

struct DataFlags {
  std::string path;
  bool header = false;
  std::string label_col = "first";

  void add(CLI::App* app) {
    app->add_option("--data", path, "Input CSV (label column plus numeric features, '?' = missing)")
        ->required();
    app->add_flag("--header", header, "Skip the first non-comment row");
    app->add_option("--label-col", label_col, "Label column position")
        ->check(CLI::IsMember({"first", "last"}))
        ->capture_default_str();
  }

  CsvOptions options() const {
    return {.has_header = header,
            .label_column = label_col == "last" ? LabelColumn::last : LabelColumn::first};
  }

  Dataset load() const { return load_csv(path, options()); }

  std::string describe() const {
    return "data=" + path + " header=" + (header ? "1" : "0") + " label_col=" + label_col;
  }
};

void add_hyper(CLI::App* app, Hyperparams& h) {
  app->add_option("--k", h.k, "Neighbours per context")->capture_default_str();
  app->add_option("--alpha", h.alpha, "Hinge trade-off; must satisfy alpha <= sqrt(2*beta)")
      ->capture_default_str();
  app->add_option("--beta", h.beta, "Reconstruction weight")->capture_default_str();
  app->add_option("--gamma", h.gamma, "L1 sparsity weight")->capture_default_str();
  app->add_option("--max-outer", h.max_outer, "Cap on alternating iterations")->capture_default_str();
  app->add_option("--tol", h.tol, "Relative primal-objective change that stops training")
      ->capture_default_str();
}

// Writes to `out_path`, or to stdout when it is "-".
void emit(const std::string& out_path, const std::string& text, std::ostream& out) {
  if (out_path == "-") {
    out << text;
  } else {
    write_file_atomic(out_path, text);
  }
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> values;
  for (auto cell : split_commas(list)) {
    if (cell.empty()) continue;
    try {
      values.push_back(parse_double(cell));
    } catch (const DataError& e) {
      throw InvalidArgument(std::string("--values: ") + e.what());
    }
  }
  if (values.empty()) throw InvalidArgument("--values must list at least one number");
  return values;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Supervised sparse context learning: train, predict, cross-validate and sweep.\n"
               "Set SSCL_LOG=quiet|info|debug for diagnostics on stderr."};
  app.name(args.empty() ? "sscl" : args.front());
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a seeded synthetic dataset");
  std::string gen_kind = "two-gauss", gen_out = "-";
  Eigen::Index gen_n = 200, gen_d = 10;
  std::uint64_t gen_seed = 42;
  double gen_sep = 4.0;
  gen->add_option("--kind", gen_kind, "Generator")
      ->check(CLI::IsMember({"two-gauss", "xor-ring"}))
      ->capture_default_str();
  gen->add_option("--n", gen_n, "Number of points (even, >= 4)")->capture_default_str();
  gen->add_option("--d", gen_d, "Feature dimension")->capture_default_str();
  gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
  gen->add_option("--sep", gen_sep, "Class-centre offset along the first axis")->capture_default_str();
  gen->add_option("--out", gen_out, "Output CSV ('-' for stdout)")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Train a one-vs-rest model and write a model file");
  DataFlags train_data;
  Hyperparams train_h;
  std::string train_out;
  int train_jobs = 1;
  train_data.add(train);
  add_hyper(train, train_h);
  train->add_option("--out", train_out, "Model file")->required();
  train->add_option("--jobs", train_jobs, "Worker threads (classes train in parallel)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Batch prediction with a trained model");
  DataFlags predict_data;
  std::string model_path, predict_out = "-";
  int predict_jobs = 1;
  predict_cmd->add_option("--model", model_path, "Model file from 'train'")->required();
  predict_cmd->add_option("--data", predict_data.path,
                          "CSV of points; a leading label column is detected by arity")
      ->required();
  predict_cmd->add_flag("--header", predict_data.header, "Skip the first non-comment row");
  predict_cmd->add_option("--out", predict_out, "Predictions CSV ('-' for stdout)")->capture_default_str();
  predict_cmd->add_option("--jobs", predict_jobs, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // cv / sweep / baseline share their experiment flags.
  struct Experiment {
    DataFlags data;
    Hyperparams h;
    int folds = 10;
    std::uint64_t seed = 42;
    std::string out = "-";
    int jobs = 1;
    bool timing = false;
    std::string method = "sscl";
  };
  auto add_experiment = [](CLI::App* cmd, Experiment& e) {
    e.data.add(cmd);
    add_hyper(cmd, e.h);
    cmd->add_option("--folds", e.folds, "Cross-validation folds")->capture_default_str();
    cmd->add_option("--seed", e.seed, "Seed for the fold shuffle")->capture_default_str();
    cmd->add_option("--out", e.out, "Output CSV ('-' for stdout)")->capture_default_str();
    cmd->add_option("--jobs", e.jobs, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--timing", e.timing, "Record wall-clock seconds per fold (output then varies run to run)");
  };

  auto* cv = app.add_subcommand("cv", "k-fold cross validation of one method");
  Experiment cv_e;
  add_experiment(cv, cv_e);
  cv->add_option("--method", cv_e.method, "Method")
      ->check(CLI::IsMember({"sscl", "knn", "srbc", "majority"}))
      ->capture_default_str();

  auto* sw = app.add_subcommand("sweep", "Cross-validated sensitivity curve over one parameter");
  Experiment sw_e;
  std::string sw_param = "gamma", sw_values = "0.01,0.1,1,10";
  add_experiment(sw, sw_e);
  sw->add_option("--method", sw_e.method, "Method")
      ->check(CLI::IsMember({"sscl", "knn", "srbc", "majority"}))
      ->capture_default_str();
  sw->add_option("--param", sw_param, "Parameter to vary")
      ->check(CLI::IsMember({"alpha", "beta", "gamma", "k"}))
      ->capture_default_str();
  sw->add_option("--values", sw_values, "Comma-separated values")->capture_default_str();

  auto* base = app.add_subcommand("baseline", "Cross validation of the KNN and/or SRBC baselines");
  Experiment base_e;
  base_e.method = "both";
  add_experiment(base, base_e);
  base->add_option("--method", base_e.method, "Baseline")
      ->check(CLI::IsMember({"knn", "srbc", "both"}))
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return 2;
  }

  if (!configure_logging_from_env()) {
    err << "SSCL_LOG must be one of quiet, info, debug\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      const auto kind = parse_synthetic_kind(gen_kind);
      const auto data = gen_synthetic(kind, gen_n, gen_d, gen_seed, gen_sep);
      std::ostringstream text;
      write_csv(text, data,
                "sscl gen kind=" + gen_kind + " n=" + std::to_string(gen_n) + " d=" +
                    std::to_string(gen_d) + " seed=" + std::to_string(gen_seed) +
                    " sep=" + format_double(gen_sep));
      emit(gen_out, text.str(), out);
      return 0;
    }

    if (train->parsed()) {
      train_h.validate();
      const auto data = train_data.load();
      TrainOptions opts;
      opts.jobs = train_jobs;
      const auto model = train_ovr(data, train_h, opts);
      save_model(train_out, model);
      logger()->info("trained {} classes on {} points ({})", model.num_classes(), data.size(),
                     train_h.describe());
      return 0;
    }

    if (predict_cmd->parsed()) {
      const auto model = load_model(model_path);
      // Peek at the arity: d+1 columns means a label column is present.
      std::ifstream probe(predict_data.path);
      if (!probe) throw DataError("cannot read " + predict_data.path);
      std::string line;
      std::size_t columns = 0;
      bool skipped_header = !predict_data.header;
      while (std::getline(probe, line)) {
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (!skipped_header) {
          skipped_header = true;
          continue;
        }
        columns = split_commas(body).size();
        break;
      }
      const auto d = static_cast<std::size_t>(model.dim());
      bool with_truth = false;
      Dataset data;
      if (columns == d + 1) {
        with_truth = true;
        data = load_csv(predict_data.path, predict_data.options());
      } else if (columns == d) {
        // No label column: read through a synthetic label so the parser can be reused.
        std::ifstream in(predict_data.path);
        std::ostringstream labelled;
        bool header_pending = predict_data.header;
        while (std::getline(in, line)) {
          const auto body = trim(line);
          if (body.empty() || body.front() == '#') continue;
          if (header_pending) {
            header_pending = false;
            continue;
          }
          labelled << "?," << body << '\n';
        }
        std::istringstream relabelled(labelled.str());
        data = parse_csv(relabelled);
      } else {
        throw InvalidArgument("data has " + std::to_string(columns) + " columns; model expects " +
                              std::to_string(d) + " features (optionally plus a label)");
      }
      const auto predictions = predict_batch(model, data, predict_jobs);
      std::ostringstream text;
      write_predictions_csv(text, model, data, predictions, with_truth,
                            "sscl predict model=" + model_path + " data=" + predict_data.path);
      emit(predict_out, text.str(), out);
      return 0;
    }

    auto experiment_header = [](const char* cmd, const Experiment& e, const std::string& extra) {
      return std::string("sscl ") + cmd + " " + e.data.describe() + " method=" + e.method + " " +
             e.h.describe() + " folds=" + std::to_string(e.folds) + " seed=" +
             std::to_string(e.seed) + (extra.empty() ? "" : " " + extra);
    };

    if (cv->parsed()) {
      const auto method = parse_method(cv_e.method);
      if (method == Method::sscl) cv_e.h.validate();
      const auto data = cv_e.data.load();
      const auto result =
          run_cv(data, method, cv_e.h, cv_e.folds, cv_e.seed, {cv_e.jobs, cv_e.timing});
      std::ostringstream text;
      write_cv_csv(text, {result}, experiment_header("cv", cv_e, ""));
      emit(cv_e.out, text.str(), out);
      logger()->info("{} mean accuracy {:.4f} (sd {:.4f})", result.method, result.mean, result.stddev);
      return result.any_failed() ? 1 : 0;
    }

    if (sw->parsed()) {
      const auto method = parse_method(sw_e.method);
      const auto param = parse_sweep_param(sw_param);
      const auto values = parse_values(sw_values);
      const auto data = sw_e.data.load();
      const auto points =
          sweep(data, method, sw_e.h, param, values, sw_e.folds, sw_e.seed, {sw_e.jobs, sw_e.timing});
      std::ostringstream text;
      write_sweep_csv(text, points,
                      experiment_header("sweep", sw_e, "param=" + sw_param + " values=" + sw_values));
      emit(sw_e.out, text.str(), out);
      bool failed = false;
      for (const auto& p : points) failed = failed || (!p.skipped && p.result.any_failed());
      return failed ? 1 : 0;
    }

    if (base->parsed()) {
      const auto data = base_e.data.load();
      std::vector<CVResult> results;
      for (const char* name : {"knn", "srbc"}) {
        if (base_e.method != "both" && base_e.method != name) continue;
        results.push_back(run_cv(data, parse_method(name), base_e.h, base_e.folds, base_e.seed,
                                 {base_e.jobs, base_e.timing}));
      }
      std::ostringstream text;
      write_cv_csv(text, results, experiment_header("baseline", base_e, ""));
      emit(base_e.out, text.str(), out);
      bool failed = false;
      for (const auto& r : results) failed = failed || r.any_failed();
      return failed ? 1 : 0;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace sscl::cli
