// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
// if any selected criterion fails.
//
//   sscl_acceptance                 run all criteria
//   sscl_acceptance --criterion 3   run one

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "oracles.hpp"
#include "sscl/baselines.hpp"
#include "sscl/box_qp.hpp"
#include "sscl/dataset.hpp"
#include "sscl/error.hpp"
#include "sscl/harness.hpp"
#include "sscl/log.hpp"
#include "sscl/sparse_solver.hpp"
#include "sscl/text_io.hpp"
#include "sscl/trainer.hpp"

#ifdef SSCL_HAVE_CLI
#include "cli.hpp"
#endif

using namespace sscl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v, int digits = 4) { return format_double(v, digits); }

Eigen::VectorXd binary_signs(const Dataset& data) {
  Eigen::VectorXd s(data.size());
  for (Eigen::Index i = 0; i < data.size(); ++i) s(i) = data.labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
  return s;
}

Verdict solver_oracle() {
  std::mt19937_64 rng(20240601);
  double worst = 0.0, solver_time = 0.0;
  int failures = 0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index k = 1 + t % 6;
    const auto H = oracle::random_pd(k, rng, 0.05);
    const auto c = oracle::random_vector(k, rng, 2.0);
    const double gamma = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const L1QuadProblem p{H, c, gamma};
    const auto start = Clock::now();
    Eigen::VectorXd v;
    try {
      v = feature_sign_search(p);
    } catch (const std::exception&) {
      ++failures;
      continue;
    }
    solver_time += seconds_since(start);
    const double gap = std::abs(oracle::l1_objective(H, c, gamma, v) - oracle::sign_enumeration(H, c, gamma).objective);
    worst = std::max(worst, gap);
  }
  return {failures == 0 && worst <= 1e-8 && solver_time < 10.0,
          "200 problems, max objective gap " + num(worst, 3) + ", solver time " + num(solver_time, 3) +
              " s, solver errors " + std::to_string(failures)};
}

Verdict qp_kkt() {
  std::mt19937_64 rng(777);
  double worst_kkt = 0.0, worst_gap = 0.0, solver_time = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Eigen::Index n = 1 + t % 20;
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
    const double upper = std::uniform_real_distribution<double>(0.05, 3.0)(rng);
    const BoxQP p{oracle::random_psd(n, rank, rng), upper};
    const auto start = Clock::now();
    const auto s = solve_box_qp(p);
    solver_time += seconds_since(start);
    worst_kkt = std::max(worst_kkt, kkt_violation(p, s.delta));
    worst_gap = std::max(worst_gap, std::abs(s.objective - oracle::projected_gradient(p.Q, p.upper).objective));
  }
  return {worst_kkt <= 1e-6 && worst_gap <= 1e-6 && solver_time < 10.0,
          "200 problems, max KKT violation " + num(worst_kkt, 3) + ", max objective gap " +
              num(worst_gap, 3) + ", solver time " + num(solver_time, 3) + " s"};
}

Verdict monotonicity() {
  Hyperparams h;
  h.k = 5;
  int violations = 0, iterations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto raw = gen_synthetic(SyntheticKind::two_gauss, 100, 5, seed, 4.0);
    const auto data = Preprocessor::fit(raw).apply(raw);
    const auto m = train_binary(data, binary_signs(data), h);
    violations += m.monotonicity_violations;
    iterations += static_cast<int>(m.iterations.size());
  }
  return {violations == 0, "20 runs, " + std::to_string(iterations) + " outer iterations, " +
                               std::to_string(violations) + " violations"};
}

Verdict convexity_guard() {
  const auto raw = gen_synthetic(SyntheticKind::two_gauss, 100, 5, 42, 4.0);
  const auto data = Preprocessor::fit(raw).apply(raw);
  Hyperparams h;
  h.k = 5;
  h.beta = 0.5;
  h.alpha = std::sqrt(2.0 * h.beta);
  double min_eig = std::numeric_limits<double>::infinity();
  long problems = 0;
  TrainOptions opts;
  opts.on_vstep_problem = [&](Eigen::Index, const L1QuadProblem& p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.H, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    ++problems;
  };
  std::string boundary_error;
  try {
    train_binary(data, binary_signs(data), h, opts);
  } catch (const std::exception& e) {
    boundary_error = e.what();
  }

  Hyperparams over = h;
  over.alpha = 1.01 * std::sqrt(2.0 * over.beta);
  bool rejected = false;
  bool trained = false;
  TrainOptions watch;
  watch.on_vstep_problem = [&](Eigen::Index, const L1QuadProblem&) { trained = true; };
  try {
    over.validate();
  } catch (const InvalidArgument&) {
    rejected = true;
  }
  try {
    train_binary(data, binary_signs(data), over, watch);
    rejected = false;
  } catch (const InvalidArgument&) {
  }
  const bool pass = boundary_error.empty() && min_eig >= -1e-8 && rejected && !trained;
  return {pass, "boundary run " + (boundary_error.empty() ? std::string("completed") : "threw: " + boundary_error) +
                    ", " + std::to_string(problems) + " Hessians, min eigenvalue " + num(min_eig, 3) +
                    "; 1.01x boundary " + (rejected && !trained ? "rejected before training" : "NOT rejected")};
}

Verdict delta_zero_collapse() {
  const auto raw = gen_synthetic(SyntheticKind::two_gauss, 100, 5, 42, 4.0);
  const auto data = Preprocessor::fit(raw).apply(raw);
  Hyperparams h;
  h.k = 5;
  h.alpha = 1e-8;
  const auto m = train_binary(data, binary_signs(data), h);
  // Reference codes: contexts from an exhaustive neighbour sort, each point
  // coded by sign enumeration of its unregularized coding problem.
  double worst = 0.0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const auto ids = oracle::knn_by_sort(data.features, data.features.row(i).transpose(), h.k, i);
    Eigen::MatrixXd X(data.dim(), h.k);
    for (Eigen::Index c = 0; c < h.k; ++c) X.col(c) = data.features.row(ids[static_cast<std::size_t>(c)]).transpose();
    const Eigen::MatrixXd H = 2.0 * h.beta * X.transpose() * X;
    const Eigen::VectorXd c = -2.0 * h.beta * X.transpose() * data.features.row(i).transpose();
    const auto ref = oracle::sign_enumeration(H, c, h.gamma);
    worst = std::max(worst, (m.codes.V.col(i) - ref.v).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-4, "max per-coefficient difference " + num(worst, 3) + " over " +
                             std::to_string(data.size()) + " points"};
}

Verdict end_to_end_separable() {
  const auto start = Clock::now();
  const auto data = gen_synthetic(SyntheticKind::two_gauss, 200, 10, 42, 4.0);
  const Hyperparams h;
  const auto sscl_cv = run_cv(data, Method::sscl, h, 10, 42);
  const auto knn_cv = run_cv(data, Method::knn, h, 10, 42);
  const double elapsed = seconds_since(start);
  const bool pass = !sscl_cv.any_failed() && !knn_cv.any_failed() && sscl_cv.mean >= 0.95 &&
                    sscl_cv.mean >= knn_cv.mean - 0.02 && elapsed < 120.0 &&
                    sscl_cv.assignment == knn_cv.assignment;
  return {pass, "SSCL mean " + num(sscl_cv.mean) + ", KNN mean " + num(knn_cv.mean) + " (paired folds), " +
                    num(elapsed, 3) + " s total"};
}

fs::path arrhythmia_path() {
  if (const char* env = std::getenv("SSCL_ARRHYTHMIA"); env && *env) return env;
  return "data/arrhythmia.data";
}

Verdict arrhythmia() {
  const auto path = arrhythmia_path();
  if (!fs::exists(path)) {
    return {false, "dataset not found at " + path.string() +
                       " (place the UCI arrhythmia.data file there or set SSCL_ARRHYTHMIA)"};
  }
  const auto start = Clock::now();
  const auto data = load_arrhythmia(path);
  if (data.size() != 452 || data.dim() != 279) {
    return {false, "loader returned " + std::to_string(data.size()) + "x" + std::to_string(data.dim())};
  }
  const Hyperparams h;
  const auto s = run_cv(data, Method::sscl, h, 10, 42);
  const double sscl_seconds = seconds_since(start);
  const auto maj = run_cv(data, Method::majority, h, 10, 42);
  const auto knn = run_cv(data, Method::knn, h, 10, 42);
  const auto srbc = run_cv(data, Method::srbc, h, 10, 42);
  const bool pass = !s.any_failed() && sscl_seconds < 900.0 && s.mean > maj.mean;
  return {pass, "n=452 d=279, SSCL mean " + num(s.mean) + " in " + num(sscl_seconds, 3) +
                    " s, majority " + num(maj.mean) + "; reported only: SRBC " + num(srbc.mean) +
                    ", KNN " + num(knn.mean)};
}

#ifdef SSCL_HAVE_CLI
struct CliRun {
  int code = 0;
  std::string out;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sscl");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}
#endif

Verdict determinism() {
#ifndef SSCL_HAVE_CLI
  return {false, "built without the CLI"};
#else
  const char* env = std::getenv("SSCL_TEST_TMP");
  const fs::path dir = env ? fs::path(env) : fs::temp_directory_path() / "sscl_acceptance";
  fs::create_directories(dir);
  const auto data = (dir / "det.csv").string();
  const auto xor_data = (dir / "det_xor.csv").string();
  std::vector<std::string> mismatches;
  int compared = 0, planned = 0;

  // Each command runs three times: twice single-threaded, once with --jobs 3.
  auto check = [&](const std::string& name, const std::vector<std::string>& args, const std::string& out_file,
                   bool has_jobs) {
    ++planned;
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 3; ++rep) {
      auto a = args;
      const auto target = out_file.empty() ? std::string() : out_file + "." + std::to_string(rep);
      if (!target.empty()) a.insert(a.end(), {"--out", target});
      if (has_jobs && rep == 2) a.insert(a.end(), {"--jobs", "3"});
      const auto r = cli(a);
      if (r.code != 0) {
        mismatches.push_back(name + " exited " + std::to_string(r.code));
        return;
      }
      outputs.push_back(target.empty() ? r.out : slurp(target));
    }
    ++compared;
    if (outputs[0] != outputs[1] || outputs[0] != outputs[2]) mismatches.push_back(name);
  };

  check("gen", {"gen", "--n", "120", "--d", "6", "--seed", "5"}, (dir / "gen").string(), false);
  cli({"gen", "--n", "120", "--d", "6", "--seed", "5", "--out", data});
  cli({"gen", "--kind", "xor-ring", "--n", "80", "--d", "2", "--seed", "5", "--out", xor_data});
  check("train", {"train", "--data", data, "--k", "5"}, (dir / "model").string(), true);
  const auto model = (dir / "model.0").string();
  check("predict", {"predict", "--model", model, "--data", data}, (dir / "pred").string(), true);
  check("cv", {"cv", "--data", data, "--k", "5"}, (dir / "cv").string(), true);
  check("cv xor", {"cv", "--data", xor_data, "--k", "5", "--folds", "4"}, (dir / "cvx").string(), true);
  check("sweep", {"sweep", "--data", data, "--k", "5", "--folds", "5", "--param", "gamma"},
        (dir / "sweep").string(), true);
  check("baseline", {"baseline", "--data", data, "--k", "5"}, (dir / "base").string(), true);
  check("gen stdout", {"gen", "--n", "10", "--d", "2", "--out", "-"}, "", false);

  std::string detail = std::to_string(compared) + " commands compared across repeats and --jobs 1/3";
  for (const auto& m : mismatches) detail += "; differs: " + m;
  return {mismatches.empty() && compared == planned, detail};
#endif
}

Verdict sparsity_monotone() {
  const auto data = gen_synthetic(SyntheticKind::two_gauss, 200, 10, 42, 4.0);
  const auto points = sweep(data, Method::sscl, Hyperparams{}, SweepParam::gamma, {0.01, 0.1, 1.0, 10.0}, 10, 42);
  std::ostringstream curve;
  write_sweep_csv(curve, points);
  std::cout << curve.str();
  bool ok = true;
  double previous = -1.0;
  std::string detail = "zero fraction by gamma:";
  for (const auto& p : points) {
    if (p.skipped || p.result.any_failed()) {
      ok = false;
      detail += " " + num(p.value) + "=error";
      continue;
    }
    const double z = p.result.mean_zero_fraction();
    ok = ok && z >= previous;
    previous = z;
    detail += " " + num(p.value) + "->" + num(z) + " (acc " + num(p.result.mean) + ")";
  }
  return {ok, detail};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-9)")->check(CLI::Range(1, 9));
  CLI11_PARSE(app, argc, argv);
  if (!configure_logging_from_env()) {
    std::cerr << "SSCL_LOG must be one of quiet, info, debug\n";
    return 2;
  }

  const std::vector<Criterion> criteria{
      {"solver matches sign-enumeration oracle", solver_oracle},
      {"box QP KKT and projected-gradient agreement", qp_kkt},
      {"alternation monotonicity", monotonicity},
      {"convexity guard", convexity_guard},
      {"zero-multiplier collapse to plain coding", delta_zero_collapse},
      {"separable two-gauss end to end", end_to_end_separable},
      {"arrhythmia pipeline", arrhythmia},
      {"CLI determinism", determinism},
      {"sparsity non-decreasing in gamma", sparsity_monotone},
  };

  bool all = true;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    if (only != 0 && static_cast<int>(c) + 1 != only) continue;
    Verdict v;
    try {
      v = criteria[c].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "C" << c + 1 << ' ' << (v.pass ? "PASS" : "FAIL") << "  " << criteria[c].name << ": "
              << v.detail << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
