#include "kst_cli/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "kst/classical_tests.hpp"
#include "kst/data_io.hpp"
#include "kst/error.hpp"
#include "kst/experiments.hpp"
#include "kst/mmd.hpp"
#include "kst/ocsvm.hpp"
#include "kst/random.hpp"
#include "kst/report.hpp"

namespace kst::cli {
namespace {

namespace fs = std::filesystem;

std::string fmt4(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

std::string fmt17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

// Settings shared by train, test and benchmark. Sigmas left unset fall back
// to the per-method defaults.
struct SvmOptions {
  double nu = 0.1;
  std::size_t subsets = 100;
  std::size_t set_size = 7;
  std::optional<double> sigma;
  std::string rho = "cv";
  double rho_alpha = 0.05;
  std::size_t validation_subsets = 200;
  std::size_t folds = 1;
  std::string scheme = "random";
  double tolerance = 1e-6;
  std::size_t max_iterations = 0;

  [[nodiscard]] OcsvmConfig config() const {
    OcsvmConfig c;
    c.nu = nu;
    c.subset_count = subsets;
    c.set_size = set_size;
    c.solver_tolerance = tolerance;
    c.max_iterations = max_iterations;
    c.subset_scheme = scheme == "nested" ? SubsetScheme::Nested : SubsetScheme::Random;
    if (rho == "kkt") {
      c.rho_calibration = KktDerived{};
    } else {
      c.rho_calibration = CrossValidated{rho_alpha, validation_subsets, folds};
    }
    return c;
  }
};

void add_svm_options(CLI::App* app, SvmOptions& o, bool with_sigma) {
  app->add_option("--nu", o.nu, "one-class SVM nu in (0, 1]")->capture_default_str();
  app->add_option("--subsets", o.subsets, "number l of random training subsets")->capture_default_str();
  app->add_option("--set-size", o.set_size, "points per training / validation / test set")->capture_default_str();
  if (with_sigma) app->add_option("--sigma", o.sigma, "Gaussian base-kernel bandwidth (svm default 10, 1 for benchmark expression; mmd uses the median heuristic)");
  app->add_option("--rho", o.rho, "rho calibration: cv or kkt")
      ->check(CLI::IsMember({"cv", "kkt"}))
      ->capture_default_str();
  app->add_option("--rho-alpha", o.rho_alpha, "target in-distribution rejection rate for cv")->capture_default_str();
  app->add_option("--validation-subsets", o.validation_subsets, "validation subsets scored for cv")
      ->capture_default_str();
  app->add_option("--folds", o.folds, "cv folds; 1 scores validation subsets with the final model")
      ->capture_default_str();
  app->add_option("--scheme", o.scheme, "subset scheme: random or nested")
      ->check(CLI::IsMember({"random", "nested"}))
      ->capture_default_str();
  app->add_option("--tolerance", o.tolerance, "SMO stopping tolerance on the KKT gap")->capture_default_str();
  app->add_option("--max-iterations", o.max_iterations, "SMO iteration cap; 0 means 100000 * subsets")
      ->capture_default_str();
}

struct MmdOptions {
  double alpha = 0.05;
  std::size_t iters = 100;
};

void add_mmd_options(CLI::App* app, MmdOptions& o) {
  app->add_option("--mmd-alpha", o.alpha, "MMD bootstrap type-I level")->capture_default_str();
  app->add_option("--mmd-iters", o.iters, "MMD bootstrap iterations")->capture_default_str();
}

Orientation parse_orientation(const std::string& name) {
  return name == "columns" ? Orientation::SamplesAsColumns : Orientation::SamplesAsRows;
}

void add_orientation(CLI::App* app, std::string& orientation) {
  app->add_option("--orientation", orientation, "CSV layout: rows (one sample per row) or columns")
      ->check(CLI::IsMember({"rows", "columns"}))
      ->capture_default_str();
}

// Resolves --seed; when absent draws one from the OS and reports it so the
// run can be repeated.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& out) {
  if (seed) return *seed;
  std::random_device device;
  const std::uint64_t drawn = (static_cast<std::uint64_t>(device()) << 32) ^ device();
  out << "seed: " << drawn << " (drawn; pass --seed " << drawn << " to repeat)\n";
  return drawn;
}

void check_output_path(const fs::path& path, bool force) {
  const fs::path parent = path.parent_path();
  if (!parent.empty() && !fs::is_directory(parent)) {
    throw Error(ErrorCode::IoError, "output directory does not exist: " + parent.string());
  }
  if (fs::exists(path) && !force) {
    throw Error(ErrorCode::IoError, path.string() + " already exists (pass --force to overwrite)");
  }
}

template <typename Writer>
void write_file(const fs::path& path, bool force, Writer writer) {
  check_output_path(path, force);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  writer(file);
  file.flush();
  if (!file) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

std::vector<std::string> coordinate_header(std::size_t dim) {
  std::vector<std::string> header(dim);
  for (std::size_t k = 0; k < dim; ++k) header[k] = "x" + std::to_string(k + 1);
  return header;
}

SampleSet load_set(const std::string& path, const std::string& orientation, const char* label) {
  LabeledMatrix m = load_matrix_csv(path, parse_orientation(orientation));
  if (m.values.rows() == 0) throw Error(ErrorCode::EmptySet, std::string(label) + " file has no rows: " + path);
  return SampleSet(std::move(m.values), std::string(label));
}

void echo_config(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& entries) {
  out << "config:\n";
  for (const auto& [key, value] : entries) out << "  " << key << " = " << value << '\n';
}

std::vector<std::pair<std::string, std::string>> svm_echo(const SvmOptions& o, double sigma) {
  return {{"nu", fmt4(o.nu)},
          {"subsets", std::to_string(o.subsets)},
          {"set-size", std::to_string(o.set_size)},
          {"sigma", fmt4(sigma)},
          {"rho", o.rho},
          {"rho-alpha", fmt4(o.rho_alpha)},
          {"validation-subsets", std::to_string(o.validation_subsets)},
          {"folds", std::to_string(o.folds)},
          {"scheme", o.scheme},
          {"tolerance", fmt4(o.tolerance)},
          {"max-iterations", std::to_string(o.config().iteration_cap())}};
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::size_t dim = 10;
  double sigma1 = 1.5;
  double sigma2 = 3.5;
  std::size_t n = 1250;
  std::size_t n_alt = 1000;
  std::string out_dir;
  std::string fixture;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const fs::path dir(a.out_dir);
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "output directory does not exist: " + a.out_dir);

  if (!a.fixture.empty()) {
    const auto& shape = find_expression_shape(a.fixture);
    const std::uint64_t seed = a.seed.value_or(kFixtureSeed);
    const ExpressionFixture fixture = make_expression_fixture(shape, seed);
    const auto header = coordinate_header(shape.dimension);
    write_file(dir / "positive.csv", a.force, [&](std::ostream& f) { write_matrix_csv(f, fixture.positive, header); });
    write_file(dir / "negative.csv", a.force, [&](std::ostream& f) { write_matrix_csv(f, fixture.negative, header); });
    out << "seed: " << seed << '\n';
    out << "fixture: " << shape.key << " (" << shape.name << ")\n";
    out << "wrote " << (dir / "positive.csv").string() << ": " << fixture.positive.rows() << " x " << shape.dimension
        << ", checksum " << csv_checksum(fixture.positive) << '\n';
    out << "wrote " << (dir / "negative.csv").string() << ": " << fixture.negative.rows() << " x " << shape.dimension
        << ", checksum " << csv_checksum(fixture.negative) << '\n';
    out << "split: train " << shape.train_positive << ", leave-out " << shape.leaveout_positive << ", set size "
        << shape.set_size << '\n';
    return 0;
  }

  if (a.dim == 0 || a.n == 0 || a.n_alt == 0) throw Error(ErrorCode::InvalidArgument, "dim, n and n-alt must be positive");
  if (!(a.sigma1 > 0.0) || !(a.sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigmas must be positive");
  const std::uint64_t seed = resolve_seed(a.seed, out);
  const PointMatrix p = sample_isotropic(a.dim, a.sigma1, a.n, derive_seed(seed, 0));
  const PointMatrix q = sample_isotropic(a.dim, a.sigma2, a.n_alt, derive_seed(seed, 1));
  const auto header = coordinate_header(a.dim);
  write_file(dir / "train.csv", a.force, [&](std::ostream& f) { write_matrix_csv(f, p, header); });
  write_file(dir / "test.csv", a.force, [&](std::ostream& f) { write_matrix_csv(f, q, header); });
  if (a.seed) out << "seed: " << seed << '\n';
  echo_config(out, {{"dim", std::to_string(a.dim)},
                    {"sigma1", fmt4(a.sigma1)},
                    {"sigma2", fmt4(a.sigma2)},
                    {"n", std::to_string(a.n)},
                    {"n-alt", std::to_string(a.n_alt)}});
  out << "wrote " << (dir / "train.csv").string() << ": " << a.n << " rows from N(0, " << fmt4(a.sigma1) << "^2 I)\n";
  out << "wrote " << (dir / "test.csv").string() << ": " << a.n_alt << " rows from N(0, " << fmt4(a.sigma2)
      << "^2 I)\n";
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string method = "svm-set";
  std::string train;
  std::string out;
  std::string orientation = "rows";
  SvmOptions svm;
  MmdOptions mmd;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  check_output_path(a.out, a.force);
  const SampleSet x = load_set(a.train, a.orientation, "train");
  const std::uint64_t seed = resolve_seed(a.seed, out);
  if (a.seed) out << "seed: " << seed << '\n';

  if (a.method == "svm-set") {
    const double sigma = a.svm.sigma.value_or(10.0);
    const OcsvmModel model = train(x, a.svm.config(), BaseKernelSpec::gaussian(sigma), seed);
    write_file(a.out, a.force, [&](std::ostream& f) { write_model(f, model); });
    auto echo = svm_echo(a.svm, sigma);
    echo.insert(echo.begin(), {"method", a.method});
    echo_config(out, echo);
    std::size_t support = 0;
    for (const double alpha : model.alphas) support += alpha > 0.0 ? 1 : 0;
    out << "rho: " << fmt4(model.rho) << (model.rho_fallback ? " (fallback: no margin support vectors)" : "") << '\n';
    out << "objective: " << fmt4(model.objective_value) << '\n';
    out << "support subsets: " << support << " of " << model.alphas.size() << '\n';
  } else {
    const double sigma = a.svm.sigma ? *a.svm.sigma : median_heuristic(x.points());
    const MmdThreshold threshold =
        bootstrap_threshold(x, a.svm.set_size, a.mmd.alpha, a.mmd.iters, BaseKernelSpec::gaussian(sigma), seed);
    write_file(a.out, a.force, [&](std::ostream& f) { write_threshold(f, threshold); });
    echo_config(out, {{"method", a.method},
                      {"set-size", std::to_string(a.svm.set_size)},
                      {"sigma", fmt4(sigma) + (a.svm.sigma ? "" : " (median heuristic)")},
                      {"mmd-alpha", fmt4(a.mmd.alpha)},
                      {"mmd-iters", std::to_string(a.mmd.iters)}});
    out << "threshold: " << fmt4(threshold.value) << '\n';
  }
  out << "wrote " << a.out << '\n';
  return 0;
}

// -------------------------------------------------------------------- test

struct TestArgs {
  std::string method = "svm-set";
  std::string train;
  std::string test;
  std::string model;
  std::string threshold_file;
  std::optional<double> threshold;
  std::string orientation = "rows";
  std::string out;
  double alpha = 0.05;
  bool full_train = false;
  SvmOptions svm;
  MmdOptions mmd;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

int cmd_test(const TestArgs& a, std::ostream& out) {
  if (!a.out.empty()) check_output_path(a.out, a.force);
  const SampleSet y = load_set(a.test, a.orientation, "test");
  std::optional<SampleSet> x;
  const bool needs_train = !(a.method == "svm-set" && !a.model.empty());
  if (needs_train) {
    if (a.train.empty()) throw Error(ErrorCode::InvalidArgument, "--train is required for method " + a.method);
    x = load_set(a.train, a.orientation, "train");
  }
  // a saved SVM model decides without randomness, so no seed is drawn
  const std::uint64_t seed = needs_train ? resolve_seed(a.seed, out) : 0;

  std::vector<std::pair<std::string, std::string>> echo{{"method", a.method}};
  std::vector<std::pair<std::string, std::string>> result;  // full precision, for --out
  Decision decision = Decision::Same;
  double statistic = 0.0;
  std::string statistic_name;

  if (a.method == "svm-set") {
    OcsvmModel model = [&] {
      if (!a.model.empty()) {
        std::ifstream file(a.model, std::ios::binary);
        if (!file) throw Error(ErrorCode::IoError, "cannot open model " + a.model);
        echo.emplace_back("model", a.model);
        return read_model(file);
      }
      const double sigma = a.svm.sigma.value_or(10.0);
      for (auto& entry : svm_echo(a.svm, sigma)) echo.push_back(entry);
      return train(*x, a.svm.config(), BaseKernelSpec::gaussian(sigma), seed);
    }();
    if (a.threshold) model.rho = *a.threshold;
    const ScoredDecision scored = decide(model, y);
    decision = scored.decision;
    statistic = scored.score;
    statistic_name = "score";
    result.emplace_back("rho", fmt17(model.rho));
    echo.emplace_back("rho", fmt4(model.rho));
  } else if (a.method == "mmd") {
    MmdThreshold threshold;
    if (!a.threshold_file.empty()) {
      std::ifstream file(a.threshold_file, std::ios::binary);
      if (!file) throw Error(ErrorCode::IoError, "cannot open threshold " + a.threshold_file);
      threshold = read_threshold(file);
      echo.emplace_back("threshold-file", a.threshold_file);
    } else {
      const double sigma = a.svm.sigma ? *a.svm.sigma : median_heuristic(x->points());
      const BaseKernelSpec spec = BaseKernelSpec::gaussian(sigma);
      if (a.threshold) {
        threshold = MmdThreshold{*a.threshold, a.mmd.alpha, a.mmd.iters, seed, a.svm.set_size, sigma};
      } else {
        threshold = bootstrap_threshold(*x, a.svm.set_size, a.mmd.alpha, a.mmd.iters, spec, derive_seed(seed, 0));
      }
      echo.emplace_back("mmd-alpha", fmt4(a.mmd.alpha));
      echo.emplace_back("mmd-iters", std::to_string(a.mmd.iters));
    }
    if (a.threshold) threshold.value = *a.threshold;
    echo.emplace_back("set-size", std::to_string(threshold.set_size));
    echo.emplace_back("sigma", fmt4(threshold.sigma));
    echo.emplace_back("threshold", fmt4(threshold.value));
    Rng rng = Rng::derive(seed, 1);
    const MmdTestResult r = mmd_two_sample_test(*x, y, threshold, BaseKernelSpec::gaussian(threshold.sigma), rng);
    decision = r.decision;
    statistic = r.statistic;
    statistic_name = "mmd";
    result.emplace_back("threshold", fmt17(threshold.value));
    result.emplace_back("sigma", fmt17(threshold.sigma));
  } else {
    const UnivariateTest test = a.method == "f-test" ? UnivariateTest::FTest : UnivariateTest::TTest;
    SampleSet reference = *x;
    if (!a.full_train) {
      const std::size_t m = std::min(x->size(), y.size());
      Rng rng = Rng::derive(seed, 2);
      reference = x->subset(rng.sample_without_replacement(x->size(), m));
    }
    echo.emplace_back("alpha", fmt4(a.alpha));
    echo.emplace_back("train-rows-used", std::to_string(reference.size()) + (a.full_train ? " (all)" : " (size-matched subset)"));
    const UnionTestResult r = union_multivariate_test(reference, y, test, a.alpha);
    decision = r.decision;
    statistic = static_cast<double>(r.first_rejecting_coordinate);
    statistic_name = "first-rejecting-coordinate";
    if (decision == Decision::Different) echo.emplace_back("first-rejecting-coordinate", std::to_string(r.first_rejecting_coordinate + 1));
  }
  if (needs_train) echo.emplace_back("seed", std::to_string(seed));

  out << "decision: " << to_string(decision) << '\n';
  if (a.method == "f-test" || a.method == "t-test") {
    out << "rejected coordinates start at: "
        << (decision == Decision::Different ? std::to_string(static_cast<std::size_t>(statistic) + 1) : "none") << '\n';
  } else {
    out << statistic_name << ": " << fmt4(statistic) << '\n';
  }
  echo_config(out, echo);

  if (!a.out.empty()) {
    write_file(a.out, a.force, [&](std::ostream& f) {
      f << "method=" << a.method << '\n';
      f << "decision=" << to_string(decision) << '\n';
      if (a.method == "f-test" || a.method == "t-test") {
        f << "first_rejecting_coordinate="
          << (decision == Decision::Different ? std::to_string(static_cast<std::size_t>(statistic) + 1) : "none") << '\n';
      } else {
        f << statistic_name << '=' << fmt17(statistic) << '\n';
      }
      for (const auto& [key, value] : result) f << key << '=' << value << '\n';
      if (needs_train) f << "seed=" << seed << '\n';
    });
  }
  return decision == Decision::Same ? kExitSame : kExitDifferent;
}

// --------------------------------------------------------------- benchmark

struct BenchmarkCommon {
  std::size_t reps = 100;
  std::size_t trials = 1000;
  std::size_t threads = 0;
  double alpha = 0.05;
  SvmOptions svm;
  MmdOptions mmd;
  std::string out;
  std::string csv;
  std::optional<std::uint64_t> seed;
  bool force = false;

  [[nodiscard]] MethodConfigs methods(double default_sigma) const {
    MethodConfigs m;
    m.set_size = svm.set_size;
    m.svm = svm.config();
    m.svm_sigma = svm.sigma.value_or(default_sigma);
    m.mmd_alpha = mmd.alpha;
    m.mmd_bootstrap_iters = mmd.iters;
    m.classical_alpha = alpha;
    return m;
  }
};

void add_benchmark_common(CLI::App* app, BenchmarkCommon& c) {
  app->add_option("--reps", c.reps, "repetitions")->capture_default_str();
  app->add_option("--trials", c.trials, "test sets per side and repetition")->capture_default_str();
  app->add_option("--threads", c.threads, "worker threads (0 = all cores); results do not depend on it")
      ->capture_default_str();
  app->add_option("--alpha", c.alpha, "level of the per-coordinate F / T tests")->capture_default_str();
  add_svm_options(app, c.svm, true);
  add_mmd_options(app, c.mmd);
  app->add_option("--out", c.out, "write the report as JSON to this path");
  app->add_option("--csv", c.csv, "write the report as CSV to this path");
  app->add_option("--seed", c.seed, "master seed");
  app->add_flag("--force", c.force, "overwrite existing output files");
}

void emit_report(const BenchmarkCommon& c, const TestReport& report, std::uint64_t seed, std::ostream& out) {
  if (c.seed) out << "seed: " << seed << '\n';
  print_report_table(out, report);
  if (!c.out.empty()) {
    write_file(c.out, c.force, [&](std::ostream& f) { write_report_json(f, report); });
    out << "wrote " << c.out << '\n';
  }
  if (!c.csv.empty()) {
    write_file(c.csv, c.force, [&](std::ostream& f) { write_report_csv(f, report); });
    out << "wrote " << c.csv << '\n';
  }
}

struct GaussianArgs {
  BenchmarkCommon common;
  std::vector<std::size_t> dims{2, 5, 10, 25, 50};
  double sigma1 = 1.5;
  double sigma2 = 3.5;
  std::size_t n_train = 250;
  std::size_t n_null = 1000;
  std::size_t n_alt = 1000;
};

int cmd_benchmark_gaussian(const GaussianArgs& a, std::ostream& out) {
  if (!a.common.out.empty()) check_output_path(a.common.out, a.common.force);
  if (!a.common.csv.empty()) check_output_path(a.common.csv, a.common.force);
  GaussianBenchmarkConfig config;
  config.dims = a.dims;
  config.sigma1 = a.sigma1;
  config.sigma2 = a.sigma2;
  config.repetitions = a.common.reps;
  config.n_train = a.n_train;
  config.n_null = a.n_null;
  config.n_alternative = a.n_alt;
  config.trials = a.common.trials;
  config.methods = a.common.methods(10.0);
  config.threads = a.common.threads;
  config.seed = resolve_seed(a.common.seed, out);
  const TestReport report = run_gaussian_benchmark(config);
  emit_report(a.common, report, config.seed, out);
  return 0;
}

struct ExpressionArgs {
  BenchmarkCommon common;
  std::string fixture;
  std::optional<std::uint64_t> fixture_seed;
  std::string positive;
  std::string negative;
  std::string orientation = "rows";
  std::optional<std::size_t> train_positive;
  std::optional<std::size_t> leaveout;
  std::string name = "custom";
  bool set_size_given = false;
};

int cmd_benchmark_expression(ExpressionArgs a, std::ostream& out) {
  if (!a.common.out.empty()) check_output_path(a.common.out, a.common.force);
  if (!a.common.csv.empty()) check_output_path(a.common.csv, a.common.force);
  PointMatrix positive;
  PointMatrix negative;
  SplitCounts counts;
  std::string dataset = a.name;
  bool synthetic = false;
  if (!a.fixture.empty()) {
    const auto& shape = find_expression_shape(a.fixture);
    ExpressionFixture fixture = make_expression_fixture(shape, a.fixture_seed.value_or(kFixtureSeed));
    positive = std::move(fixture.positive);
    negative = std::move(fixture.negative);
    counts = shape.counts();
    dataset = std::string(shape.key);
    synthetic = true;
  } else {
    if (a.positive.empty() || a.negative.empty()) {
      throw Error(ErrorCode::InvalidArgument, "give --fixture or both --positive and --negative");
    }
    positive = load_matrix_csv(a.positive, parse_orientation(a.orientation)).values;
    negative = load_matrix_csv(a.negative, parse_orientation(a.orientation)).values;
    const auto rows = static_cast<std::size_t>(positive.rows());
    counts.leaveout_positive = a.leaveout.value_or(rows / 3);
    counts.train_positive = a.train_positive.value_or(rows - std::min(rows, counts.leaveout_positive));
    counts.set_size = a.common.svm.set_size;
  }
  // The fixture table carries each dataset's set size unless overridden.
  if (synthetic && !a.set_size_given) a.common.svm.set_size = counts.set_size;
  if (a.train_positive) counts.train_positive = *a.train_positive;
  if (a.leaveout) counts.leaveout_positive = *a.leaveout;
  counts.set_size = a.common.svm.set_size;

  const std::uint64_t seed = resolve_seed(a.common.seed, out);
  const DatasetSplit split = split_dataset(positive, negative, counts, derive_seed(seed, 0));
  ExpressionBenchmarkConfig config;
  config.dataset = dataset;
  config.synthetic_fixture = synthetic;
  config.repetitions = a.common.reps;
  config.trials = a.common.trials;
  config.methods = a.common.methods(1.0);
  config.seed = derive_seed(seed, 1);
  config.threads = a.common.threads;
  TestReport report = run_expression_benchmark(split, config);
  report.config["master_seed"] = std::to_string(seed);
  if (synthetic) report.config["fixture_seed"] = std::to_string(a.fixture_seed.value_or(kFixtureSeed));
  emit_report(a.common, report, seed, out);
  return 0;
}

// ------------------------------------------------------------ config files

// Reads key=value lines ('#' comments, blank lines ignored).
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot open config file " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t number = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  while (std::getline(file, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, path + ":" + std::to_string(number) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    if (key.empty()) throw Error(ErrorCode::ParseError, path + ":" + std::to_string(number) + ": empty key");
    entries.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return entries;
}

// Splices config-file entries into the argument list as --key=value tokens
// unless the command line already sets that key; command-line flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (!config_path) return args;

  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    for (const auto& arg : args) {
      if (arg == flag || arg.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_config_file(*config_path)) {
    if (!given(key)) injected.push_back("--" + key + "=" + value);
  }
  // Options belong to the leaf subcommand, so insert after it.
  std::size_t insert_at = 0;
  while (insert_at < args.size() && args[insert_at].rfind("-", 0) != 0 &&
         (insert_at == 0 || args[insert_at - 1] == "benchmark")) {
    ++insert_at;
  }
  std::vector<std::string> expanded(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(insert_at));
  expanded.insert(expanded.end(), injected.begin(), injected.end());
  expanded.insert(expanded.end(), args.begin() + static_cast<std::ptrdiff_t>(insert_at), args.end());
  return expanded;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-sample hypothesis testing with a one-class SVM over set kernels", "kst"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kst 0.1.0");
  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value file; keys are flag names, flags on the command line win");
  };

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "write Gaussian or expression-fixture samples as CSV");
  simulate->add_option("--dim", sim.dim, "dimension")->capture_default_str();
  simulate->add_option("--sigma1", sim.sigma1, "standard deviation of P (train.csv)")->capture_default_str();
  simulate->add_option("--sigma2", sim.sigma2, "standard deviation of Q (test.csv)")->capture_default_str();
  simulate->add_option("--n", sim.n, "rows drawn from P")->capture_default_str();
  simulate->add_option("--n-alt", sim.n_alt, "rows drawn from Q")->capture_default_str();
  simulate->add_option("--out-dir", sim.out_dir, "existing directory for the CSV files")->required();
  simulate->add_option("--fixture", sim.fixture, "write the expression fixture with this key instead")
      ->check(CLI::IsMember({"lung", "leukemia", "lymphoma_outcome", "lymphoma", "cns", "colon"}));
  simulate->add_option("--seed", sim.seed, "seed (fixtures default to the published fixture seed)");
  simulate->add_flag("--force", sim.force, "overwrite existing files");
  add_config(simulate);

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "fit an SVM+SetKernel model or an MMD threshold");
  train_cmd->add_option("--method", tr.method, "svm-set or mmd")
      ->check(CLI::IsMember({"svm-set", "mmd"}))
      ->capture_default_str();
  train_cmd->add_option("--train", tr.train, "training sample CSV")->required();
  train_cmd->add_option("--out", tr.out, "model / threshold output file")->required();
  add_orientation(train_cmd, tr.orientation);
  add_svm_options(train_cmd, tr.svm, true);
  add_mmd_options(train_cmd, tr.mmd);
  train_cmd->add_option("--seed", tr.seed, "seed");
  train_cmd->add_flag("--force", tr.force, "overwrite an existing output file");
  add_config(train_cmd);

  TestArgs te;
  auto* test_cmd = app.add_subcommand("test", "decide whether a test set comes from the training distribution");
  test_cmd->add_option("--method", te.method, "svm-set, mmd, f-test or t-test")
      ->check(CLI::IsMember({"svm-set", "mmd", "f-test", "t-test"}))
      ->capture_default_str();
  test_cmd->add_option("--train", te.train, "training sample CSV");
  test_cmd->add_option("--test", te.test, "test set CSV")->required();
  test_cmd->add_option("--model", te.model, "svm-set model from `kst train`");
  test_cmd->add_option("--threshold-file", te.threshold_file, "MMD threshold from `kst train --method mmd`");
  test_cmd->add_option("--threshold", te.threshold, "override the MMD threshold or the SVM rho");
  test_cmd->add_option("--alpha", te.alpha, "level of the per-coordinate F / T tests")->capture_default_str();
  test_cmd->add_flag("--full-train", te.full_train, "F / T tests use every training row instead of a size-matched subset");
  test_cmd->add_option("--out", te.out, "also write the result as key=value lines");
  add_orientation(test_cmd, te.orientation);
  add_svm_options(test_cmd, te.svm, true);
  add_mmd_options(test_cmd, te.mmd);
  test_cmd->add_option("--seed", te.seed, "seed");
  test_cmd->add_flag("--force", te.force, "overwrite an existing --out file");
  add_config(test_cmd);

  auto* bench = app.add_subcommand("benchmark", "rerun the Gaussian or expression benchmark protocols");
  bench->require_subcommand(1);

  GaussianArgs ga;
  auto* gauss = bench->add_subcommand("gaussian", "P = N(0, sigma1^2 I) against Q = N(0, sigma2^2 I)");
  gauss->add_option("--dims", ga.dims, "comma-separated dimensions")->delimiter(',')->capture_default_str();
  gauss->add_option("--sigma1", ga.sigma1, "standard deviation of P")->capture_default_str();
  gauss->add_option("--sigma2", ga.sigma2, "standard deviation of Q")->capture_default_str();
  gauss->add_option("--n-train", ga.n_train, "training points from P")->capture_default_str();
  gauss->add_option("--n-null", ga.n_null, "held-out points from P")->capture_default_str();
  gauss->add_option("--n-alt", ga.n_alt, "points from Q")->capture_default_str();
  add_benchmark_common(gauss, ga.common);
  add_config(gauss);

  ExpressionArgs ea;
  auto* expr = bench->add_subcommand("expression", "positive/negative matrices: type-I on leave-out, type-II on negatives");
  expr->add_option("--fixture", ea.fixture, "synthetic shape-matched fixture key")
      ->check(CLI::IsMember({"lung", "leukemia", "lymphoma_outcome", "lymphoma", "cns", "colon"}));
  expr->add_option("--fixture-seed", ea.fixture_seed, "fixture generator seed");
  expr->add_option("--positive", ea.positive, "positive-class CSV");
  expr->add_option("--negative", ea.negative, "negative-class CSV");
  expr->add_option("--name", ea.name, "dataset name for the report")->capture_default_str();
  expr->add_option("--train-positive", ea.train_positive, "positives used for training");
  expr->add_option("--leaveout", ea.leaveout, "positives held out for type-I");
  add_orientation(expr, ea.orientation);
  add_benchmark_common(expr, ea.common);
  add_config(expr);

  try {
    std::vector<std::string> expanded = expand_config(args);
    std::reverse(expanded.begin(), expanded.end());
    app.parse(expanded);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (test_cmd->parsed()) return cmd_test(te, out);
    if (gauss->parsed()) return cmd_benchmark_gaussian(ga, out);
    if (expr->parsed()) {
      ea.set_size_given = expr->get_option("--set-size")->count() > 0;
      return cmd_benchmark_expression(ea, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace kst::cli
