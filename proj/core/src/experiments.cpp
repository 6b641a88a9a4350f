#include "kst/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "kst/classical_tests.hpp"
#include "kst/error.hpp"
#include "kst/mmd.hpp"
#include "kst/random.hpp"

namespace kst {
namespace {

struct Counts {
  std::size_t null_trials = 0;
  std::size_t null_rejections = 0;
  std::size_t alt_trials = 0;
  std::size_t alt_acceptances = 0;
};

// Per-repetition outcome for the three methods, in svm, mmd, classical order.
struct RepOutcome {
  Counts svm;
  Counts mmd;
  Counts classical;
  std::vector<TrialRecord> records;
};

// Everything one repetition needs: a pooled point matrix and where the
// training sample and the two test populations live in it.
struct RepData {
  PointMatrix pool;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> null_rows;
  std::vector<std::size_t> alt_rows;
};

std::string fmt17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::vector<std::size_t> iota_rows(std::size_t begin, std::size_t count) {
  std::vector<std::size_t> rows(count);
  std::iota(rows.begin(), rows.end(), begin);
  return rows;
}

std::vector<std::size_t> pick(Rng& rng, const std::vector<std::size_t>& rows, std::size_t count) {
  const auto local = rng.sample_without_replacement(rows.size(), count);
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = rows[local[i]];
  return out;
}

PointMatrix gather(const PointMatrix& pool, const std::vector<std::size_t>& rows) {
  PointMatrix out(static_cast<Eigen::Index>(rows.size()), pool.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pool.row(static_cast<Eigen::Index>(rows[i]));
  return out;
}

OcsvmConfig svm_config_for(const MethodConfigs& methods) {
  OcsvmConfig svm = methods.svm;
  svm.set_size = methods.set_size;
  return svm;
}

// Trains all three methods on data.train_rows and evaluates the test sets.
// `sq` holds the pairwise squared distances of data.pool, and `svm_kernel`
// the SVM pooled kernel over the same pool.
RepOutcome run_repetition(const RepData& data, const Eigen::MatrixXd& sq, const PooledSetKernel& svm_kernel,
                          const MethodConfigs& methods, UnivariateTest classical, std::size_t trials,
                          std::uint64_t rep_seed, std::size_t dimension, std::size_t repetition,
                          std::size_t max_records) {
  const std::size_t set_size = methods.set_size;
  const double mmd_sigma = median_heuristic(sq, data.train_rows);
  const PooledSetKernel mmd_kernel(sq, BaseKernelSpec::gaussian(mmd_sigma));
  const MmdThreshold threshold = bootstrap_threshold(mmd_kernel, data.train_rows, set_size, methods.mmd_alpha,
                                                     methods.mmd_bootstrap_iters, derive_seed(rep_seed, 2));
  const PooledOcsvm svm = train_pooled(svm_kernel, data.train_rows, svm_config_for(methods), derive_seed(rep_seed, 3));

  RepOutcome outcome;
  for (const bool alternative : {false, true}) {
    const auto& source = alternative ? data.alt_rows : data.null_rows;
    if (source.size() < set_size) {
      throw Error(ErrorCode::InsufficientData, std::string(alternative ? "alternative" : "null") + " pool has " +
                                                   std::to_string(source.size()) + " points, need " +
                                                   std::to_string(set_size));
    }
    Rng test_rng = Rng::derive(rep_seed, alternative ? 5 : 4);
    Rng train_rng = Rng::derive(rep_seed, alternative ? 7 : 6);
    for (std::size_t t = 0; t < trials; ++t) {
      const auto test = pick(test_rng, source, set_size);
      const auto train_subset = pick(train_rng, data.train_rows, set_size);

      const double score = decision_value(svm, svm_kernel, test) - svm.rho;
      const bool svm_reject = decision_from_score(score) == Decision::Different;
      const double statistic = mmd_kernel.set_distance_sq(train_subset, test);
      const bool mmd_reject = statistic > threshold.value;
      const bool classical_reject =
          union_multivariate_test(data.pool, train_subset, test, classical, methods.classical_alpha).decision ==
          Decision::Different;

      for (auto [counts, reject] : {std::pair{&outcome.svm, svm_reject}, std::pair{&outcome.mmd, mmd_reject},
                                    std::pair{&outcome.classical, classical_reject}}) {
        if (alternative) {
          ++counts->alt_trials;
          if (!reject) ++counts->alt_acceptances;
        } else {
          ++counts->null_trials;
          if (reject) ++counts->null_rejections;
        }
      }
      if (outcome.records.size() < max_records) {
        outcome.records.push_back(TrialRecord{dimension, repetition, alternative, gather(data.pool, test),
                                              gather(data.pool, train_subset), mmd_sigma, statistic, score, mmd_reject,
                                              svm_reject, classical_reject});
      }
    }
  }
  return outcome;
}

// Runs job(i) for i in [0, count) on a small thread pool; results are
// written by index so scheduling cannot affect them. The first exception
// is rethrown after all workers stop.
template <typename Job>
void parallel_for(std::size_t count, std::size_t threads, Job job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();
  if (failure) std::rethrow_exception(failure);
}

MethodRecord aggregate(const std::string& method, const std::string& dataset, std::size_t dimension,
                       std::uint64_t seed, const std::vector<RepOutcome>& reps, Counts RepOutcome::*which) {
  MethodRecord record;
  record.method = method;
  record.dataset = dataset;
  record.dimension = dimension;
  record.repetitions = reps.size();
  record.seed = seed;
  std::vector<double> type_i;
  std::vector<double> type_ii;
  for (const auto& rep : reps) {
    const Counts& c = rep.*which;
    record.null_trials += c.null_trials;
    record.null_rejections += c.null_rejections;
    record.alternative_trials += c.alt_trials;
    record.alternative_acceptances += c.alt_acceptances;
    type_i.push_back(c.null_trials ? static_cast<double>(c.null_rejections) / static_cast<double>(c.null_trials) : 0.0);
    type_ii.push_back(c.alt_trials ? static_cast<double>(c.alt_acceptances) / static_cast<double>(c.alt_trials) : 0.0);
  }
  record.type_i = record.null_trials
                      ? static_cast<double>(record.null_rejections) / static_cast<double>(record.null_trials)
                      : 0.0;
  record.type_ii = record.alternative_trials ? static_cast<double>(record.alternative_acceptances) /
                                                   static_cast<double>(record.alternative_trials)
                                             : 0.0;
  auto standard_error = [](const std::vector<double>& values) {
    if (values.size() < 2) return 0.0;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1) / static_cast<double>(values.size()));
  };
  record.type_i_se = standard_error(type_i);
  record.type_ii_se = standard_error(type_ii);
  return record;
}

void snapshot_methods(std::map<std::string, std::string>& config, const MethodConfigs& methods) {
  config["set_size"] = std::to_string(methods.set_size);
  config["svm.nu"] = fmt17(methods.svm.nu);
  config["svm.subset_count"] = std::to_string(methods.svm.subset_count);
  config["svm.sigma"] = fmt17(methods.svm_sigma);
  config["svm.solver_tolerance"] = fmt17(methods.svm.solver_tolerance);
  config["svm.max_iterations"] = std::to_string(methods.svm.iteration_cap());
  config["svm.subset_scheme"] = methods.svm.subset_scheme == SubsetScheme::Nested ? "nested" : "random";
  if (const auto* cv = std::get_if<CrossValidated>(&methods.svm.rho_calibration)) {
    config["svm.rho"] = "cross-validated";
    config["svm.rho.target_alpha"] = fmt17(cv->target_alpha);
    config["svm.rho.validation_subsets"] = std::to_string(cv->validation_subsets);
    config["svm.rho.folds"] = std::to_string(cv->folds);
  } else {
    config["svm.rho"] = "kkt";
  }
  config["mmd.alpha"] = fmt17(methods.mmd_alpha);
  config["mmd.bootstrap_iters"] = std::to_string(methods.mmd_bootstrap_iters);
  config["mmd.sigma"] = "median-heuristic";
  config["classical.alpha"] = fmt17(methods.classical_alpha);
}

const std::string kTrialNote =
    "each repetition evaluates the configured number of test sets per side; every test set holds set_size points drawn "
    "without replacement from the held-out pool";
const std::string kUnionNote =
    "F/T baselines apply the univariate test to each coordinate and reject if any coordinate rejects (no multiplicity "
    "correction)";

}  // namespace

TestReport run_gaussian_benchmark(const GaussianBenchmarkConfig& config, TrialLog* log) {
  if (config.dims.empty() || config.repetitions == 0 || config.trials == 0) {
    throw Error(ErrorCode::InvalidArgument, "need at least one dimension, repetition and trial");
  }
  if (!(config.sigma1 > 0.0) || !(config.sigma2 > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigmas must be positive");
  svm_config_for(config.methods).validate();

  TestReport report;
  report.protocol = "gaussian";
  auto& snap = report.config;
  std::string dims;
  for (const auto d : config.dims) dims += (dims.empty() ? "" : ",") + std::to_string(d);
  snap["dims"] = dims;
  snap["sigma1"] = fmt17(config.sigma1);
  snap["sigma2"] = fmt17(config.sigma2);
  snap["repetitions"] = std::to_string(config.repetitions);
  snap["n_train"] = std::to_string(config.n_train);
  snap["n_null"] = std::to_string(config.n_null);
  snap["n_alternative"] = std::to_string(config.n_alternative);
  snap["trials"] = std::to_string(config.trials);
  snap["seed"] = std::to_string(config.seed);
  snapshot_methods(snap, config.methods);
  report.notes = {kTrialNote, kUnionNote};

  const BaseKernelSpec svm_spec = BaseKernelSpec::gaussian(config.methods.svm_sigma);
  const std::size_t max_records = log ? log->max_records : 0;
  for (const std::size_t dim : config.dims) {
    const std::uint64_t dim_seed = derive_seed(config.seed, dim);
    std::vector<RepOutcome> reps(config.repetitions);
    parallel_for(config.repetitions, config.threads, [&](std::size_t r) {
      const std::uint64_t rep_seed = derive_seed(dim_seed, r);
      try {
        RepData data;
        const PointMatrix p = sample_isotropic(dim, config.sigma1, config.n_train + config.n_null, derive_seed(rep_seed, 0));
        const PointMatrix q = sample_isotropic(dim, config.sigma2, config.n_alternative, derive_seed(rep_seed, 1));
        data.pool.resize(p.rows() + q.rows(), static_cast<Eigen::Index>(dim));
        data.pool.topRows(p.rows()) = p;
        data.pool.bottomRows(q.rows()) = q;
        data.train_rows = iota_rows(0, config.n_train);
        data.null_rows = iota_rows(config.n_train, config.n_null);
        data.alt_rows = iota_rows(config.n_train + config.n_null, config.n_alternative);
        const Eigen::MatrixXd sq = pairwise_sq_distances(data.pool);
        const PooledSetKernel svm_kernel(sq, svm_spec);
        reps[r] = run_repetition(data, sq, svm_kernel, config.methods, UnivariateTest::FTest, config.trials, rep_seed,
                                 dim, r, max_records);
      } catch (const Error& e) {
        throw Error(e.code(), "dim=" + std::to_string(dim) + " rep=" + std::to_string(r) + ": " + e.what());
      }
    });
    const std::string dataset = "gaussian";
    report.records.push_back(aggregate(kMethodSvm, dataset, dim, dim_seed, reps, &RepOutcome::svm));
    report.records.push_back(aggregate(kMethodMmd, dataset, dim, dim_seed, reps, &RepOutcome::mmd));
    report.records.push_back(aggregate(kMethodFTest, dataset, dim, dim_seed, reps, &RepOutcome::classical));
    if (log) {
      for (auto& rep : reps) {
        for (auto& rec : rep.records) log->records.push_back(std::move(rec));
      }
    }
  }
  return report;
}

TestReport run_expression_benchmark(const DatasetSplit& split, const ExpressionBenchmarkConfig& config, TrialLog* log) {
  if (config.repetitions == 0 || config.trials == 0) {
    throw Error(ErrorCode::InvalidArgument, "need at least one repetition and trial");
  }
  if (!split.leaveout_positive) {
    throw Error(ErrorCode::InsufficientData, "expression benchmark needs leave-out positives for type-I trials");
  }
  svm_config_for(config.methods).validate();
  const std::size_t dim = split.train_positive.dim();

  RepData data;
  const auto n_train = split.train_positive.size();
  const auto n_leave = split.leaveout_positive->size();
  const auto n_neg = split.test_negative.size();
  data.pool.resize(static_cast<Eigen::Index>(n_train + n_leave + n_neg), static_cast<Eigen::Index>(dim));
  data.pool.topRows(static_cast<Eigen::Index>(n_train)) = split.train_positive.points();
  data.pool.middleRows(static_cast<Eigen::Index>(n_train), static_cast<Eigen::Index>(n_leave)) =
      split.leaveout_positive->points();
  data.pool.bottomRows(static_cast<Eigen::Index>(n_neg)) = split.test_negative.points();
  data.train_rows = iota_rows(0, n_train);
  data.null_rows = iota_rows(n_train, n_leave);
  data.alt_rows = iota_rows(n_train + n_leave, n_neg);
  const Eigen::MatrixXd sq = pairwise_sq_distances(data.pool);
  const PooledSetKernel svm_kernel(sq, BaseKernelSpec::gaussian(config.methods.svm_sigma));

  TestReport report;
  report.protocol = "expression";
  auto& snap = report.config;
  snap["dataset"] = config.dataset;
  snap["data_source"] = config.synthetic_fixture ? "synthetic-fixture" : "user-matrix";
  snap["dimension"] = std::to_string(dim);
  snap["train_positive"] = std::to_string(n_train);
  snap["leaveout_positive"] = std::to_string(n_leave);
  snap["test_negative"] = std::to_string(n_neg);
  snap["split_seed"] = std::to_string(split.seed);
  snap["repetitions"] = std::to_string(config.repetitions);
  snap["trials"] = std::to_string(config.trials);
  snap["seed"] = std::to_string(config.seed);
  snapshot_methods(snap, config.methods);
  report.notes = {kTrialNote, kUnionNote,
                  "the positive split (train / leave-out) is drawn once and held fixed; repetitions redraw every "
                  "training, validation and test subset"};
  if (config.synthetic_fixture) {
    report.notes.push_back(
        "synthetic shape-matched fixtures stand in for the original gene expression data; MMD and T-Test "
        "percentages are therefore not comparable to published values on the real datasets");
  }

  const std::size_t max_records = log ? log->max_records : 0;
  std::vector<RepOutcome> reps(config.repetitions);
  parallel_for(config.repetitions, config.threads, [&](std::size_t r) {
    try {
      reps[r] = run_repetition(data, sq, svm_kernel, config.methods, UnivariateTest::TTest, config.trials,
                               derive_seed(config.seed, r), dim, r, max_records);
    } catch (const Error& e) {
      throw Error(e.code(), "dataset=" + config.dataset + " rep=" + std::to_string(r) + ": " + e.what());
    }
  });
  report.records.push_back(aggregate(kMethodSvm, config.dataset, dim, config.seed, reps, &RepOutcome::svm));
  report.records.push_back(aggregate(kMethodMmd, config.dataset, dim, config.seed, reps, &RepOutcome::mmd));
  report.records.push_back(aggregate(kMethodTTest, config.dataset, dim, config.seed, reps, &RepOutcome::classical));
  if (log) {
    for (auto& rep : reps) {
      for (auto& rec : rep.records) log->records.push_back(std::move(rec));
    }
  }
  return report;
}

}  // namespace kst
