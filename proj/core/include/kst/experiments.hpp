#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "kst/data_io.hpp"
#include "kst/ocsvm.hpp"
#include "kst/report.hpp"

namespace kst {

inline constexpr const char* kMethodSvm = "SVM+SetKernel";
inline constexpr const char* kMethodMmd = "MMD";
inline constexpr const char* kMethodFTest = "F-Test";
inline constexpr const char* kMethodTTest = "T-Test";

/// Settings shared by the three methods of a benchmark.
struct MethodConfigs {
  std::size_t set_size = 7;       ///< size of every training and test set
  OcsvmConfig svm{};              ///< svm.set_size is overwritten by set_size
  double svm_sigma = 10.0;        ///< fixed bandwidth of the SVM base kernel
  double mmd_alpha = 0.05;        ///< bandwidth comes from the median heuristic
  std::size_t mmd_bootstrap_iters = 100;
  double classical_alpha = 0.05;
};

struct GaussianBenchmarkConfig {
  std::vector<std::size_t> dims{2, 5, 10, 25, 50};
  double sigma1 = 1.5;  ///< training distribution N(0, sigma1^2 I)
  double sigma2 = 3.5;  ///< alternative N(0, sigma2^2 I)
  std::size_t repetitions = 100;
  std::size_t n_train = 250;
  std::size_t n_null = 1000;
  std::size_t n_alternative = 1000;
  std::size_t trials = 1000;  ///< test sets per side and repetition
  MethodConfigs methods{};
  std::uint64_t seed = 1;
  std::size_t threads = 0;  ///< 0 = hardware concurrency
};

struct ExpressionBenchmarkConfig {
  std::string dataset = "custom";
  bool synthetic_fixture = false;  ///< data came from make_expression_fixture
  std::size_t repetitions = 100;
  std::size_t trials = 1000;  ///< test sets per side and repetition
  MethodConfigs methods{.set_size = 7, .svm = {}, .svm_sigma = 1.0};
  std::uint64_t seed = 1;
  std::size_t threads = 0;
};

/// One evaluated test set, recorded on request for auditing.
struct TrialRecord {
  std::size_t dimension = 0;
  std::size_t repetition = 0;
  bool alternative = false;  ///< test set drawn from the alternative
  PointMatrix test_set;
  PointMatrix train_subset;  ///< compared against test_set by MMD and F/T
  double mmd_sigma = 0.0;
  double mmd_statistic = 0.0;
  double svm_score = 0.0;
  bool mmd_reject = false;
  bool svm_reject = false;
  bool classical_reject = false;
};

struct TrialLog {
  std::size_t max_records = 100;  ///< per (dimension, repetition)
  std::vector<TrialRecord> records;
};

/// Gaussian protocol: for each dimension and repetition draw n_train +
/// n_null points from P and n_alternative from Q; train the MMD threshold,
/// the one-class SVM and prepare the union F-test on the training sample;
/// then evaluate `trials` null and `trials` alternative test sets of
/// set_size points each. Repetition r of dimension d uses
/// derive_seed(derive_seed(seed, d), r) and repetitions run in parallel.
[[nodiscard]] TestReport run_gaussian_benchmark(const GaussianBenchmarkConfig& config, TrialLog* log = nullptr);

/// Expression protocol on a fixed split: train on train_positive, type-I
/// from leave-out subsets, type-II from negative subsets, union T-test as
/// the classical baseline. Each repetition redraws every random subset.
[[nodiscard]] TestReport run_expression_benchmark(const DatasetSplit& split, const ExpressionBenchmarkConfig& config,
                                                  TrialLog* log = nullptr);

}  // namespace kst
