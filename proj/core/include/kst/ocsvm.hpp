#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "kst/decision.hpp"
#include "kst/set_kernel.hpp"

namespace kst {

/// rho from the solved dual: median score over margin support vectors.
struct KktDerived {};

/// rho as the target_alpha quantile of decision scores of validation
/// subsets drawn from the training sample, so that the in-distribution
/// rejection rate is close to target_alpha.
///
/// With folds <= 1 the validation subsets are scored by the final model
/// itself. With folds = k >= 2 the sample is split into k folds; a model fit
/// on the other k-1 folds scores subsets drawn from each held-out fold, and
/// the pooled scores set rho for the model fit on everything.
struct CrossValidated {
  double target_alpha = 0.05;
  std::size_t validation_subsets = 200;  ///< total over all folds
  std::size_t folds = 1;
};

using RhoCalibration = std::variant<KktDerived, CrossValidated>;

enum class SubsetScheme {
  Random,  ///< l independent uniform subsets of fixed size
  Nested,  ///< prefixes X_1 of size 1 up to X_l of size l of a shuffled sample
};

struct OcsvmConfig {
  double nu = 0.1;
  std::size_t subset_count = 100;
  std::size_t set_size = 7;
  double solver_tolerance = 1e-6;
  std::size_t max_iterations = 0;  ///< 0 selects 100000 * subset_count
  RhoCalibration rho_calibration = CrossValidated{};
  SubsetScheme subset_scheme = SubsetScheme::Random;

  /// Throws InfeasibleNu when nu is outside (0, 1] or subset_count * nu < 1,
  /// InvalidArgument for other bad values.
  void validate() const;
  [[nodiscard]] std::size_t iteration_cap() const noexcept {
    return max_iterations > 0 ? max_iterations : 100000 * subset_count;
  }
  [[nodiscard]] double upper_bound() const noexcept {
    return 1.0 / (nu * static_cast<double>(subset_count));
  }
};

/// l subsets, subset i drawn without replacement using derive_seed(seed, i).
/// Throws InsufficientData when set_size exceeds the population.
[[nodiscard]] std::vector<IndexSet> sample_subset_indices(std::size_t population, std::size_t subset_count,
                                                          std::size_t set_size, std::uint64_t seed);

/// Nested prefixes of one shuffled ordering; subset i has i + 1 points.
[[nodiscard]] std::vector<IndexSet> nested_subset_indices(std::size_t population, std::size_t subset_count,
                                                          std::uint64_t seed);

[[nodiscard]] std::vector<SampleSet> sample_subsets(const SampleSet& x, std::size_t subset_count,
                                                    std::size_t set_size, std::uint64_t seed);

struct DualSolution {
  std::vector<double> alphas;
  double objective = 0.0;
  double kkt_gap = 0.0;
  std::size_t iterations = 0;
};

/// Called after every SMO step with the current objective value.
using SolverObserver = std::function<void(std::size_t iteration, double objective)>;

/// Minimizes 1/2 a'Qa subject to 0 <= a_i <= 1/(nu l) and sum a_i = 1.
///
/// Two-coordinate SMO: starting from the uniform point, each step moves mass
/// from the index with the largest gradient among those that can decrease
/// to the index with the smallest gradient among those that can increase,
/// by the exact line minimizer clipped to the box. The pairwise transfer
/// keeps sum a_i = 1. Stops when that maximal violating gap is at most the
/// tolerance; throws SolverDidNotConverge (carrying the last iterate) at the
/// iteration cap and InfeasibleNu for an empty feasible set.
[[nodiscard]] DualSolution solve_dual(const Eigen::MatrixXd& q, double nu, double tolerance,
                                      std::size_t max_iterations, const SolverObserver& observer = {});
[[nodiscard]] DualSolution solve_dual(const SetGram& gram, const OcsvmConfig& config);

struct RhoEstimate {
  double rho = 0.0;
  bool fallback = false;  ///< KktDerived found no margin support vector
};

/// Median of (Q a)_i over indices with 1e-7 < a_i < C - 1e-7. Without any
/// such index, falls back to the a-weighted mean score a'Qa.
[[nodiscard]] RhoEstimate kkt_rho(std::span<const double> alphas, const Eigen::MatrixXd& q, double upper_bound);

/// The ceil(target_alpha * n)-th smallest validation score.
[[nodiscard]] double validation_quantile(std::vector<double> scores, double target_alpha);

/// Trained model over index subsets of a pooled point set.
struct PooledOcsvm {
  std::vector<double> alphas;
  double rho = 0.0;
  std::vector<IndexSet> subsets;  ///< indices into the pool
  double objective_value = 0.0;
  double kkt_gap = 0.0;
  std::size_t iterations = 0;
  bool rho_fallback = false;
};

/// Algorithm: subsets of `train_rows` -> Set-Kernel Gram -> dual -> rho.
/// Subsets use derive_seed(seed, 0), validation subsets derive_seed(seed, 1).
[[nodiscard]] PooledOcsvm train_pooled(const PooledSetKernel& pool, std::span<const std::size_t> train_rows,
                                       const OcsvmConfig& config, std::uint64_t seed);

/// sum_i a_i K(X_i, V) over the pool, without rho. Terms with a_i == 0 are
/// skipped; they contribute exactly nothing.
[[nodiscard]] double decision_value(const PooledOcsvm& model, const PooledSetKernel& pool,
                                    std::span<const std::size_t> test_rows);

struct ScoredDecision {
  Decision decision;
  double score;  ///< sum_i a_i K(X_i, Y) - rho
};

[[nodiscard]] constexpr Decision decision_from_score(double score) noexcept {
  return score >= 0.0 ? Decision::Same : Decision::Different;
}

struct OcsvmModel {
  std::vector<double> alphas;
  double rho = 0.0;
  std::vector<SampleSet> training_subsets;
  BaseKernelSpec kernel;
  double objective_value = 0.0;
  double nu = 0.1;
  std::size_t set_size = 0;
  bool rho_fallback = false;

  [[nodiscard]] std::size_t dim() const noexcept {
    return training_subsets.empty() ? 0 : training_subsets.front().dim();
  }
};

/// Full training on a sample. Throws InsufficientData when |X| < set_size.
[[nodiscard]] OcsvmModel train(const SampleSet& x, const OcsvmConfig& config, const BaseKernelSpec& spec,
                               std::uint64_t seed);

/// Same Same/Different rule as the pooled path; Same iff score >= 0.
[[nodiscard]] ScoredDecision decide(const OcsvmModel& model, const SampleSet& y);

/// Versioned plain-text model ("kst-ocsvm v1"): header, alpha vector, then
/// each training subset as rows of coordinates. Numbers use 17 significant
/// digits so a round trip reproduces every decision.
void write_model(std::ostream& out, const OcsvmModel& model);
[[nodiscard]] OcsvmModel read_model(std::istream& in);

}  // namespace kst
