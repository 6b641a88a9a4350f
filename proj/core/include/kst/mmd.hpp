#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kst/decision.hpp"
#include "kst/random.hpp"
#include "kst/set_kernel.hpp"

namespace kst {

/// Rejection threshold for the empirical MMD statistic, together with the
/// settings that reproduce it.
struct MmdThreshold {
  double value = 0.0;
  double alpha = 0.05;
  std::size_t bootstrap_iters = 100;
  std::uint64_t seed = 0;
  std::size_t set_size = 1;
  double sigma = 1.0;
};

/// Biased (V-statistic) empirical MMD. Shares its code path with
/// set_distance_sq, so the two agree bit for bit.
[[nodiscard]] double empirical_mmd(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec);

/// Null statistics: for each iteration two disjoint uniform subsets of
/// `set_size` training rows are drawn and their empirical MMD recorded.
/// Iteration i uses the stream derive_seed(seed, i).
[[nodiscard]] std::vector<double> bootstrap_null_statistics(const PooledSetKernel& pool,
                                                            std::span<const std::size_t> train_rows,
                                                            std::size_t set_size, std::size_t iters,
                                                            std::uint64_t seed);

/// The ceil((1 - alpha) * n)-th order statistic of `null_stats`.
[[nodiscard]] double null_quantile(std::vector<double> null_stats, double alpha);

/// Throws InsufficientData when |X| < 2 * set_size and InvalidArgument for
/// alpha outside (0, 1) or zero iterations.
[[nodiscard]] MmdThreshold bootstrap_threshold(const SampleSet& x, std::size_t set_size, double alpha,
                                               std::size_t iters, const BaseKernelSpec& spec,
                                               std::uint64_t seed);

/// Same procedure on rows of a pooled kernel (the benchmark harness path).
[[nodiscard]] MmdThreshold bootstrap_threshold(const PooledSetKernel& pool,
                                               std::span<const std::size_t> train_rows,
                                               std::size_t set_size, double alpha, std::size_t iters,
                                               std::uint64_t seed);

struct MmdTestResult {
  Decision decision;
  double statistic;
  std::vector<std::size_t> train_subset;  ///< rows of X_train compared against Y
};

/// Compares Y against a fresh uniform subset of X_train of the threshold's
/// set size. Different iff the statistic exceeds the threshold.
[[nodiscard]] MmdTestResult mmd_two_sample_test(const SampleSet& x_train, const SampleSet& y,
                                                const MmdThreshold& threshold, const BaseKernelSpec& spec,
                                                Rng& rng);

void write_threshold(std::ostream& out, const MmdThreshold& threshold);
[[nodiscard]] MmdThreshold read_threshold(std::istream& in);

}  // namespace kst
