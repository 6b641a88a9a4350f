#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kst/kernel.hpp"

namespace kst {

/// A finite multiset of d-dimensional points, treated as a single element of
/// the RKHS of sets through its mean embedding. Point order carries no
/// meaning; duplicates are allowed.
class SampleSet {
 public:
  /// Throws EmptySet for zero rows, DimensionMismatch for zero columns and
  /// NonFiniteInput for NaN/Inf coordinates.
  explicit SampleSet(PointMatrix points, std::optional<std::string> label = std::nullopt);

  [[nodiscard]] static SampleSet from_rows(const std::vector<std::vector<double>>& rows,
                                           std::optional<std::string> label = std::nullopt);

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(points_.rows()); }
  [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(points_.cols()); }
  [[nodiscard]] std::span<const double> point(std::size_t i) const noexcept {
    return {points_.row(static_cast<Eigen::Index>(i)).data(), dim()};
  }
  [[nodiscard]] const PointMatrix& points() const noexcept { return points_; }
  [[nodiscard]] const std::optional<std::string>& label() const noexcept { return label_; }

  /// Rows selected by `indices`, in that order.
  [[nodiscard]] SampleSet subset(std::span<const std::size_t> indices) const;

 private:
  PointMatrix points_;
  std::optional<std::string> label_;
};

/// K(X, Y) = 1/(n m) sum_i sum_j k(x_i, y_j).
[[nodiscard]] double set_kernel(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec);

/// ||Gamma(X)||^2 = K(X, X).
[[nodiscard]] double set_norm_sq(const SampleSet& x, const BaseKernelSpec& spec);

struct SetDistance {
  double value;  ///< clamped at zero
  double raw;    ///< before clamping; may be slightly negative from cancellation
};

/// ||Gamma(X) - Gamma(Y)||^2 with both the clamped and the raw value.
[[nodiscard]] SetDistance set_distance(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec);

/// ||Gamma(X) - Gamma(Y)||^2 = K(X,X) - 2 K(X,Y) + K(Y,Y), clamped at zero.
[[nodiscard]] double set_distance_sq(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec);

/// Symmetric matrix of Set-Kernel values over a collection of sets.
struct SetGram {
  Eigen::MatrixXd values;
  BaseKernelSpec kernel;
  std::vector<std::string> source_ids;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

/// Entry (i, j) = K(sets_i, sets_j). Only the upper triangle is evaluated.
[[nodiscard]] SetGram set_gram(std::span<const SampleSet> sets, const BaseKernelSpec& spec);

/// Smallest eigenvalue of the Gram values (self-adjoint solver).
[[nodiscard]] double min_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Plain-text matrix: one row per line, space separated, 17 significant
/// digits.
void write_gram_text(std::ostream& out, const Eigen::MatrixXd& values);
[[nodiscard]] Eigen::MatrixXd read_gram_text(std::istream& in);

using IndexSet = std::vector<std::size_t>;

/// Pointwise kernel values over a fixed pool of points, so that Set-Kernel
/// quantities between index subsets of the pool are plain sums. Every
/// result is bit-identical to the corresponding SampleSet function applied
/// to the materialized subsets: entries come from kernel_from_sq_distance
/// and the double sums run in the same order.
class PooledSetKernel {
 public:
  PooledSetKernel(const PointMatrix& pool, const BaseKernelSpec& spec);
  /// Reuses squared distances computed by pairwise_sq_distances(pool).
  PooledSetKernel(const Eigen::MatrixXd& sq_distances, const BaseKernelSpec& spec);

  [[nodiscard]] const BaseKernelSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] std::size_t pool_size() const noexcept { return static_cast<std::size_t>(point_gram_.rows()); }
  [[nodiscard]] double point_kernel(std::size_t i, std::size_t j) const noexcept {
    return point_gram_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  [[nodiscard]] double set_kernel(std::span<const std::size_t> a, std::span<const std::size_t> b) const;
  [[nodiscard]] double set_norm_sq(std::span<const std::size_t> a) const { return set_kernel(a, a); }
  [[nodiscard]] SetDistance set_distance(std::span<const std::size_t> a, std::span<const std::size_t> b) const;
  [[nodiscard]] double set_distance_sq(std::span<const std::size_t> a, std::span<const std::size_t> b) const {
    return set_distance(a, b).value;
  }
  [[nodiscard]] SetGram set_gram(std::span<const IndexSet> sets) const;

 private:
  BaseKernelSpec spec_;
  Eigen::MatrixXd point_gram_;
};

}  // namespace kst
