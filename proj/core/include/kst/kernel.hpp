#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace kst {

/// One point per row. Row-major so that a point is a contiguous span.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class KernelKind { Gaussian };

/// Pointwise kernel k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
class BaseKernelSpec {
 public:
  /// Throws InvalidArgument unless sigma is positive and finite.
  [[nodiscard]] static BaseKernelSpec gaussian(double sigma);

  [[nodiscard]] KernelKind kind() const noexcept { return kind_; }
  [[nodiscard]] double sigma() const noexcept { return sigma_; }

  friend bool operator==(const BaseKernelSpec&, const BaseKernelSpec&) = default;

 private:
  BaseKernelSpec(KernelKind kind, double sigma) : kind_(kind), sigma_(sigma) {}

  KernelKind kind_;
  double sigma_;
};

/// Squared Euclidean distance, summed in coordinate order. Unchecked.
[[nodiscard]] inline double squared_distance(const double* x, const double* y, std::size_t dim) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double diff = x[k] - y[k];
    acc += diff * diff;
  }
  return acc;
}

/// Kernel value from an already computed squared distance. Every kernel
/// evaluation in the library funnels through here so cached and direct
/// evaluations agree to the last bit.
[[nodiscard]] double kernel_from_sq_distance(double sq_distance, const BaseKernelSpec& spec) noexcept;

/// Checked single evaluation. Throws DimensionMismatch or NonFiniteInput.
[[nodiscard]] double gaussian_kernel(std::span<const double> x, std::span<const double> y,
                                     const BaseKernelSpec& spec);

/// Median of all pairwise Euclidean distances (i < j). An even number of
/// pairs averages the two central order statistics.
/// Throws InsufficientData (< 2 points) or DegenerateBandwidth (median 0).
[[nodiscard]] double median_heuristic(const PointMatrix& points);

/// Same heuristic restricted to `rows` of a precomputed squared-distance
/// matrix. Gives the same value as median_heuristic on those points.
[[nodiscard]] double median_heuristic(const Eigen::MatrixXd& sq_distances,
                                      std::span<const std::size_t> rows);

/// All pairwise squared distances of the rows of `points` (symmetric, zero
/// diagonal).
[[nodiscard]] Eigen::MatrixXd pairwise_sq_distances(const PointMatrix& points);

/// Entry (i, j) = k(a_i, b_j). Throws DimensionMismatch / NonFiniteInput.
[[nodiscard]] Eigen::MatrixXd gram_matrix(const PointMatrix& a, const PointMatrix& b,
                                          const BaseKernelSpec& spec);

/// Convenience conversion from nested vectors. Throws DimensionMismatch on
/// ragged input.
[[nodiscard]] PointMatrix to_point_matrix(const std::vector<std::vector<double>>& rows);

}  // namespace kst
