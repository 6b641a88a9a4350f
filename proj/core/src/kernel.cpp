#include "kst/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kst/error.hpp"

namespace kst {
namespace {

void require_finite(const double* data, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::isfinite(data[i])) {
      throw Error(ErrorCode::NonFiniteInput, "non-finite coordinate at index " + std::to_string(i));
    }
  }
}

double median_of(std::vector<double>& values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double checked_median(std::vector<double>& distances) {
  const double median = median_of(distances);
  if (!(median > 0.0)) {
    throw Error(ErrorCode::DegenerateBandwidth, "median pairwise distance is zero");
  }
  return median;
}

}  // namespace

BaseKernelSpec BaseKernelSpec::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "kernel bandwidth must be positive and finite");
  }
  return BaseKernelSpec(KernelKind::Gaussian, sigma);
}

double kernel_from_sq_distance(double sq_distance, const BaseKernelSpec& spec) noexcept {
  const double sigma = spec.sigma();
  return std::exp(-sq_distance / (2.0 * sigma * sigma));
}

double gaussian_kernel(std::span<const double> x, std::span<const double> y,
                       const BaseKernelSpec& spec) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::DimensionMismatch,
                "vectors of dimension " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  require_finite(x.data(), x.size());
  require_finite(y.data(), y.size());
  return kernel_from_sq_distance(squared_distance(x.data(), y.data(), x.size()), spec);
}

Eigen::MatrixXd pairwise_sq_distances(const PointMatrix& points) {
  const auto n = points.rows();
  const auto dim = static_cast<std::size_t>(points.cols());
  require_finite(points.data(), static_cast<std::size_t>(points.size()));
  Eigen::MatrixXd sq(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    sq(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double value = squared_distance(points.row(i).data(), points.row(j).data(), dim);
      sq(i, j) = value;
      sq(j, i) = value;
    }
  }
  return sq;
}

double median_heuristic(const PointMatrix& points) {
  if (points.rows() < 2) {
    throw Error(ErrorCode::InsufficientData, "median heuristic needs at least 2 points");
  }
  require_finite(points.data(), static_cast<std::size_t>(points.size()));
  const auto n = points.rows();
  const auto dim = static_cast<std::size_t>(points.cols());
  std::vector<double> distances;
  distances.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      distances.push_back(std::sqrt(squared_distance(points.row(i).data(), points.row(j).data(), dim)));
    }
  }
  return checked_median(distances);
}

double median_heuristic(const Eigen::MatrixXd& sq_distances, std::span<const std::size_t> rows) {
  if (rows.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "median heuristic needs at least 2 points");
  }
  std::vector<double> distances;
  distances.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      distances.push_back(std::sqrt(sq_distances(static_cast<Eigen::Index>(rows[i]),
                                                 static_cast<Eigen::Index>(rows[j]))));
    }
  }
  return checked_median(distances);
}

Eigen::MatrixXd gram_matrix(const PointMatrix& a, const PointMatrix& b, const BaseKernelSpec& spec) {
  if (a.cols() != b.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "point dimensions " + std::to_string(a.cols()) + " and " + std::to_string(b.cols()));
  }
  require_finite(a.data(), static_cast<std::size_t>(a.size()));
  require_finite(b.data(), static_cast<std::size_t>(b.size()));
  const auto dim = static_cast<std::size_t>(a.cols());
  Eigen::MatrixXd gram(a.rows(), b.rows());
  if (&a == &b) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      gram(i, i) = kernel_from_sq_distance(0.0, spec);
      for (Eigen::Index j = i + 1; j < b.rows(); ++j) {
        const double value =
            kernel_from_sq_distance(squared_distance(a.row(i).data(), b.row(j).data(), dim), spec);
        gram(i, j) = value;
        gram(j, i) = value;
      }
    }
    return gram;
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      gram(i, j) = kernel_from_sq_distance(squared_distance(a.row(i).data(), b.row(j).data(), dim), spec);
    }
  }
  return gram;
}

PointMatrix to_point_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return PointMatrix(0, 0);
  const std::size_t dim = rows.front().size();
  PointMatrix points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) {
      throw Error(ErrorCode::DimensionMismatch,
                  "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                      " coordinates, expected " + std::to_string(dim));
    }
    std::copy(rows[i].begin(), rows[i].end(), points.row(static_cast<Eigen::Index>(i)).data());
  }
  return points;
}

}  // namespace kst
