#include "kst/set_kernel.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "kst/error.hpp"

namespace kst {
namespace {

void require_compatible(const SampleSet& x, const SampleSet& y) {
  if (x.dim() != y.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "sets of dimension " + std::to_string(x.dim()) + " and " + std::to_string(y.dim()));
  }
}

void require_nonempty(std::span<const std::size_t> indices) {
  if (indices.empty()) throw Error(ErrorCode::EmptySet, "index set is empty");
}

SetDistance combine(double norm_x, double cross, double norm_y) {
  const double raw = norm_x - 2.0 * cross + norm_y;
  return {raw < 0.0 ? 0.0 : raw, raw};
}

std::vector<std::string> ids_for(std::size_t count) {
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::size_t i = 0; i < count; ++i) ids.push_back("set" + std::to_string(i));
  return ids;
}

}  // namespace

SampleSet::SampleSet(PointMatrix points, std::optional<std::string> label)
    : points_(std::move(points)), label_(std::move(label)) {
  if (points_.rows() == 0) throw Error(ErrorCode::EmptySet, "a sample set needs at least one point");
  if (points_.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "points must have dimension >= 1");
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_.data()[i])) {
      throw Error(ErrorCode::NonFiniteInput,
                  "point " + std::to_string(i / points_.cols()) + " has a non-finite coordinate");
    }
  }
}

SampleSet SampleSet::from_rows(const std::vector<std::vector<double>>& rows, std::optional<std::string> label) {
  return SampleSet(to_point_matrix(rows), std::move(label));
}

SampleSet SampleSet::subset(std::span<const std::size_t> indices) const {
  PointMatrix rows(static_cast<Eigen::Index>(indices.size()), points_.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) {
      throw Error(ErrorCode::InvalidArgument, "subset index " + std::to_string(indices[i]) + " out of range");
    }
    rows.row(static_cast<Eigen::Index>(i)) = points_.row(static_cast<Eigen::Index>(indices[i]));
  }
  return SampleSet(std::move(rows), label_);
}

double set_kernel(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec) {
  require_compatible(x, y);
  const std::size_t dim = x.dim();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      sum += kernel_from_sq_distance(squared_distance(x.point(i).data(), y.point(j).data(), dim), spec);
    }
  }
  return sum / (static_cast<double>(x.size()) * static_cast<double>(y.size()));
}

double set_norm_sq(const SampleSet& x, const BaseKernelSpec& spec) { return set_kernel(x, x, spec); }

SetDistance set_distance(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec) {
  require_compatible(x, y);
  return combine(set_norm_sq(x, spec), set_kernel(x, y, spec), set_norm_sq(y, spec));
}

double set_distance_sq(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec) {
  return set_distance(x, y, spec).value;
}

SetGram set_gram(std::span<const SampleSet> sets, const BaseKernelSpec& spec) {
  if (sets.empty()) throw Error(ErrorCode::EmptySet, "set_gram needs at least one set");
  const auto l = static_cast<Eigen::Index>(sets.size());
  Eigen::MatrixXd values(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = i; j < l; ++j) {
      const double value = set_kernel(sets[static_cast<std::size_t>(i)], sets[static_cast<std::size_t>(j)], spec);
      values(i, j) = value;
      values(j, i) = value;
    }
  }
  std::vector<std::string> ids;
  ids.reserve(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) {
    ids.push_back(sets[i].label().value_or("set" + std::to_string(i)));
  }
  return SetGram{std::move(values), spec, std::move(ids)};
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

void write_gram_text(std::ostream& out, const Eigen::MatrixXd& values) {
  char buffer[40];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", values(i, j));
      if (j > 0) out << ' ';
      out << buffer;
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_gram_text(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::vector<double> row;
    std::string token;
    while (fields >> token) {
      char* end = nullptr;
      const double value = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') {
        throw Error(ErrorCode::ParseError, "bad matrix entry '" + token + "' on row " + std::to_string(rows.size() + 1));
      }
      row.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  for (const auto& row : rows) {
    if (row.size() != rows.size()) throw Error(ErrorCode::MalformedCsv, "Gram matrix text is not square");
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.size(); ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return values;
}

PooledSetKernel::PooledSetKernel(const PointMatrix& pool, const BaseKernelSpec& spec)
    : PooledSetKernel(pairwise_sq_distances(pool), spec) {}

PooledSetKernel::PooledSetKernel(const Eigen::MatrixXd& sq_distances, const BaseKernelSpec& spec)
    : spec_(spec), point_gram_(sq_distances.rows(), sq_distances.cols()) {
  for (Eigen::Index i = 0; i < sq_distances.rows(); ++i) {
    for (Eigen::Index j = 0; j < sq_distances.cols(); ++j) {
      point_gram_(i, j) = kernel_from_sq_distance(sq_distances(i, j), spec);
    }
  }
}

double PooledSetKernel::set_kernel(std::span<const std::size_t> a, std::span<const std::size_t> b) const {
  require_nonempty(a);
  require_nonempty(b);
  double sum = 0.0;
  for (const std::size_t i : a) {
    for (const std::size_t j : b) sum += point_kernel(i, j);
  }
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

SetDistance PooledSetKernel::set_distance(std::span<const std::size_t> a, std::span<const std::size_t> b) const {
  return combine(set_norm_sq(a), set_kernel(a, b), set_norm_sq(b));
}

SetGram PooledSetKernel::set_gram(std::span<const IndexSet> sets) const {
  if (sets.empty()) throw Error(ErrorCode::EmptySet, "set_gram needs at least one set");
  const auto l = static_cast<Eigen::Index>(sets.size());
  Eigen::MatrixXd values(l, l);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = i; j < l; ++j) {
      const double value = set_kernel(sets[static_cast<std::size_t>(i)], sets[static_cast<std::size_t>(j)]);
      values(i, j) = value;
      values(j, i) = value;
    }
  }
  return SetGram{std::move(values), spec_, ids_for(sets.size())};
}

}  // namespace kst
