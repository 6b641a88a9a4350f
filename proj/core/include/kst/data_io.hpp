#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kst/kernel.hpp"
#include "kst/set_kernel.hpp"

namespace kst {

/// n i.i.d. draws from N(mean, sigma^2 I) via Box-Muller over Rng(seed).
[[nodiscard]] SampleSet sample_gaussian(std::span<const double> mean, double sigma, std::size_t n, std::uint64_t seed);

/// Convenience for the zero-mean case used by the simulation protocols.
[[nodiscard]] PointMatrix sample_isotropic(std::size_t dim, double sigma, std::size_t n, std::uint64_t seed);

enum class Orientation { SamplesAsRows, SamplesAsColumns };

struct LabeledMatrix {
  PointMatrix values;                     ///< samples x features after orientation
  std::vector<std::string> row_labels;    ///< per sample, when present
  std::vector<std::string> column_names;  ///< per feature, when present
};

/// Comma-separated numeric matrix. A first line containing a non-numeric
/// cell (outside the first column) is a header; a non-numeric first cell in
/// the first body row marks a label column. Errors: MalformedCsv (ragged or
/// empty), ParseError (bad cell, with line and column), NonFiniteInput
/// (NaN/Inf), IoError (unreadable file).
[[nodiscard]] LabeledMatrix parse_matrix_csv(std::istream& in, Orientation orientation = Orientation::SamplesAsRows);
[[nodiscard]] LabeledMatrix load_matrix_csv(const std::filesystem::path& path,
                                            Orientation orientation = Orientation::SamplesAsRows);

/// One sample per line, 17 significant digits, optional header.
void write_matrix_csv(std::ostream& out, const PointMatrix& values, std::span<const std::string> header = {});

/// Positives split into train / leave-out, negatives passed through.
struct DatasetSplit {
  SampleSet train_positive;
  std::optional<SampleSet> leaveout_positive;  ///< empty when the leave-out count is 0
  SampleSet test_negative;
  std::vector<std::size_t> train_rows;     ///< rows of the positive matrix
  std::vector<std::size_t> leaveout_rows;  ///< rows of the positive matrix
  std::size_t set_size = 0;
  std::uint64_t seed = 0;
};

struct SplitCounts {
  std::size_t train_positive = 0;
  std::size_t leaveout_positive = 0;
  std::size_t set_size = 1;
};

/// Uniform random disjoint split; throws InsufficientData when the positive
/// matrix is too small.
[[nodiscard]] DatasetSplit split_dataset(const PointMatrix& positive, const PointMatrix& negative,
                                         const SplitCounts& counts, std::uint64_t seed);

/// Shape of one of the six gene-expression benchmarks (positive train /
/// leave-out counts, negative count, set size, dimension).
struct ExpressionDatasetShape {
  std::string_view key;
  std::string_view name;
  std::size_t train_positive;
  std::size_t leaveout_positive;
  std::size_t test_negative;
  std::size_t set_size;
  std::size_t dimension;

  [[nodiscard]] std::size_t positive_rows() const noexcept { return train_positive + leaveout_positive; }
  [[nodiscard]] SplitCounts counts() const noexcept { return {train_positive, leaveout_positive, set_size}; }
};

[[nodiscard]] std::span<const ExpressionDatasetShape> expression_dataset_shapes() noexcept;

/// Lookup by key (lung, leukemia, lymphoma_outcome, lymphoma, cns, colon).
/// Throws InvalidArgument for an unknown key.
[[nodiscard]] const ExpressionDatasetShape& find_expression_shape(std::string_view key);

struct ExpressionFixture {
  PointMatrix positive;
  PointMatrix negative;
};

/// Synthetic stand-in with the shape of a real dataset. Both classes are
/// tight clusters around expression-like prototypes (values in [1, 10)):
/// within-class spread is 1e-12 per coordinate, far below a unit kernel
/// bandwidth, while the negative prototype is shifted by 1 to 2 units on
/// every coordinate.
[[nodiscard]] ExpressionFixture make_expression_fixture(const ExpressionDatasetShape& shape, std::uint64_t seed);

/// Seed used for the shipped fixture manifest.
inline constexpr std::uint64_t kFixtureSeed = 20240101;

/// FNV-1a 64-bit hash of the bytes written by write_matrix_csv.
[[nodiscard]] std::uint64_t csv_checksum(const PointMatrix& values);

}  // namespace kst
