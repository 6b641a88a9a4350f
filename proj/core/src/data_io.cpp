#include "kst/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <streambuf>

#include "kst/error.hpp"
#include "kst/random.hpp"

namespace kst {
namespace {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

// Parses a whole cell as a double; nullopt when it is not a number at all.
std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ptr != cell.data() + cell.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) return std::numeric_limits<double>::infinity();
  if (ec != std::errc{}) return std::nullopt;
  return value;
}

constexpr std::array<ExpressionDatasetShape, 6> kShapes{{
    {"lung", "Lung Cancer Women's Hospital", 21, 10, 150, 7, 12533},
    {"leukemia", "Leukemia", 17, 8, 47, 5, 7129},
    {"lymphoma_outcome", "Lymphoma Harvard Outcome", 17, 9, 32, 6, 7129},
    {"lymphoma", "Lymphoma Harvard", 13, 6, 58, 4, 7129},
    {"cns", "Central Nervous System Tumor", 14, 7, 39, 4, 7129},
    {"colon", "Colon Tumor", 15, 7, 40, 4, 2000},
}};

class Fnv1aBuffer : public std::streambuf {
 public:
  [[nodiscard]] std::uint64_t hash() const noexcept { return hash_; }

 protected:
  int_type overflow(int_type ch) override {
    if (ch != traits_type::eof()) mix(static_cast<unsigned char>(ch));
    return ch;
  }
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    for (std::streamsize i = 0; i < n; ++i) mix(static_cast<unsigned char>(s[i]));
    return n;
  }

 private:
  void mix(unsigned char byte) noexcept {
    hash_ ^= byte;
    hash_ *= 0x100000001b3ULL;
  }
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

SampleSet sample_gaussian(std::span<const double> mean, double sigma, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::EmptySet, "sample_gaussian needs n >= 1");
  if (mean.empty()) throw Error(ErrorCode::DimensionMismatch, "mean must have dimension >= 1");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  Rng rng(seed);
  PointMatrix points(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(mean.size()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      points(i, k) = mean[static_cast<std::size_t>(k)] + sigma * rng.normal();
    }
  }
  return SampleSet(std::move(points));
}

PointMatrix sample_isotropic(std::size_t dim, double sigma, std::size_t n, std::uint64_t seed) {
  const std::vector<double> mean(dim, 0.0);
  return sample_gaussian(mean, sigma, n, seed).points();
}

LabeledMatrix parse_matrix_csv(std::istream& in, Orientation orientation) {
  LabeledMatrix result;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;  // numeric cells per row
  bool header_checked = false;
  std::optional<bool> label_column;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);

    if (!header_checked) {
      header_checked = true;
      bool is_header = false;
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if ((c > 0 || cells.size() == 1) && !parse_number(cells[c])) is_header = true;
      }
      if (is_header) {
        for (const auto cell : cells) result.column_names.emplace_back(cell);
        continue;
      }
    }

    if (!label_column) {
      label_column = cells.size() > 1 && !parse_number(cells[0]);
      width = cells.size() - (*label_column ? 1 : 0);
      if (!result.column_names.empty() && *label_column && result.column_names.size() == cells.size()) {
        result.column_names.erase(result.column_names.begin());
      }
    }
    const std::size_t offset = *label_column ? 1 : 0;
    if (cells.size() != width + offset) {
      throw CsvError(ErrorCode::MalformedCsv, line_no, 0,
                     "expected " + std::to_string(width + offset) + " cells, found " + std::to_string(cells.size()));
    }
    if (*label_column) result.row_labels.emplace_back(cells[0]);
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = offset; c < cells.size(); ++c) {
      const auto value = parse_number(cells[c]);
      if (!value) {
        throw CsvError(ErrorCode::ParseError, line_no, c + 1, "not a number: '" + std::string(cells[c]) + "'");
      }
      if (!std::isfinite(*value)) {
        throw CsvError(ErrorCode::NonFiniteInput, line_no, c + 1, "non-finite value '" + std::string(cells[c]) + "'");
      }
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CsvError(ErrorCode::MalformedCsv, line_no, 0, "no numeric rows");
  if (!result.column_names.empty() && result.column_names.size() != width) {
    throw CsvError(ErrorCode::MalformedCsv, 1, 0, "header has " + std::to_string(result.column_names.size()) +
                                                      " names for " + std::to_string(width) + " columns");
  }

  result.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::copy(rows[r].begin(), rows[r].end(), result.values.row(static_cast<Eigen::Index>(r)).data());
  }
  if (orientation == Orientation::SamplesAsColumns) {
    PointMatrix transposed = result.values.transpose();
    result.values = std::move(transposed);
    std::swap(result.row_labels, result.column_names);
  }
  return result;
}

LabeledMatrix load_matrix_csv(const std::filesystem::path& path, Orientation orientation) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return parse_matrix_csv(in, orientation);
}

void write_matrix_csv(std::ostream& out, const PointMatrix& values, std::span<const std::string> header) {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out << ',';
    out << header[c];
  }
  if (!header.empty()) out << '\n';
  char buffer[40];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const int len = std::snprintf(buffer, sizeof buffer, "%.17g", values(i, j));
      if (j > 0) out.put(',');
      out.write(buffer, len);
    }
    out.put('\n');
  }
}

DatasetSplit split_dataset(const PointMatrix& positive, const PointMatrix& negative, const SplitCounts& counts,
                           std::uint64_t seed) {
  const auto available = static_cast<std::size_t>(positive.rows());
  if (counts.train_positive == 0) throw Error(ErrorCode::InsufficientData, "train count must be positive");
  if (counts.train_positive + counts.leaveout_positive > available) {
    throw Error(ErrorCode::InsufficientData, "split needs " +
                                                 std::to_string(counts.train_positive + counts.leaveout_positive) +
                                                 " positive rows, have " + std::to_string(available));
  }
  if (negative.rows() == 0) throw Error(ErrorCode::InsufficientData, "no negative rows");
  if (negative.cols() != positive.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "positive and negative matrices differ in dimension");
  }
  Rng rng(seed);
  auto order = rng.sample_without_replacement(available, counts.train_positive + counts.leaveout_positive);
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(counts.train_positive));
  std::vector<std::size_t> leaveout(order.begin() + static_cast<std::ptrdiff_t>(counts.train_positive), order.end());

  const SampleSet all_positive(positive);
  std::optional<SampleSet> leaveout_set;
  if (!leaveout.empty()) leaveout_set = all_positive.subset(leaveout);
  return DatasetSplit{all_positive.subset(train), std::move(leaveout_set), SampleSet(negative),
                      std::move(train), std::move(leaveout), counts.set_size, seed};
}

std::span<const ExpressionDatasetShape> expression_dataset_shapes() noexcept { return kShapes; }

const ExpressionDatasetShape& find_expression_shape(std::string_view key) {
  for (const auto& shape : kShapes) {
    if (shape.key == key) return shape;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown expression fixture '" + std::string(key) + "'");
}

ExpressionFixture make_expression_fixture(const ExpressionDatasetShape& shape, std::uint64_t seed) {
  constexpr double kSpread = 1e-12;
  const auto dim = static_cast<Eigen::Index>(shape.dimension);
  Rng rng(derive_seed(seed, shape.dimension * 1000 + shape.set_size));
  std::vector<double> prototype_pos(shape.dimension);
  std::vector<double> prototype_neg(shape.dimension);
  for (std::size_t k = 0; k < shape.dimension; ++k) {
    prototype_pos[k] = 1.0 + 9.0 * rng.uniform01();
    const double shift = 1.0 + rng.uniform01();
    prototype_neg[k] = prototype_pos[k] + (rng.uniform01() < 0.5 ? -shift : shift);
  }
  ExpressionFixture fixture{PointMatrix(static_cast<Eigen::Index>(shape.positive_rows()), dim),
                            PointMatrix(static_cast<Eigen::Index>(shape.test_negative), dim)};
  for (Eigen::Index i = 0; i < fixture.positive.rows(); ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) fixture.positive(i, k) = prototype_pos[static_cast<std::size_t>(k)] + kSpread * rng.normal();
  }
  for (Eigen::Index i = 0; i < fixture.negative.rows(); ++i) {
    for (Eigen::Index k = 0; k < dim; ++k) fixture.negative(i, k) = prototype_neg[static_cast<std::size_t>(k)] + kSpread * rng.normal();
  }
  return fixture;
}

std::uint64_t csv_checksum(const PointMatrix& values) {
  Fnv1aBuffer buffer;
  std::ostream out(&buffer);
  write_matrix_csv(out, values);
  out.flush();
  return buffer.hash();
}

}  // namespace kst
