#include <cmath>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "kst/data_io.hpp"
#include "kst/error.hpp"

namespace {

namespace fs = std::filesystem;

kst::LabeledMatrix parse(const std::string& text, kst::Orientation o = kst::Orientation::SamplesAsRows) {
  std::istringstream in(text);
  return kst::parse_matrix_csv(in, o);
}

TEST(Csv, PlainMatrix) {
  const auto m = parse("1,2\n3,4\n");
  ASSERT_EQ(m.values.rows(), 2);
  ASSERT_EQ(m.values.cols(), 2);
  EXPECT_EQ(m.values(0, 0), 1.0);
  EXPECT_EQ(m.values(0, 1), 2.0);
  EXPECT_EQ(m.values(1, 0), 3.0);
  EXPECT_EQ(m.values(1, 1), 4.0);
  EXPECT_TRUE(m.row_labels.empty());
  EXPECT_TRUE(m.column_names.empty());
}

TEST(Csv, SamplesAsColumnsTransposes) {
  const auto m = parse("1,2\n3,4", kst::Orientation::SamplesAsColumns);
  EXPECT_EQ(m.values(0, 0), 1.0);
  EXPECT_EQ(m.values(0, 1), 3.0);
  EXPECT_EQ(m.values(1, 0), 2.0);
  EXPECT_EQ(m.values(1, 1), 4.0);
}

TEST(Csv, HeaderAndLabelColumn) {
  const auto m = parse("id,g1,g2\ns1,0.5,1e-3\ns2,-2,3\n");
  ASSERT_EQ(m.values.rows(), 2);
  ASSERT_EQ(m.values.cols(), 2);
  EXPECT_EQ(m.values(0, 1), 1e-3);
  ASSERT_EQ(m.row_labels.size(), 2u);
  EXPECT_EQ(m.row_labels[1], "s2");
  ASSERT_EQ(m.column_names.size(), 2u);
  EXPECT_EQ(m.column_names[0], "g1");
}

TEST(Csv, GeneByPatientLayout) {
  const auto m = parse("gene,p1,p2,p3\ng1,1,2,3\ng2,4,5,6\n", kst::Orientation::SamplesAsColumns);
  ASSERT_EQ(m.values.rows(), 3);
  ASSERT_EQ(m.values.cols(), 2);
  EXPECT_EQ(m.values(2, 1), 6.0);
  ASSERT_EQ(m.row_labels.size(), 3u);
  EXPECT_EQ(m.row_labels[0], "p1");
  EXPECT_EQ(m.column_names[1], "g2");
}

TEST(Csv, CrlfAndTrailingBlankLines) {
  const auto m = parse("1,2\r\n3,4\r\n\r\n");
  EXPECT_EQ(m.values.rows(), 2);
  EXPECT_EQ(m.values(1, 1), 4.0);
}

TEST(Csv, RaggedRowsReportLine) {
  try {
    (void)parse("1,2\n3,4\n5\n");
    FAIL();
  } catch (const kst::CsvError& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::MalformedCsv);
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Csv, BadCellReportsLineAndColumn) {
  try {
    (void)parse("1,2\n3,abc\n");
    FAIL();
  } catch (const kst::CsvError& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::ParseError);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
}

TEST(Csv, NonFiniteCells) {
  for (const char* text : {"1,nan\n", "inf,2\n", "1,2\n-Inf,0\n"}) {
    try {
      (void)parse(text);
      FAIL() << text;
    } catch (const kst::Error& e) {
      EXPECT_EQ(e.code(), kst::ErrorCode::NonFiniteInput) << text;
    }
  }
}

TEST(Csv, MissingFile) {
  try {
    (void)kst::load_matrix_csv("/nonexistent/kst/file.csv");
    FAIL();
  } catch (const kst::Error& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::IoError);
  }
}

TEST(Csv, RoundTripIsExact) {
  const kst::PointMatrix m = kst::sample_isotropic(5, 3.7, 40, 8);
  std::stringstream buffer;
  const std::vector<std::string> header{"a", "b", "c", "d", "e"};
  kst::write_matrix_csv(buffer, m, header);
  const auto back = kst::parse_matrix_csv(buffer);
  ASSERT_EQ(back.values.rows(), m.rows());
  EXPECT_TRUE(back.values == m);
  EXPECT_EQ(back.column_names, header);
}

TEST(Generators, StandardDeviation) {
  const std::vector<double> mean{0.0};
  const kst::SampleSet s = kst::sample_gaussian(mean, 1.5, 100000, 3);
  double sum = 0.0;
  double ss = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sum += s.point(i)[0];
    ss += s.point(i)[0] * s.point(i)[0];
  }
  const double n = static_cast<double>(s.size());
  const double sd = std::sqrt((ss - sum * sum / n) / (n - 1.0));
  EXPECT_GE(sd, 1.485);
  EXPECT_LE(sd, 1.515);
}

TEST(Generators, TinySpreadCollapsesToMean) {
  const std::vector<double> mean{1.0, -2.0, 3.0};
  const kst::SampleSet s = kst::sample_gaussian(mean, 1e-300, 10, 3);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(s.point(i)[k], mean[k], 1e-250);
}

TEST(Generators, SameSeedSameBytes) {
  const kst::PointMatrix a = kst::sample_isotropic(7, 2.0, 100, 5);
  const kst::PointMatrix b = kst::sample_isotropic(7, 2.0, 100, 5);
  EXPECT_TRUE(a == b);
  std::ostringstream sa;
  std::ostringstream sb;
  kst::write_matrix_csv(sa, a);
  kst::write_matrix_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_FALSE(a == kst::sample_isotropic(7, 2.0, 100, 6));
}

TEST(Split, LeukemiaCounts) {
  const kst::PointMatrix pos = kst::sample_isotropic(3, 1.0, 25, 1);
  const kst::PointMatrix neg = kst::sample_isotropic(3, 1.0, 47, 2);
  const auto split = kst::split_dataset(pos, neg, {17, 8, 5}, 9);
  EXPECT_EQ(split.train_positive.size(), 17u);
  ASSERT_TRUE(split.leaveout_positive.has_value());
  EXPECT_EQ(split.leaveout_positive->size(), 8u);
  EXPECT_EQ(split.test_negative.size(), 47u);
  std::set<std::size_t> all(split.train_rows.begin(), split.train_rows.end());
  for (const auto r : split.leaveout_rows) EXPECT_TRUE(all.insert(r).second);
  EXPECT_EQ(all.size(), 25u);
  for (std::size_t i = 0; i < split.train_rows.size(); ++i) {
    EXPECT_EQ(split.train_positive.point(i)[0], pos(static_cast<Eigen::Index>(split.train_rows[i]), 0));
  }
}

TEST(Split, NoLeaveOut) {
  const kst::PointMatrix pos = kst::sample_isotropic(2, 1.0, 25, 1);
  const kst::PointMatrix neg = kst::sample_isotropic(2, 1.0, 5, 2);
  const auto split = kst::split_dataset(pos, neg, {25, 0, 5}, 9);
  EXPECT_EQ(split.train_positive.size(), 25u);
  EXPECT_FALSE(split.leaveout_positive.has_value());
}

TEST(Split, SeedsGiveDifferentPartitions) {
  const kst::PointMatrix pos = kst::sample_isotropic(2, 1.0, 25, 1);
  const kst::PointMatrix neg = kst::sample_isotropic(2, 1.0, 5, 2);
  int differing = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto a = kst::split_dataset(pos, neg, {17, 8, 5}, 2 * s).leaveout_rows;
    auto b = kst::split_dataset(pos, neg, {17, 8, 5}, 2 * s + 1).leaveout_rows;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    differing += a != b;
  }
  EXPECT_GE(differing, 99);
  auto a = kst::split_dataset(pos, neg, {17, 8, 5}, 3).train_rows;
  EXPECT_EQ(a, kst::split_dataset(pos, neg, {17, 8, 5}, 3).train_rows);
}

TEST(Split, InsufficientRows) {
  const kst::PointMatrix pos = kst::sample_isotropic(2, 1.0, 20, 1);
  const kst::PointMatrix neg = kst::sample_isotropic(2, 1.0, 5, 2);
  try {
    (void)kst::split_dataset(pos, neg, {17, 8, 5}, 1);
    FAIL();
  } catch (const kst::Error& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::InsufficientData);
  }
}

TEST(Fixtures, ShapesMatchTable) {
  const auto& lung = kst::find_expression_shape("lung");
  EXPECT_EQ(lung.positive_rows(), 31u);
  EXPECT_EQ(lung.dimension, 12533u);
  EXPECT_EQ(lung.set_size, 7u);
  const auto& colon = kst::find_expression_shape("colon");
  EXPECT_EQ(colon.dimension, 2000u);
  EXPECT_EQ(colon.set_size, 4u);
  EXPECT_EQ(kst::expression_dataset_shapes().size(), 6u);
  EXPECT_THROW((void)kst::find_expression_shape("nope"), kst::Error);
}

TEST(Fixtures, LungFixtureLoadsFromCsv) {
  const auto& lung = kst::find_expression_shape("lung");
  const auto fixture = kst::make_expression_fixture(lung, kst::kFixtureSeed);
  const fs::path path = fs::temp_directory_path() / "kst_lung_fixture_test.csv";
  {
    std::ofstream out(path, std::ios::binary);
    kst::write_matrix_csv(out, fixture.positive);
  }
  const auto loaded = kst::load_matrix_csv(path);
  fs::remove(path);
  EXPECT_EQ(loaded.values.rows(), 31);
  EXPECT_EQ(loaded.values.cols(), 12533);
  EXPECT_TRUE(loaded.values == fixture.positive);
  EXPECT_EQ(kst::csv_checksum(fixture.positive), kst::csv_checksum(loaded.values));
}

TEST(Fixtures, DeterministicChecksums) {
  const auto& colon = kst::find_expression_shape("colon");
  const auto a = kst::make_expression_fixture(colon, kst::kFixtureSeed);
  const auto b = kst::make_expression_fixture(colon, kst::kFixtureSeed);
  EXPECT_EQ(kst::csv_checksum(a.positive), kst::csv_checksum(b.positive));
  EXPECT_NE(kst::csv_checksum(a.positive), kst::csv_checksum(a.negative));
  EXPECT_EQ(a.positive.rows(), 22);
  EXPECT_EQ(a.negative.rows(), 40);
}

TEST(Fixtures, MatchShippedManifest) {
  std::ifstream in(KST_MANIFEST);
  ASSERT_TRUE(in) << KST_MANIFEST;
  std::string line;
  std::size_t checked = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string key;
    std::size_t pos_rows, neg_rows, dim, train, leaveout, set_size;
    std::uint64_t pos_sum, neg_sum;
    fields >> key >> pos_rows >> neg_rows >> dim >> train >> leaveout >> set_size >> pos_sum >> neg_sum;
    ASSERT_TRUE(fields) << line;
    const auto& shape = kst::find_expression_shape(key);
    EXPECT_EQ(shape.dimension, dim);
    EXPECT_EQ(shape.train_positive, train);
    EXPECT_EQ(shape.leaveout_positive, leaveout);
    EXPECT_EQ(shape.test_negative, neg_rows);
    EXPECT_EQ(shape.set_size, set_size);
    const auto fixture = kst::make_expression_fixture(shape, kst::kFixtureSeed);
    EXPECT_EQ(static_cast<std::size_t>(fixture.positive.rows()), pos_rows);
    EXPECT_EQ(kst::csv_checksum(fixture.positive), pos_sum) << key;
    EXPECT_EQ(kst::csv_checksum(fixture.negative), neg_sum) << key;
    ++checked;
  }
  EXPECT_EQ(checked, 6u);
}

}  // namespace
