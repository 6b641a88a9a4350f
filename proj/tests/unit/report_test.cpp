#include <sstream>

#include <gtest/gtest.h>

#include "kst/error.hpp"
#include "kst/report.hpp"

namespace {

kst::TestReport sample_report() {
  kst::TestReport r;
  r.protocol = "gaussian";
  r.config = {{"seed", "7"}, {"sigma1", "1.5"}};
  r.notes = {"first note", "second \"quoted\" note"};
  kst::MethodRecord a;
  a.method = "MMD";
  a.dataset = "gaussian";
  a.dimension = 10;
  a.repetitions = 3;
  a.null_trials = 3000;
  a.null_rejections = 151;
  a.alternative_trials = 3000;
  a.alternative_acceptances = 7;
  a.type_i = 151.0 / 3000.0;
  a.type_ii = 7.0 / 3000.0;
  a.type_i_se = 0.1 / 3.0;
  a.type_ii_se = 1e-17;
  a.seed = 18446744073709551615ull;
  kst::MethodRecord b = a;
  b.method = "F-Test";
  b.dimension = 2;
  b.type_i = 0.0975;
  r.records = {a, b};
  return r;
}

TEST(Report, JsonRoundTrip) {
  const auto r = sample_report();
  std::stringstream s;
  kst::write_report_json(s, r);
  const std::string first = s.str();
  const auto back = kst::read_report_json(s);
  EXPECT_EQ(back.protocol, r.protocol);
  EXPECT_EQ(back.config, r.config);
  EXPECT_EQ(back.notes, r.notes);
  ASSERT_EQ(back.records.size(), 2u);
  const auto& a = back.find("MMD", 10);
  EXPECT_EQ(a.type_i, r.records[0].type_i);
  EXPECT_EQ(a.type_ii_se, r.records[0].type_ii_se);
  EXPECT_EQ(a.seed, r.records[0].seed);
  EXPECT_EQ(a.null_rejections, 151u);
  EXPECT_EQ(back.find("F-Test", "gaussian").dimension, 2u);
  std::ostringstream again;
  kst::write_report_json(again, back);
  EXPECT_EQ(again.str(), first);
}

TEST(Report, RejectsForeignJson) {
  std::istringstream bad("{\"schema\": \"other\"}");
  EXPECT_THROW((void)kst::read_report_json(bad), kst::Error);
  std::istringstream garbage("{not json");
  try {
    (void)kst::read_report_json(garbage);
    FAIL();
  } catch (const kst::Error& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::ParseError);
  }
}

TEST(Report, FindMissingThrows) {
  const auto r = sample_report();
  EXPECT_THROW((void)r.find("MMD", 3), kst::Error);
  EXPECT_THROW((void)r.find("SVM", "gaussian"), kst::Error);
}

TEST(Report, CsvHasOneLinePerRecord) {
  std::ostringstream s;
  kst::write_report_csv(s, sample_report());
  std::istringstream in(s.str());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("protocol,dataset,dimension,method", 0), 0u);
  while (std::getline(in, line)) {
    ++lines;
    EXPECT_EQ(line.rfind("gaussian,gaussian,", 0), 0u);
  }
  EXPECT_EQ(lines, 2);
}

TEST(Report, TableUsesFourDigits) {
  std::ostringstream s;
  kst::print_report_table(s, sample_report());
  const std::string text = s.str();
  EXPECT_NE(text.find("5.033"), std::string::npos) << text;
  EXPECT_NE(text.find("MMD"), std::string::npos);
  EXPECT_NE(text.find("first note"), std::string::npos);
}

}  // namespace
