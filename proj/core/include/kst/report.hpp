#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace kst {

inline constexpr int kReportSchemaVersion = 1;

/// Error rates of one method on one dataset or dimension.
struct MethodRecord {
  std::string method;
  std::string dataset;
  std::size_t dimension = 0;
  std::size_t repetitions = 0;
  std::size_t null_trials = 0;         ///< total over repetitions
  std::size_t null_rejections = 0;
  std::size_t alternative_trials = 0;  ///< total over repetitions
  std::size_t alternative_acceptances = 0;
  double type_i = 0.0;
  double type_ii = 0.0;
  double type_i_se = 0.0;   ///< across repetitions
  double type_ii_se = 0.0;
  std::uint64_t seed = 0;

  [[nodiscard]] double total_error() const noexcept { return type_i + type_ii; }
};

struct TestReport {
  std::string protocol;                       ///< "gaussian" or "expression"
  std::map<std::string, std::string> config;  ///< fully resolved settings
  std::vector<std::string> notes;
  std::vector<MethodRecord> records;

  /// Throws InvalidArgument when absent.
  [[nodiscard]] const MethodRecord& find(const std::string& method, std::size_t dimension) const;
  [[nodiscard]] const MethodRecord& find(const std::string& method, const std::string& dataset) const;
};

/// Structured JSON document, schema "kst-report" version 1. Keys are written
/// in a fixed order so equal reports serialize to equal bytes.
void write_report_json(std::ostream& out, const TestReport& report);
[[nodiscard]] TestReport read_report_json(std::istream& in);

/// One line per record: protocol,dataset,dimension,method,type_i,type_ii,...
void write_report_csv(std::ostream& out, const TestReport& report);

/// Console table with 4 significant digits.
void print_report_table(std::ostream& out, const TestReport& report);

}  // namespace kst
