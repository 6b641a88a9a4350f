#include "kst/report.hpp"

#include <cstdio>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "kst/error.hpp"

namespace kst {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string fmt4(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.4g", value);
  return buffer;
}

}  // namespace

const MethodRecord& TestReport::find(const std::string& method, std::size_t dimension) const {
  for (const auto& r : records) {
    if (r.method == method && r.dimension == dimension) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "no record for " + method + " at dimension " + std::to_string(dimension));
}

const MethodRecord& TestReport::find(const std::string& method, const std::string& dataset) const {
  for (const auto& r : records) {
    if (r.method == method && r.dataset == dataset) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "no record for " + method + " on " + dataset);
}

void write_report_json(std::ostream& out, const TestReport& report) {
  ordered_json doc;
  doc["schema"] = "kst-report";
  doc["schema_version"] = kReportSchemaVersion;
  doc["protocol"] = report.protocol;
  ordered_json config = ordered_json::object();
  for (const auto& [key, value] : report.config) config[key] = value;
  doc["config"] = std::move(config);
  doc["notes"] = report.notes;
  ordered_json records = ordered_json::array();
  for (const auto& r : report.records) {
    ordered_json rec;
    rec["method"] = r.method;
    rec["dataset"] = r.dataset;
    rec["dimension"] = r.dimension;
    rec["repetitions"] = r.repetitions;
    rec["type_i"] = r.type_i;
    rec["type_ii"] = r.type_ii;
    rec["type_i_se"] = r.type_i_se;
    rec["type_ii_se"] = r.type_ii_se;
    rec["null_trials"] = r.null_trials;
    rec["null_rejections"] = r.null_rejections;
    rec["alternative_trials"] = r.alternative_trials;
    rec["alternative_acceptances"] = r.alternative_acceptances;
    rec["seed"] = r.seed;
    records.push_back(std::move(rec));
  }
  doc["records"] = std::move(records);
  out << doc.dump(2) << '\n';
}

TestReport read_report_json(std::istream& in) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (doc.value("schema", "") != "kst-report" || doc.value("schema_version", 0) != kReportSchemaVersion) {
    throw Error(ErrorCode::ParseError, "not a kst-report v1 document");
  }
  TestReport report;
  report.protocol = doc.at("protocol").get<std::string>();
  for (const auto& [key, value] : doc.at("config").items()) report.config[key] = value.get<std::string>();
  report.notes = doc.at("notes").get<std::vector<std::string>>();
  for (const auto& rec : doc.at("records")) {
    MethodRecord r;
    r.method = rec.at("method").get<std::string>();
    r.dataset = rec.at("dataset").get<std::string>();
    r.dimension = rec.at("dimension").get<std::size_t>();
    r.repetitions = rec.at("repetitions").get<std::size_t>();
    r.type_i = rec.at("type_i").get<double>();
    r.type_ii = rec.at("type_ii").get<double>();
    r.type_i_se = rec.at("type_i_se").get<double>();
    r.type_ii_se = rec.at("type_ii_se").get<double>();
    r.null_trials = rec.at("null_trials").get<std::size_t>();
    r.null_rejections = rec.at("null_rejections").get<std::size_t>();
    r.alternative_trials = rec.at("alternative_trials").get<std::size_t>();
    r.alternative_acceptances = rec.at("alternative_acceptances").get<std::size_t>();
    r.seed = rec.at("seed").get<std::uint64_t>();
    report.records.push_back(std::move(r));
  }
  return report;
}

void write_report_csv(std::ostream& out, const TestReport& report) {
  out << "protocol,dataset,dimension,method,repetitions,type_i,type_ii,total_error,type_i_se,type_ii_se,"
         "null_trials,null_rejections,alternative_trials,alternative_acceptances,seed\n";
  for (const auto& r : report.records) {
    out << report.protocol << ',' << r.dataset << ',' << r.dimension << ',' << r.method << ',' << r.repetitions << ','
        << fmt17(r.type_i) << ',' << fmt17(r.type_ii) << ',' << fmt17(r.total_error()) << ',' << fmt17(r.type_i_se)
        << ',' << fmt17(r.type_ii_se) << ',' << r.null_trials << ',' << r.null_rejections << ','
        << r.alternative_trials << ',' << r.alternative_acceptances << ',' << r.seed << '\n';
  }
}

void print_report_table(std::ostream& out, const TestReport& report) {
  char line[160];
  std::snprintf(line, sizeof line, "%-30s %6s  %-14s %10s %10s %10s\n", "dataset", "dim", "method", "type-I %",
                "type-II %", "total %");
  out << line;
  for (const auto& r : report.records) {
    std::snprintf(line, sizeof line, "%-30s %6zu  %-14s %10s %10s %10s\n", r.dataset.c_str(), r.dimension,
                  r.method.c_str(), fmt4(100.0 * r.type_i).c_str(), fmt4(100.0 * r.type_ii).c_str(),
                  fmt4(100.0 * r.total_error()).c_str());
    out << line;
  }
  for (const auto& note : report.notes) out << "note: " << note << '\n';
}

}  // namespace kst
