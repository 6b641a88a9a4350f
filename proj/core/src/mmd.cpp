#include "kst/mmd.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <string>

#include "kst/error.hpp"

namespace kst {
namespace {

void validate_bootstrap(std::size_t available, std::size_t set_size, double alpha, std::size_t iters) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  if (iters == 0) throw Error(ErrorCode::InvalidArgument, "bootstrap needs at least one iteration");
  if (set_size == 0) throw Error(ErrorCode::InvalidArgument, "set size must be positive");
  if (available < 2 * set_size) {
    throw Error(ErrorCode::InsufficientData, "bootstrap needs " + std::to_string(2 * set_size) +
                                                 " training points, have " + std::to_string(available));
  }
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

}  // namespace

double empirical_mmd(const SampleSet& x, const SampleSet& y, const BaseKernelSpec& spec) {
  return set_distance_sq(x, y, spec);
}

std::vector<double> bootstrap_null_statistics(const PooledSetKernel& pool, std::span<const std::size_t> train_rows,
                                              std::size_t set_size, std::size_t iters, std::uint64_t seed) {
  if (train_rows.size() < 2 * set_size) {
    throw Error(ErrorCode::InsufficientData, "bootstrap needs " + std::to_string(2 * set_size) +
                                                 " training points, have " + std::to_string(train_rows.size()));
  }
  std::vector<double> stats;
  stats.reserve(iters);
  IndexSet a(set_size);
  IndexSet b(set_size);
  for (std::size_t it = 0; it < iters; ++it) {
    Rng rng = Rng::derive(seed, it);
    const auto picks = rng.sample_without_replacement(train_rows.size(), 2 * set_size);
    for (std::size_t k = 0; k < set_size; ++k) {
      a[k] = train_rows[picks[k]];
      b[k] = train_rows[picks[set_size + k]];
    }
    stats.push_back(pool.set_distance_sq(a, b));
  }
  return stats;
}

double null_quantile(std::vector<double> null_stats, double alpha) {
  if (null_stats.empty()) throw Error(ErrorCode::InvalidArgument, "no null statistics");
  const auto n = static_cast<double>(null_stats.size());
  // The epsilon absorbs representation error, e.g. (1 - 0.05) * 100 = 95.000000000000014.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, null_stats.size());
  std::sort(null_stats.begin(), null_stats.end());
  return null_stats[rank - 1];
}

MmdThreshold bootstrap_threshold(const PooledSetKernel& pool, std::span<const std::size_t> train_rows,
                                 std::size_t set_size, double alpha, std::size_t iters, std::uint64_t seed) {
  validate_bootstrap(train_rows.size(), set_size, alpha, iters);
  auto stats = bootstrap_null_statistics(pool, train_rows, set_size, iters, seed);
  MmdThreshold threshold;
  threshold.value = null_quantile(std::move(stats), alpha);
  threshold.alpha = alpha;
  threshold.bootstrap_iters = iters;
  threshold.seed = seed;
  threshold.set_size = set_size;
  threshold.sigma = pool.spec().sigma();
  return threshold;
}

MmdThreshold bootstrap_threshold(const SampleSet& x, std::size_t set_size, double alpha, std::size_t iters,
                                 const BaseKernelSpec& spec, std::uint64_t seed) {
  validate_bootstrap(x.size(), set_size, alpha, iters);
  const PooledSetKernel pool(x.points(), spec);
  std::vector<std::size_t> rows(x.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return bootstrap_threshold(pool, rows, set_size, alpha, iters, seed);
}

MmdTestResult mmd_two_sample_test(const SampleSet& x_train, const SampleSet& y, const MmdThreshold& threshold,
                                  const BaseKernelSpec& spec, Rng& rng) {
  if (x_train.dim() != y.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "training dimension " + std::to_string(x_train.dim()) +
                                                  " vs test dimension " + std::to_string(y.dim()));
  }
  auto rows = rng.sample_without_replacement(x_train.size(), threshold.set_size);
  const double statistic = empirical_mmd(x_train.subset(rows), y, spec);
  return {statistic > threshold.value ? Decision::Different : Decision::Same, statistic, std::move(rows)};
}

void write_threshold(std::ostream& out, const MmdThreshold& threshold) {
  out << "# kst mmd-threshold v1\n";
  out << "value=" << format_double(threshold.value) << '\n';
  out << "alpha=" << format_double(threshold.alpha) << '\n';
  out << "iters=" << threshold.bootstrap_iters << '\n';
  out << "seed=" << threshold.seed << '\n';
  out << "set_size=" << threshold.set_size << '\n';
  out << "sigma=" << format_double(threshold.sigma) << '\n';
}

MmdThreshold read_threshold(std::istream& in) {
  std::map<std::string, std::string> fields;
  std::string line;
  bool versioned = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "# kst mmd-threshold v1") {
      versioned = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "expected key=value, got '" + line + "'");
    fields[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (!versioned) throw Error(ErrorCode::ParseError, "missing 'kst mmd-threshold v1' header");
  auto take = [&](const std::string& key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) throw Error(ErrorCode::ParseError, "threshold record lacks '" + key + "'");
    return it->second;
  };
  auto as_double = [&](const std::string& key) {
    const std::string& text = take(key);
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') throw Error(ErrorCode::ParseError, "bad number for '" + key + "'");
    return value;
  };
  auto as_unsigned = [&](const std::string& key) {
    const std::string& text = take(key);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw Error(ErrorCode::ParseError, "bad integer for '" + key + "'");
    }
    return value;
  };
  MmdThreshold threshold;
  threshold.value = as_double("value");
  threshold.alpha = as_double("alpha");
  threshold.bootstrap_iters = static_cast<std::size_t>(as_unsigned("iters"));
  threshold.seed = as_unsigned("seed");
  threshold.set_size = static_cast<std::size_t>(as_unsigned("set_size"));
  threshold.sigma = as_double("sigma");
  return threshold;
}

}  // namespace kst
