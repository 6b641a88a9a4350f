#include "kst/bayes_error.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kst/error.hpp"
#include "kst/random.hpp"

namespace kst {
namespace {

// log N(x; mean, sigma^2 I) up to the shared -d/2 log(2 pi) term.
double log_density(const std::vector<double>& x, const std::vector<double>& mean, double sigma) {
  double sq = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double diff = x[k] - mean[k];
    sq += diff * diff;
  }
  return -0.5 * sq / (sigma * sigma) - static_cast<double>(x.size()) * std::log(sigma);
}

// Fraction of draws from `source` that the Bayes rule assigns to the other
// class.
double error_rate(const GaussianPairProblem& problem, bool from_p, std::size_t samples, Rng& rng) {
  const auto& mean = from_p ? problem.mean_p : problem.mean_q;
  const double sigma = from_p ? problem.sigma_p : problem.sigma_q;
  std::vector<double> x(mean.size());
  std::size_t wrong = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = mean[k] + sigma * rng.normal();
    const double llr = log_density(x, problem.mean_p, problem.sigma_p) - log_density(x, problem.mean_q, problem.sigma_q);
    bool decide_p = llr > 0.0;
    if (llr == 0.0) decide_p = rng.uniform01() < 0.5;
    if (decide_p != from_p) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(samples);
}

}  // namespace

void GaussianPairProblem::validate() const {
  if (mean_p.empty() || mean_p.size() != mean_q.size()) {
    throw Error(ErrorCode::DimensionMismatch, "class means must share a positive dimension");
  }
  if (!(sigma_p > 0.0) || !(sigma_q > 0.0) || !std::isfinite(sigma_p) || !std::isfinite(sigma_q)) {
    throw Error(ErrorCode::InvalidArgument, "class standard deviations must be positive and finite");
  }
}

ErrorComponents error_components(const GaussianPairProblem& problem, std::size_t samples, std::uint64_t seed) {
  problem.validate();
  if (samples < 1000) throw Error(ErrorCode::InvalidArgument, "use at least 1000 Monte Carlo samples");
  Rng rng_p = Rng::derive(seed, 0);
  Rng rng_q = Rng::derive(seed, 1);
  ErrorComponents c;
  c.samples = samples;
  c.miss = error_rate(problem, true, samples, rng_p);
  c.false_positive = error_rate(problem, false, samples, rng_q);
  const auto n = static_cast<double>(samples);
  c.miss_se = std::sqrt(c.miss * (1.0 - c.miss) / n);
  c.false_positive_se = std::sqrt(c.false_positive * (1.0 - c.false_positive) / n);
  return c;
}

double bayes_error(const ErrorComponents& c) noexcept { return 0.5 * c.miss + 0.5 * c.false_positive; }

double bayes_error_se(const ErrorComponents& c) noexcept {
  return 0.5 * std::sqrt(c.miss_se * c.miss_se + c.false_positive_se * c.false_positive_se);
}

double set_bayes_error(const ErrorComponents& c, unsigned n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "set size must be at least 1");
  if (n == 1) return bayes_error(c);
  return 0.5 * std::pow(c.miss, static_cast<double>(n)) + 0.5 * std::pow(c.false_positive, static_cast<double>(n));
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace kst
