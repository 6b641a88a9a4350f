#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kst {

/// Two isotropic Gaussian class conditionals with equal priors:
/// class 1 ~ N(mean_p, sigma_p^2 I), class -1 ~ N(mean_q, sigma_q^2 I).
struct GaussianPairProblem {
  std::vector<double> mean_p;
  std::vector<double> mean_q;
  double sigma_p = 1.0;
  double sigma_q = 1.0;

  void validate() const;
};

struct ErrorComponents {
  double miss = 0.0;            ///< P(decide -1 | class 1)
  double false_positive = 0.0;  ///< P(decide 1 | class -1)
  double miss_se = 0.0;
  double false_positive_se = 0.0;
  std::size_t samples = 0;      ///< draws per class
};

/// Monte Carlo estimate of both error integrals under the likelihood-ratio
/// (Bayes) rule. Exact ties of the log-likelihood ratio are broken by a
/// fair coin. Needs samples >= 1000.
[[nodiscard]] ErrorComponents error_components(const GaussianPairProblem& problem, std::size_t samples,
                                               std::uint64_t seed);

/// 1/2 miss + 1/2 false_positive.
[[nodiscard]] double bayes_error(const ErrorComponents& c) noexcept;

/// Standard error of bayes_error (independent class draws).
[[nodiscard]] double bayes_error_se(const ErrorComponents& c) noexcept;

/// Probability of misclassifying a whole i.i.d. set of n points:
/// 1/2 miss^n + 1/2 false_positive^n. Throws InvalidArgument for n == 0.
[[nodiscard]] double set_bayes_error(const ErrorComponents& c, unsigned n);

/// Standard normal CDF.
[[nodiscard]] double normal_cdf(double z) noexcept;

}  // namespace kst
