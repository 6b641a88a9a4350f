#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "kst/data_io.hpp"
#include "kst/error.hpp"
#include "kst/mmd.hpp"
#include "oracles.hpp"

namespace {

using kst::BaseKernelSpec;
using kst::SampleSet;

TEST(EmpiricalMmd, ZeroOnIdenticalSets) {
  std::mt19937_64 gen(1);
  const auto xs = kst::oracle::random_points(gen, 6, 3);
  const SampleSet x = SampleSet::from_rows(xs);
  EXPECT_NEAR(kst::empirical_mmd(x, x, BaseKernelSpec::gaussian(1.0)), 0.0, 1e-12);
}

TEST(EmpiricalMmd, SingletonClosedForm) {
  const SampleSet x = SampleSet::from_rows({{0.0}});
  const SampleSet y = SampleSet::from_rows({{1.0}});
  EXPECT_NEAR(kst::empirical_mmd(x, y, BaseKernelSpec::gaussian(1.0)), 0.786939, 1e-6);
}

TEST(EmpiricalMmd, FourBySixMatchesOracle) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 20; ++t) {
    const auto xs = kst::oracle::random_points(gen, 4, 3);
    const auto ys = kst::oracle::random_points(gen, 6, 3, 1.5);
    const double got = kst::empirical_mmd(SampleSet::from_rows(xs), SampleSet::from_rows(ys), BaseKernelSpec::gaussian(1.2));
    EXPECT_NEAR(got, kst::oracle::mmd(xs, ys, 1.2), 1e-12);
  }
}

TEST(EmpiricalMmd, EqualsSetDistanceAndIsSymmetric) {
  std::mt19937_64 gen(3);
  const auto spec = BaseKernelSpec::gaussian(0.9);
  const SampleSet x = SampleSet::from_rows(kst::oracle::random_points(gen, 5, 2));
  const SampleSet y = SampleSet::from_rows(kst::oracle::random_points(gen, 3, 2));
  EXPECT_EQ(kst::empirical_mmd(x, y, spec), kst::set_distance_sq(x, y, spec));
  const double direct = kst::set_norm_sq(x, spec) - 2.0 * kst::set_kernel(x, y, spec) + kst::set_norm_sq(y, spec);
  EXPECT_EQ(kst::empirical_mmd(x, y, spec), std::max(0.0, direct));
  EXPECT_NEAR(kst::empirical_mmd(x, y, spec), kst::empirical_mmd(y, x, spec), 1e-15);
}

TEST(Bootstrap, DegenerateSampleGivesZeroThreshold) {
  kst::PointMatrix same(100, 2);
  same.setConstant(3.0);
  const auto t = kst::bootstrap_threshold(SampleSet(same), 7, 0.05, 100, BaseKernelSpec::gaussian(1.0), 5);
  EXPECT_EQ(t.value, 0.0);
}

TEST(Bootstrap, ThresholdIsCeilingOrderStatistic) {
  const kst::PointMatrix x = kst::sample_isotropic(3, 1.0, 60, 11);
  const kst::PooledSetKernel pool(x, BaseKernelSpec::gaussian(1.5));
  std::vector<std::size_t> rows(60);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  auto stats = kst::bootstrap_null_statistics(pool, rows, 7, 100, 21);
  ASSERT_EQ(stats.size(), 100u);
  const auto t = kst::bootstrap_threshold(pool, rows, 7, 0.05, 100, 21);
  std::sort(stats.begin(), stats.end());
  EXPECT_EQ(t.value, stats[94]);
  EXPECT_EQ(kst::null_quantile(stats, 0.1), stats[89]);
  EXPECT_EQ(kst::null_quantile(stats, 0.999), stats[0]);
}

TEST(Bootstrap, NullStatisticsAreDisjointSubsetMmds) {
  // Each null statistic must equal the MMD between two disjoint subsets of
  // the training rows, so it is bounded by the largest such pair.
  const kst::PointMatrix x = kst::sample_isotropic(2, 1.0, 14, 3);
  const kst::PooledSetKernel pool(x, BaseKernelSpec::gaussian(1.0));
  std::vector<std::size_t> rows(14);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  // With |X| = 2 * set_size each draw splits X into two halves.
  for (const double s : kst::bootstrap_null_statistics(pool, rows, 7, 50, 8)) {
    EXPECT_GE(s, 0.0);
    EXPECT_LT(s, 2.0);
  }
}

TEST(Bootstrap, MonotoneInAlphaAndDeterministic) {
  const SampleSet x(kst::sample_isotropic(4, 1.0, 80, 2));
  const auto spec = BaseKernelSpec::gaussian(2.0);
  double previous = INFINITY;
  for (const double alpha : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    const auto t = kst::bootstrap_threshold(x, 5, alpha, 100, spec, 77);
    EXPECT_LE(t.value, previous);
    previous = t.value;
  }
  EXPECT_EQ(kst::bootstrap_threshold(x, 5, 0.05, 100, spec, 77).value,
            kst::bootstrap_threshold(x, 5, 0.05, 100, spec, 77).value);
}

TEST(Bootstrap, Errors) {
  const SampleSet x(kst::sample_isotropic(2, 1.0, 13, 2));
  const auto spec = BaseKernelSpec::gaussian(1.0);
  try {
    (void)kst::bootstrap_threshold(x, 7, 0.05, 100, spec, 1);
    FAIL();
  } catch (const kst::Error& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::InsufficientData);
  }
  EXPECT_THROW((void)kst::bootstrap_threshold(x, 3, 0.0, 100, spec, 1), kst::Error);
  EXPECT_THROW((void)kst::bootstrap_threshold(x, 3, 1.0, 100, spec, 1), kst::Error);
  EXPECT_THROW((void)kst::bootstrap_threshold(x, 3, 0.05, 0, spec, 1), kst::Error);
}

TEST(Bootstrap, NullRejectionRateNearAlpha) {
  // Fresh null pairs against thresholds from 250 training points in d = 10.
  std::size_t rejections = 0;
  std::size_t trials = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const SampleSet train(kst::sample_isotropic(10, 1.5, 250, 100 + rep));
    const SampleSet fresh(kst::sample_isotropic(10, 1.5, 1000, 200 + rep));
    const auto spec = BaseKernelSpec::gaussian(kst::median_heuristic(train.points()));
    const auto threshold = kst::bootstrap_threshold(train, 7, 0.05, 100, spec, 300 + rep);
    kst::Rng rng(400 + rep);
    for (int t = 0; t < 1000; ++t) {
      const SampleSet y = fresh.subset(rng.sample_without_replacement(1000, 7));
      rejections += kst::mmd_two_sample_test(train, y, threshold, spec, rng).decision == kst::Decision::Different;
      ++trials;
    }
  }
  const double rate = static_cast<double>(rejections) / static_cast<double>(trials);
  EXPECT_GT(rate, 0.02);
  EXPECT_LT(rate, 0.09);
}

TEST(MmdTest, ZeroThresholdRejectsDifferentSets) {
  const SampleSet train(kst::sample_isotropic(3, 1.0, 50, 1));
  const SampleSet y(kst::sample_isotropic(3, 4.0, 7, 2));
  const auto spec = BaseKernelSpec::gaussian(1.0);
  kst::MmdThreshold threshold;
  threshold.value = 0.0;
  threshold.set_size = 7;
  kst::Rng rng(3);
  const auto r = kst::mmd_two_sample_test(train, y, threshold, spec, rng);
  EXPECT_EQ(r.decision, kst::Decision::Different);
  EXPECT_GT(r.statistic, 0.0);
  ASSERT_EQ(r.train_subset.size(), 7u);
  EXPECT_EQ(r.statistic, kst::empirical_mmd(train.subset(r.train_subset), y, spec));
}

TEST(MmdTest, SubsetOfTrainingIsUsuallySame) {
  const SampleSet train(kst::sample_isotropic(5, 1.0, 200, 4));
  const auto spec = BaseKernelSpec::gaussian(kst::median_heuristic(train.points()));
  const auto threshold = kst::bootstrap_threshold(train, 7, 0.05, 200, spec, 5);
  kst::Rng rng(6);
  int same = 0;
  for (int t = 0; t < 500; ++t) {
    const SampleSet y = train.subset(rng.sample_without_replacement(200, 7));
    same += kst::mmd_two_sample_test(train, y, threshold, spec, rng).decision == kst::Decision::Same;
  }
  EXPECT_GT(same, 430);
}

TEST(MmdThreshold, TextRoundTrip) {
  kst::MmdThreshold t{0.123456789012345678, 0.05, 100, 987654321, 7, 6.5034391334679524};
  std::stringstream buffer;
  kst::write_threshold(buffer, t);
  const auto back = kst::read_threshold(buffer);
  EXPECT_EQ(back.value, t.value);
  EXPECT_EQ(back.alpha, t.alpha);
  EXPECT_EQ(back.bootstrap_iters, t.bootstrap_iters);
  EXPECT_EQ(back.seed, t.seed);
  EXPECT_EQ(back.set_size, t.set_size);
  EXPECT_EQ(back.sigma, t.sigma);
}

TEST(MmdThreshold, RejectsGarbage) {
  std::stringstream buffer("value=1\n");
  EXPECT_THROW((void)kst::read_threshold(buffer), kst::Error);
}

}  // namespace
