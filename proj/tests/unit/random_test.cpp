#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "kst/error.hpp"
#include "kst/random.hpp"

namespace {

TEST(Random, SameSeedSameStream) {
  kst::Rng a(42);
  kst::Rng b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Random, DerivedStreamsDiffer) {
  EXPECT_NE(kst::derive_seed(1, 0), kst::derive_seed(1, 1));
  EXPECT_NE(kst::derive_seed(1, 0), kst::derive_seed(2, 0));
  EXPECT_EQ(kst::derive_seed(9, 3), kst::derive_seed(9, 3));
}

TEST(Random, Mt19937_64ReferenceValue) {
  // The engine is std::mt19937_64, whose 10000th output is fixed by the standard.
  kst::Rng rng(5489);
  std::uint64_t value = 0;
  for (int i = 0; i < 10000; ++i) value = rng.next_u64();
  EXPECT_EQ(value, 9981545732273789042ULL);
}

TEST(Random, UniformIndexStaysInRangeAndCoversIt) {
  kst::Rng rng(3);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.uniform_index(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (const int h : hits) EXPECT_GT(h, 850);
}

TEST(Random, Uniform01InHalfOpenUnitInterval) {
  kst::Rng rng(11);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Random, NormalMoments) {
  kst::Rng rng(17);
  const int n = 200000;
  double s = 0.0;
  double ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  const double mean = s / n;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(ss / n - mean * mean, 1.0, 0.015);
}

TEST(Random, SampleWithoutReplacementIsDistinct) {
  kst::Rng rng(23);
  const auto picks = rng.sample_without_replacement(50, 20);
  ASSERT_EQ(picks.size(), 20u);
  std::set<std::size_t> unique(picks.begin(), picks.end());
  EXPECT_EQ(unique.size(), 20u);
  EXPECT_LT(*std::max_element(picks.begin(), picks.end()), 50u);
}

TEST(Random, FullSampleIsPermutation) {
  kst::Rng rng(29);
  auto picks = rng.sample_without_replacement(10, 10);
  std::sort(picks.begin(), picks.end());
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(picks[i], i);
}

TEST(Random, OversampleThrows) {
  kst::Rng rng(1);
  try {
    (void)rng.sample_without_replacement(3, 4);
    FAIL();
  } catch (const kst::Error& e) {
    EXPECT_EQ(e.code(), kst::ErrorCode::InsufficientData);
  }
}

}  // namespace
