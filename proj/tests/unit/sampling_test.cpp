#include <csmc/errors.hpp>
#include <csmc/sampling.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

using namespace csmc;

TEST(Rng, SameSeedSameSequence) {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_EQ(a.uniform(), b.uniform());
    EXPECT_EQ(a.normal(), b.normal());
    EXPECT_EQ(a.uniform_index(17), b.uniform_index(17));
  }
  EXPECT_EQ(Rng(5).fork(3).seed(), 8u);
  EXPECT_NE(Rng(5).derive(1).seed(), Rng(5).derive(2).seed());
}

TEST(Rng, EngineIsTheStandardMersenneTwister) {
  // The 10000th output of a default-seeded mt19937_64 is fixed by the standard.
  Rng r(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = r.next_u64();
  EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformAndNormalMoments) {
  Rng r(9);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(RoundHalfEven, Ties) {
  EXPECT_EQ(round_half_even(0.5), 0);
  EXPECT_EQ(round_half_even(1.5), 2);
  EXPECT_EQ(round_half_even(2.5), 2);
  EXPECT_EQ(round_half_even(2.6), 3);
  EXPECT_EQ(selected_column_count(5, 0.5), 2);
  EXPECT_EQ(selected_column_count(7, 0.5), 4);
  EXPECT_EQ(selected_column_count(10, 0.01), 1);
}

TEST(SampleColumns, Examples) {
  Rng rng(1);
  auto all = sample_columns(10, 1.0, rng);
  ASSERT_EQ(all.size(), 10);
  for (Index i = 0; i < 10; ++i) EXPECT_EQ(all.indices[static_cast<std::size_t>(i)], i);
  auto sel = sample_columns(1000, 0.2, rng);
  EXPECT_EQ(sel.size(), 200);
  EXPECT_TRUE(std::is_sorted(sel.indices.begin(), sel.indices.end()));
  EXPECT_EQ(std::adjacent_find(sel.indices.begin(), sel.indices.end()), sel.indices.end());
  EXPECT_EQ(sel.alpha, 0.2);
  EXPECT_THROW(sample_columns(10, 0.0, rng), DomainError);
  EXPECT_THROW(sample_columns(10, 1.5, rng), DomainError);
}

TEST(SampleColumns, UniformFrequencies) {
  std::array<int, 4> hits{};
  const int seeds = 100000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    auto sel = sample_columns(4, 0.5, rng);
    ASSERT_EQ(sel.size(), 2);
    for (Index j : sel.indices) ++hits[static_cast<std::size_t>(j)];
  }
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / seeds, 0.5, 0.015);
}

TEST(SampleMask, Examples) {
  Rng rng(2);
  EXPECT_EQ(sample_mask(2, 2, 1.0, rng), ObservationSet::full(2, 2));
  EXPECT_EQ(sample_mask(300, 1000, 0.5, rng).size(), 150000u);
  EXPECT_THROW(sample_mask(2, 2, 0.0, rng), DomainError);
  EXPECT_THROW(sample_mask(2, 2, 1.01, rng), DomainError);
  EXPECT_THROW(sample_mask(2, 2, 0.1, rng), DomainError);
}

TEST(SampleMask, UniformFrequencies) {
  std::array<int, 9> hits{};
  const int seeds = 100000;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(static_cast<std::uint64_t>(s));
    auto m = sample_mask(3, 3, 1.0 / 9.0, rng);
    ASSERT_EQ(m.size(), 1u);
    const auto& e = m.entries()[0];
    ++hits[static_cast<std::size_t>(e.row * 3 + e.col)];
  }
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / seeds, 1.0 / 9.0, 0.01);
}

TEST(SampleMask, DeterministicPerSeed) {
  Rng a(77), b(77);
  EXPECT_EQ(sample_mask(20, 30, 0.4, a), sample_mask(20, 30, 0.4, b));
}

TEST(Split, EightyTwenty) {
  Rng rng(3);
  auto omega = sample_mask(10, 20, 0.5, rng);
  ASSERT_EQ(omega.size(), 100u);
  Rng r1(8), r2(8);
  auto [train, test] = split_train_test(omega, 0.8, r1);
  EXPECT_EQ(train.size(), 80u);
  EXPECT_EQ(test.size(), 20u);
  auto [train2, test2] = split_train_test(omega, 0.8, r2);
  EXPECT_EQ(train, train2);
  EXPECT_EQ(test, test2);
}

TEST(Split, AlwaysAnExactPartition) {
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const Index n1 = 1 + static_cast<Index>(rng.uniform_index(8));
    const Index n2 = 2 + static_cast<Index>(rng.uniform_index(8));
    auto omega = sample_mask(n1, n2, 0.3 + 0.7 * rng.uniform(), rng);
    if (omega.size() < 2) continue;
    const double frac = 0.05 + 0.9 * rng.uniform();
    auto [train, test] = split_train_test(omega, frac, rng);
    std::set<Entry> seen;
    for (const auto& e : train.entries()) seen.insert(e);
    for (const auto& e : test.entries()) ASSERT_TRUE(seen.insert(e).second);
    ASSERT_EQ(seen.size(), omega.size());
    for (const auto& e : omega.entries()) ASSERT_TRUE(seen.count(e));
    EXPECT_EQ(static_cast<std::int64_t>(train.size()), round_half_even(frac * static_cast<double>(omega.size())));
  }
}

TEST(Split, RejectsBadArguments) {
  Rng rng(5);
  auto omega = ObservationSet::full(2, 2);
  EXPECT_THROW(split_train_test(omega, 0.0, rng), DomainError);
  EXPECT_THROW(split_train_test(omega, 1.0, rng), DomainError);
  EXPECT_THROW(split_train_test(ObservationSet(2, 2, {}), 0.5, rng), DomainError);
}
