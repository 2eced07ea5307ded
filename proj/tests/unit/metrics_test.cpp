#include <csmc/errors.hpp>
#include <csmc/metrics.hpp>
#include <csmc/sampling.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

using namespace csmc;

TEST(RelativeError, Examples) {
  Matrix m{{3, 4}};
  EXPECT_EQ(relative_error(m, m), 0.0);
  EXPECT_EQ(relative_error(Matrix::Zero(1, 2), m), 1.0);
  Matrix est{{0, 4}};
  EXPECT_DOUBLE_EQ(relative_error(est, m), 3.0 / 5.0);
  EXPECT_THROW(relative_error(m, Matrix::Zero(1, 2)), DomainError);
  EXPECT_THROW(relative_error(Matrix::Zero(2, 1), m), ShapeError);
}

TEST(Ecdf, Examples) {
  std::vector<double> e{0.1, 0.2, 0.3};
  EXPECT_DOUBLE_EQ(ecdf(e, 0.2), 2.0 / 3.0);
  EXPECT_EQ(ecdf(e, 0.05), 0.0);
  EXPECT_EQ(ecdf(e, 0.3), 1.0);
  EXPECT_EQ(ecdf(e, 7.0), 1.0);
  EXPECT_THROW(ecdf(std::vector<double>{}, 0.0), DomainError);
}

TEST(Ecdf, StepsCollapseTies) {
  std::vector<double> e{0.3, 0.1, 0.3};
  auto s = ecdf_steps(e);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], std::make_pair(0.1, 1.0 / 3.0));
  EXPECT_EQ(s[1], std::make_pair(0.3, 1.0));
}

TEST(Ecdf, MonotoneAndRightContinuous) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> e(1 + rng.uniform_index(40));
    for (double& v : e) v = rng.uniform_index(4) == 0 ? 0.5 : std::abs(rng.normal());
    std::vector<double> grid(e);
    for (int k = 0; k < 20; ++k) grid.push_back(3.0 * rng.uniform());
    std::sort(grid.begin(), grid.end());
    double prev = 0.0;
    for (double a : grid) {
      const double f = ecdf(e, a);
      ASSERT_GE(f, prev);
      prev = f;
    }
    for (double v : e) ASSERT_EQ(ecdf(e, v), ecdf(e, std::nextafter(v, std::numeric_limits<double>::infinity())));
    ASSERT_EQ(ecdf(e, *std::max_element(e.begin(), e.end())), 1.0);
    for (const auto& [a, f] : ecdf_steps(e)) ASSERT_EQ(f, ecdf(e, a));
  }
}

TEST(Nmae, Examples) {
  std::vector<Prediction> p{{4, 5}, {3, 3}};
  EXPECT_DOUBLE_EQ(nmae(p, {1, 5}), 0.125);
  std::vector<Prediction> perfect{{2, 2}, {5, 5}};
  EXPECT_EQ(nmae(perfect, {1, 5}), 0.0);
  std::vector<Prediction> worst{{1, 5}, {5, 1}};
  EXPECT_EQ(nmae(worst, {1, 5}), 1.0);
  EXPECT_THROW(nmae(p, {3, 3}), DomainError);
  EXPECT_THROW(nmae(std::vector<Prediction>{}, {1, 5}), DomainError);
}

TEST(HitRate, Examples) {
  EXPECT_EQ(hit_rate(std::vector<Prediction>{{4.4, 4}}, {1, 5}), 1.0);
  EXPECT_EQ(hit_rate(std::vector<Prediction>{{4.6, 4}}, {1, 5}), 0.0);
  EXPECT_EQ(hit_rate(std::vector<Prediction>{{4, 5}, {3, 3}}, {1, 5}), 0.5);
  // half rounds up, predictions beyond the scale are clamped first
  EXPECT_EQ(hit_rate(std::vector<Prediction>{{3.5, 4}}, {1, 5}), 1.0);
  EXPECT_EQ(hit_rate(std::vector<Prediction>{{9.0, 5}}, {1, 5}), 1.0);
  EXPECT_EQ(hit_rate(std::vector<Prediction>{{-2.0, 1}}, {1, 5}), 1.0);
  EXPECT_THROW(hit_rate(std::vector<Prediction>{}, {1, 5}), DomainError);
}

TEST(RatingMetrics, PermutationInvariant) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    std::vector<Prediction> p(1 + rng.uniform_index(50));
    for (auto& x : p) x = {1.0 + 4.0 * rng.uniform(), static_cast<double>(1 + rng.uniform_index(5))};
    const double n0 = nmae(p, {1, 5});
    const double h0 = hit_rate(p, {1, 5});
    for (std::size_t i = p.size(); i > 1; --i) std::swap(p[i - 1], p[rng.uniform_index(i)]);
    EXPECT_NEAR(nmae(p, {1, 5}), n0, 1e-15);
    EXPECT_EQ(hit_rate(p, {1, 5}), h0);
  }
}

TEST(Snr, Examples) {
  Rng rng(3);
  Matrix m = oracle::gaussian(4, 5, rng);
  EXPECT_NEAR(snr(Matrix::Zero(4, 5), m), 0.0, 1e-12);
  Matrix d = oracle::gaussian(4, 5, rng);
  d *= m.norm() / (10.0 * d.norm());
  EXPECT_NEAR(snr(m + d, m), 20.0, 1e-10);
  EXPECT_TRUE(std::isinf(snr(m, m)));
  Matrix est = oracle::gaussian(4, 5, rng);
  double num = 0, den = 0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 5; ++j) {
      num += m(i, j) * m(i, j);
      den += (est(i, j) - m(i, j)) * (est(i, j) - m(i, j));
    }
  EXPECT_NEAR(snr(est, m), 10.0 * std::log10(num / den), 1e-10);
}

TEST(Snr, StrictlyDecreasingInError) {
  Rng rng(4);
  Matrix m = oracle::gaussian(6, 6, rng);
  Matrix dir = oracle::gaussian(6, 6, rng);
  double prev = std::numeric_limits<double>::infinity();
  for (double s = 0.01; s < 10.0; s *= 1.5) {
    const double v = snr(m + s * dir, m);
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(TrialCsv, RowLayout) {
  EXPECT_STREQ(trial_csv_header, "trial,algorithm,alpha,rho,rank,epsilon,elapsed_s,nmae,hr,snr");
  TrialRecord r{3, "CSNN-0.2", 0.2, 0.5, 5, 0.001, 1.5, {{"snr", 20.0}}, false, ""};
  EXPECT_EQ(trial_csv_row(r), "3,CSNN-0.2,0.2,0.5,5,0.001,1.5,,,20");
  r.failed = true;
  EXPECT_EQ(trial_csv_row(r), "3,CSNN-0.2,0.2,0.5,5,nan,1.5,,,20");
}

TEST(MeanStd, SampleStandardDeviation) {
  std::vector<double> v{1, 2, 3, 4};
  auto s = mean_std(v);
  EXPECT_EQ(s.count, 4u);
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_DOUBLE_EQ(s.std, std::sqrt(5.0 / 3.0));
  EXPECT_EQ(mean_std(std::vector<double>{7}).std, 0.0);
}
