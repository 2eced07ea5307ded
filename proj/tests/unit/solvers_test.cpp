#include <csmc/datasets.hpp>
#include <csmc/errors.hpp>
#include <csmc/metrics.hpp>
#include <csmc/sampling.hpp>
#include <csmc/solvers.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace csmc;

namespace {

MaskedMatrix low_rank_instance(Index n1, Index n2, Index r, double rho, std::uint64_t seed, Matrix* truth) {
  Rng rng(seed);
  Matrix m = oracle::low_rank(n1, n2, r, rng);
  if (truth) *truth = m;
  return MaskedMatrix(m, sample_mask(n1, n2, rho, rng));
}

void expect_monotone(const ConvergenceTrace& trace) {
  for (std::size_t k = 1; k < trace.rows.size(); ++k) {
    const auto& a = trace.rows[k - 1];
    const auto& b = trace.rows[k];
    if (a.lambda != b.lambda) continue;
    EXPECT_LE(b.objective, a.objective * (1.0 + 1e-12) + 1e-15) << "iteration " << b.iteration;
  }
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.step = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.tol_rel = 0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.continuation.eta = 1.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = {};
  c.lambda = -1.0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(Pgd, FullyObservedZeroLambdaReturnsM) {
  Rng rng(1);
  Matrix m = oracle::gaussian(6, 5, rng);
  SolverConfig cfg;
  cfg.lambda = 0.0;
  auto r = pgd_complete(MaskedMatrix(m, ObservationSet::full(6, 5)), cfg);
  EXPECT_LE((r.estimate - m).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(r.status, CompletionStatus::converged);
}

TEST(Pgd, LambdaAboveSpectralNormShrinksToZero) {
  Matrix truth;
  auto obs = low_rank_instance(8, 9, 2, 0.5, 2, &truth);
  SolverConfig cfg;
  cfg.lambda = lambda_max(obs) * (1.0 + 1e-12);
  cfg.max_iters = 1;
  auto r = pgd_complete(obs, cfg);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_EQ(r.estimate.cwiseAbs().maxCoeff(), 0.0);
  ASSERT_EQ(r.trace.size(), 1u);
  EXPECT_EQ(r.trace.rows[0].rank, 0);
}

TEST(Pgd, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto obs = low_rank_instance(15, 20, 3, 0.4, 100 + seed, nullptr);
    SolverConfig cfg;
    cfg.lambda = 0.05 * lambda_max(obs);
    cfg.tol_rel = 1e-12;
    cfg.max_iters = 300;
    auto r = pgd_complete(obs, cfg);
    ASSERT_FALSE(r.trace.empty());
    expect_monotone(r.trace);
  }
}

TEST(Pgd, MatchesTextbookSoftImpute) {
  auto obs = low_rank_instance(12, 16, 2, 0.5, 3, nullptr);
  const double lambda = 0.1 * lambda_max(obs);
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.tol_rel = 1e-15;
  cfg.max_iters = 5000;
  auto r = pgd_complete(obs, cfg);
  Matrix ref = oracle::soft_impute(obs, lambda, 5000, 1e-14);
  EXPECT_LE((r.estimate - ref).norm() / ref.norm(), 1e-6);
}

TEST(Pgd, ContinuationRecoversSmallRankTwo) {
  Matrix truth;
  auto obs = low_rank_instance(20, 30, 2, 0.5, 4, &truth);
  SolverConfig cfg;
  cfg.continuation.lambda_min = 1e-6;
  cfg.continuation.tol_feas = 1e-12;  // run the whole schedule
  cfg.tol_rel = 1e-10;
  cfg.max_iters = 100000;
  auto r = nn_complete(obs, cfg);
  EXPECT_LT(relative_error(r.estimate, truth), 1e-3);
}

TEST(Pgd, StopsAtFixedPoint) {
  auto obs = low_rank_instance(10, 12, 2, 0.6, 5, nullptr);
  const double lambda = 0.2 * lambda_max(obs);
  // iterate the proximal map with the reference SVT until it no longer moves
  Matrix x = Matrix::Zero(10, 12);
  for (int it = 0; it < 100000; ++it) {
    Matrix next = oracle::svt(x + project_observed(obs.values() - x, obs.mask()), lambda);
    const double moved = (next - x).norm();
    x = std::move(next);
    if (moved < 1e-13) break;
  }
  ASSERT_LE((oracle::svt(x + project_observed(obs.values() - x, obs.mask()), lambda) - x).norm(), 1e-10);
  SolverConfig cfg;
  cfg.tol_rel = 1e-16;
  auto again = pgd_complete_from(obs, x, lambda, cfg);
  EXPECT_EQ(again.iterations, 1u);
  EXPECT_EQ(again.status, CompletionStatus::converged);
  EXPECT_LE((again.estimate - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Pgd, DivergenceIsReported) {
  const double big = std::numeric_limits<double>::max();
  MaskedMatrix obs(Matrix::Constant(2, 2, big), ObservationSet::full(2, 2));
  SolverConfig cfg;
  try {
    pgd_complete_from(obs, Matrix::Constant(2, 2, -big), 0.0, cfg);
    FAIL() << "expected a divergence error";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.iteration(), 1u);
  }
}

TEST(Nn, FullyObservedReachesTolerance) {
  Rng rng(6);
  Matrix m = oracle::gaussian(7, 5, rng);
  SolverConfig cfg;
  auto r = nn_complete(MaskedMatrix(m, ObservationSet::full(7, 5)), cfg);
  EXPECT_EQ(r.status, CompletionStatus::converged);
  EXPECT_LT(r.residual, cfg.continuation.tol_feas);
  EXPECT_LT(relative_error(r.estimate, m), 1e-6);
}

TEST(Nn, RankOneCompletion) {
  Matrix m{{1, 1}, {2, 2}};
  // the (0,0) and (0,1) holes have the rank-one completion as nuclear-norm minimiser
  for (Entry hole : {Entry{0, 0}, Entry{0, 1}}) {
    std::vector<Entry> seen;
    for (Index i = 0; i < 2; ++i)
      for (Index j = 0; j < 2; ++j)
        if (!(Entry{i, j} == hole)) seen.push_back({i, j});
    SolverConfig cfg;
    cfg.max_iters = 5000;
    cfg.tol_rel = 1e-14;
    cfg.continuation.tol_feas = 1e-9;
    auto r = nn_complete(MaskedMatrix(m, ObservationSet(2, 2, seen)), cfg);
    EXPECT_NEAR(r.estimate(hole.row, hole.col), 1.0, 1e-6);
  }
}

TEST(Nn, FeasibleUnlessFlagged) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto obs = low_rank_instance(15, 25, 2, 0.3 + 0.05 * static_cast<double>(seed), 200 + seed, nullptr);
    SolverConfig cfg;
    cfg.max_iters = 50 + 25 * seed;
    auto r = nn_complete(obs, cfg);
    if (r.status == CompletionStatus::converged) {
      EXPECT_LT(r.residual, cfg.continuation.tol_feas);
    } else {
      EXPECT_GE(r.residual, cfg.continuation.tol_feas);
    }
    expect_monotone(r.trace);
  }
}

TEST(Nn, InfeasibleToleranceIsAFlagNotAnError) {
  auto obs = low_rank_instance(10, 10, 2, 0.5, 7, nullptr);
  SolverConfig cfg;
  cfg.continuation.lambda_min_ratio = 0.5;  // schedule stops long before feasibility
  auto r = nn_complete(obs, cfg);
  EXPECT_EQ(r.status, CompletionStatus::infeasible_tolerance);
  EXPECT_GE(r.residual, cfg.continuation.tol_feas);
}

TEST(Nn, WarmStartConsistency) {
  auto obs = low_rank_instance(12, 14, 2, 0.5, 8, nullptr);
  const double l0 = 0.3 * lambda_max(obs);
  const double l1 = 0.1 * lambda_max(obs);
  SolverConfig cfg;
  cfg.tol_rel = 1e-14;
  cfg.max_iters = 20000;
  auto joint = nn_complete_schedule(obs, {l0, l1}, cfg);
  auto first = nn_complete_schedule(obs, {l0}, cfg);
  auto second = nn_complete_schedule(obs, {l1}, cfg, &first.estimate);
  EXPECT_LE((joint.estimate - second.estimate).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Nn, RankFiveInstance) {
  SyntheticSpec spec;
  spec.seed = 9;
  Matrix truth = gen_synthetic(spec);
  Rng rng(10);
  MaskedMatrix obs(truth, sample_mask(spec.n1, spec.n2, 0.5, rng));
  SolverConfig cfg;
  auto nn = nn_complete(obs, cfg);
  const double nn_eps = relative_error(nn.estimate, truth);
  EXPECT_LT(nn_eps, 1e-2);
  cfg.seed = 11;
  auto mf = mf_als_complete(obs, 5, 1e-2, cfg);
  const double mf_eps = relative_error(mf.estimate, truth);
  EXPECT_LT(mf_eps, 0.1);
  EXPECT_GT(mf_eps, nn_eps);
}

TEST(Mf, FullyObservedRankOneIsExact) {
  Rng rng(12);
  Matrix m = oracle::low_rank(9, 7, 1, rng);
  SolverConfig cfg;
  cfg.tol_rel = 1e-15;
  auto r = mf_als_complete(MaskedMatrix(m, ObservationSet::full(9, 7)), 1, 0.0, cfg);
  EXPECT_LT(relative_error(r.estimate, m), 1e-6);
}

TEST(Mf, HugeRegularisationGivesZero) {
  auto obs = low_rank_instance(8, 10, 2, 0.6, 13, nullptr);
  SolverConfig cfg;
  auto r = mf_als_complete(obs, 2, 1e12, cfg);
  EXPECT_LT(r.estimate.cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Mf, HalfStepsNeverIncreaseObjective) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto obs = low_rank_instance(20, 25, 3, 0.5, 300 + seed, nullptr);
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.max_iters = 60;
    cfg.tol_rel = 1e-14;
    const double reg = seed % 2 ? 0.0 : 0.1;
    auto r = mf_als_complete(obs, 3, reg, cfg);
    ASSERT_GE(r.trace.size(), 2u);
    for (std::size_t k = 1; k < r.trace.rows.size(); ++k) {
      EXPECT_LE(r.trace.rows[k].objective, r.trace.rows[k - 1].objective * (1.0 + 1e-10) + 1e-12);
    }
  }
}

TEST(Mf, RejectsBadRank) {
  auto obs = low_rank_instance(4, 5, 1, 0.8, 14, nullptr);
  SolverConfig cfg;
  EXPECT_THROW(mf_als_complete(obs, 0, 0.1, cfg), DomainError);
  EXPECT_THROW(mf_als_complete(obs, 5, 0.1, cfg), DomainError);
}

TEST(Mf, SeedDeterminism) {
  auto obs = low_rank_instance(10, 12, 2, 0.5, 15, nullptr);
  SolverConfig cfg;
  cfg.seed = 99;
  cfg.max_iters = 20;
  auto a = mf_als_complete(obs, 2, 0.1, cfg);
  auto b = mf_als_complete(obs, 2, 0.1, cfg);
  EXPECT_EQ(a.estimate, b.estimate);
}
