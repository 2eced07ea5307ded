#include "csmc/pipeline.hpp"

#include "csmc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <thread>

namespace csmc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(Stage1Solver s) { return s == Stage1Solver::pgd ? "pgd" : "nn"; }

Stage1Solver parse_stage1_solver(const std::string& name) {
  if (name == "pgd") {
    return Stage1Solver::pgd;
  }
  if (name == "nn") {
    return Stage1Solver::nn;
  }
  throw DomainError(fmt::format("unknown solver '{}' (expected pgd or nn)", name));
}

CompletionResult complete(const MaskedMatrix& obs, Stage1Solver solver, const SolverConfig& cfg) {
  return solver == Stage1Solver::pgd ? pgd_complete(obs, cfg) : nn_complete(obs, cfg);
}

Stage2Result stage2_solve(const Matrix& c_hat, const MaskedMatrix& obs, int threads) {
  if (c_hat.rows() != obs.rows()) {
    throw ShapeError(fmt::format("completed submatrix has {} rows, observations have {}", c_hat.rows(), obs.rows()));
  }
  if (!c_hat.allFinite()) {
    throw DomainError("completed submatrix has non-finite entries");
  }
  const Index d = c_hat.cols();
  const Index n2 = obs.cols();
  Stage2Result out;
  out.coefficients = Matrix::Zero(d, n2);
  if (d == 0) {
    for (Index j = 0; j < n2; ++j) out.unconstrained_columns.push_back(j);
    return out;
  }

  // C_hat = W V^T with W = U Sigma over the numerically non-zero spectrum.
  // Row restriction keeps V, so C_hat[R, :] and W[R, :] share singular values
  // and the minimum-norm solution is z = V y with y solving the k-column
  // problem. The cutoff is the one a per-column pseudoinverse of C_hat[R, :]
  // would use.
  auto factors = thin_svd(c_hat);
  const double sigma1 = factors.sigma.size() > 0 ? factors.sigma(0) : 0.0;
  factors = truncate(std::move(factors), pinv_rcond(c_hat.rows(), d) * sigma1);
  const Matrix basis = factors.U * factors.sigma.asDiagonal();
  const Matrix& right = factors.V;

  auto solve_range = [&](Index begin, Index end) {
    for (Index j = begin; j < end; ++j) {
      auto rows = obs.mask().column(j);
      if (rows.empty() || factors.rank() == 0) {
        continue;
      }
      const double rcond = pinv_rcond(static_cast<Index>(rows.size()), d);
      auto y = masked_least_squares(basis, rows, obs.observed_column(j), rcond);
      out.coefficients.col(j).noalias() = right * (*y);
    }
  };

  const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(n2, 1));
  if (workers == 1) {
    solve_range(0, n2);
  } else {
    // each worker owns a disjoint block of columns of the output
    std::vector<std::jthread> pool;
    const Index chunk = (n2 + workers - 1) / workers;
    for (Index w = 0; w < workers; ++w) {
      const Index begin = w * chunk;
      const Index end = std::min(n2, begin + chunk);
      if (begin < end) {
        pool.emplace_back(solve_range, begin, end);
      }
    }
  }
  for (Index j = 0; j < n2; ++j) {
    if (obs.mask().column(j).empty()) {
      out.unconstrained_columns.push_back(j);
    }
  }
  return out;
}

CsmcReport csmc_complete_with(const MaskedMatrix& obs, ColumnSelection selection, Stage1Solver solver,
                              const SolverConfig& cfg) {
  cfg.validate();
  const auto sub = obs.select_columns(selection.indices);
  if (sub.mask().empty()) {
    throw DomainError("no observations in selected columns");
  }
  CsmcReport report;
  report.selection = std::move(selection);

  const auto t1 = Clock::now();
  report.stage1 = complete(sub, solver, cfg);
  report.stage1_s = seconds_since(t1);

  const auto t2 = Clock::now();
  auto stage2 = stage2_solve(report.stage1.estimate, obs, cfg.threads);
  report.coefficients = std::move(stage2.coefficients);
  report.unconstrained_columns = std::move(stage2.unconstrained_columns);
  report.estimate = report.stage1.estimate * report.coefficients;
  report.stage2_s = seconds_since(t2);
  return report;
}

CsmcReport csmc_complete(const MaskedMatrix& obs, double alpha, Stage1Solver solver, const SolverConfig& cfg,
                         Rng& rng) {
  auto selection = sample_columns(obs.cols(), alpha, rng);
  return csmc_complete_with(obs, std::move(selection), solver, cfg);
}

}  // namespace csmc
