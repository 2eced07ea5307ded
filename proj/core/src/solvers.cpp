#include "csmc/solvers.hpp"

#include "csmc/errors.hpp"
#include "csmc/sampling.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace csmc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double observed_sq_error(const Matrix& x, const MaskedMatrix& obs) {
  double sum = 0.0;
  const auto& m = obs.values();
  for (const auto& e : obs.mask().entries()) {
    const double d = x(e.row, e.col) - m(e.row, e.col);
    sum += d * d;
  }
  return sum;
}

void require_observations(const MaskedMatrix& obs, const char* solver) {
  if (obs.mask().empty()) {
    throw DomainError(fmt::format("{}: no observed entries", solver));
  }
}

// One proximal-gradient run at a fixed lambda, appending to `trace`.
struct PgdState {
  Matrix x;
  double nuclear = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

void run_pgd(PgdState& state, const MaskedMatrix& obs, double lambda, const SolverConfig& cfg,
             ConvergenceTrace& trace, std::size_t& global_iter, Clock::time_point start) {
  const double t = cfg.step;
  const auto& m = obs.values();
  double prev = regularized_objective(state.x, obs, lambda, state.nuclear);
  state.converged = false;
  state.iterations = 0;
  Matrix y;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    y = state.x;
    for (const auto& e : obs.mask().entries()) {
      y(e.row, e.col) += t * (m(e.row, e.col) - state.x(e.row, e.col));
    }
    if (!y.allFinite()) {
      throw DivergenceError("pgd", global_iter + 1);
    }
    auto shrunk = svt_detailed(y, t * lambda);
    if (!shrunk.value.allFinite()) {
      throw DivergenceError("pgd", global_iter + 1);
    }
    const double step_norm = (shrunk.value - state.x).norm();
    state.x = std::move(shrunk.value);
    state.nuclear = shrunk.nuclear_norm;
    ++state.iterations;
    ++global_iter;

    const double obj = regularized_objective(state.x, obs, lambda, state.nuclear);
    if (cfg.trace_every > 0 && (global_iter % cfg.trace_every == 0)) {
      trace.rows.push_back(
          {global_iter, lambda, obj, feasibility_residual(state.x, obs), shrunk.rank, seconds_since(start)});
    }
    const double change = std::abs(prev - obj) / std::max(prev, std::numeric_limits<double>::min());
    prev = obj;
    const bool fixed_point = step_norm <= 1e-10 * std::max(1.0, state.x.norm());
    if (obj == 0.0 || change < cfg.tol_rel || fixed_point) {
      state.converged = true;
      break;
    }
  }
}

// Solve  min_x ||a x - b||^2 + reg ||x||^2  (minimum norm when reg == 0).
Vector ridge_solve(const Matrix& a, const Vector& b, double reg) {
  if (reg > 0.0) {
    Matrix gram = a.transpose() * a;
    gram.diagonal().array() += reg;
    return gram.llt().solve(a.transpose() * b);
  }
  return a.completeOrthogonalDecomposition().solve(b);
}

}  // namespace

std::string to_string(CompletionStatus status) {
  switch (status) {
    case CompletionStatus::converged:
      return "converged";
    case CompletionStatus::max_iterations:
      return "max-iterations";
    case CompletionStatus::infeasible_tolerance:
      return "infeasible-tolerance";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (lambda && !(*lambda >= 0.0)) {
    throw DomainError(fmt::format("lambda must be non-negative, got {}", *lambda));
  }
  if (!(lambda_ratio >= 0.0)) {
    throw DomainError("lambda_ratio must be non-negative");
  }
  if (!(step > 0.0 && step <= 1.0)) {
    throw DomainError(fmt::format("step size must lie in (0, 1], got {}", step));
  }
  if (max_iters == 0) {
    throw DomainError("max_iters must be positive");
  }
  if (!(tol_rel > 0.0)) {
    throw DomainError("tol_rel must be positive");
  }
  if (!(continuation.eta > 1.0)) {
    throw DomainError(fmt::format("continuation factor eta must exceed 1, got {}", continuation.eta));
  }
  if (!(continuation.tol_feas > 0.0)) {
    throw DomainError("tol_feas must be positive");
  }
  if (!(continuation.lambda_min_ratio > 0.0) || (continuation.lambda_min && !(*continuation.lambda_min > 0.0))) {
    throw DomainError("lambda_min must be positive");
  }
  if (threads < 1) {
    throw DomainError("threads must be at least 1");
  }
}

double regularized_objective(const Matrix& x, const MaskedMatrix& obs, double lambda, double nuclear) {
  return 0.5 * observed_sq_error(x, obs) + lambda * nuclear;
}

double lambda_max(const MaskedMatrix& obs) { return spectral_norm(obs.values()); }

CompletionResult pgd_complete_from(const MaskedMatrix& obs, const Matrix& start, double lambda,
                                   const SolverConfig& cfg) {
  cfg.validate();
  require_observations(obs, "pgd");
  if (start.rows() != obs.rows() || start.cols() != obs.cols()) {
    throw ShapeError("pgd: starting point shape does not match the observations");
  }
  const auto t0 = Clock::now();
  CompletionResult result;
  result.solver = "pgd";
  result.trace.threads = cfg.threads;
  PgdState state{start, start.isZero(0.0) ? 0.0 : nuclear_norm(start)};
  std::size_t global_iter = 0;
  run_pgd(state, obs, lambda, cfg, result.trace, global_iter, t0);
  result.estimate = std::move(state.x);
  result.iterations = global_iter;
  result.status = state.converged ? CompletionStatus::converged : CompletionStatus::max_iterations;
  result.residual = feasibility_residual(result.estimate, obs);
  result.elapsed_s = seconds_since(t0);
  return result;
}

CompletionResult pgd_complete(const MaskedMatrix& obs, const SolverConfig& cfg) {
  cfg.validate();
  require_observations(obs, "pgd");
  const double lambda = cfg.lambda ? *cfg.lambda : cfg.lambda_ratio * lambda_max(obs);
  return pgd_complete_from(obs, Matrix::Zero(obs.rows(), obs.cols()), lambda, cfg);
}

CompletionResult nn_complete_schedule(const MaskedMatrix& obs, const std::vector<double>& lambdas,
                                      const SolverConfig& cfg, const Matrix* start) {
  cfg.validate();
  require_observations(obs, "nn");
  const auto t0 = Clock::now();
  CompletionResult result;
  result.solver = "nn";
  result.trace.threads = cfg.threads;

  PgdState state;
  if (start) {
    if (start->rows() != obs.rows() || start->cols() != obs.cols()) {
      throw ShapeError("nn: starting point shape does not match the observations");
    }
    state.x = *start;
    state.nuclear = start->isZero(0.0) ? 0.0 : nuclear_norm(*start);
  } else {
    state.x = Matrix::Zero(obs.rows(), obs.cols());
  }
  std::size_t global_iter = 0;
  bool feasible = false;
  bool inner_converged = true;
  for (double lambda : lambdas) {
    run_pgd(state, obs, lambda, cfg, result.trace, global_iter, t0);
    inner_converged = state.converged;
    if (feasibility_residual(state.x, obs) < cfg.continuation.tol_feas) {
      feasible = true;
      break;
    }
  }
  result.estimate = std::move(state.x);
  result.iterations = global_iter;
  result.residual = feasibility_residual(result.estimate, obs);
  if (feasible) {
    result.status = CompletionStatus::converged;
  } else {
    result.status = inner_converged ? CompletionStatus::infeasible_tolerance : CompletionStatus::max_iterations;
  }
  result.elapsed_s = seconds_since(t0);
  return result;
}

CompletionResult nn_complete(const MaskedMatrix& obs, const SolverConfig& cfg) {
  cfg.validate();
  require_observations(obs, "nn");
  const double lambda0 = lambda_max(obs);
  if (lambda0 == 0.0) {
    // every observed value is zero; X = 0 is feasible with zero nuclear norm
    CompletionResult result;
    result.solver = "nn";
    result.estimate = Matrix::Zero(obs.rows(), obs.cols());
    result.trace.threads = cfg.threads;
    return result;
  }
  const double floor =
      cfg.continuation.lambda_min ? *cfg.continuation.lambda_min : cfg.continuation.lambda_min_ratio * lambda0;
  std::vector<double> schedule;
  for (double lambda = lambda0; lambda >= floor; lambda /= cfg.continuation.eta) {
    schedule.push_back(lambda);
  }
  return nn_complete_schedule(obs, schedule, cfg);
}

double mf_objective(const MaskedMatrix& obs, const Matrix& left, const Matrix& right, double reg) {
  double sum = 0.0;
  const auto& m = obs.values();
  for (const auto& e : obs.mask().entries()) {
    const double d = m(e.row, e.col) - left.row(e.row).dot(right.row(e.col));
    sum += d * d;
  }
  return 0.5 * sum + 0.5 * reg * (left.squaredNorm() + right.squaredNorm());
}

CompletionResult mf_als_complete(const MaskedMatrix& obs, Index k, double reg, const SolverConfig& cfg) {
  cfg.validate();
  require_observations(obs, "mf");
  if (k < 1) {
    throw DomainError("factorization rank k must be positive");
  }
  if (k > std::min(obs.rows(), obs.cols())) {
    throw DomainError(fmt::format("factorization rank {} exceeds min(n1, n2) = {}", k, std::min(obs.rows(), obs.cols())));
  }
  if (!(reg >= 0.0)) {
    throw DomainError("ridge regulariser must be non-negative");
  }
  const auto t0 = Clock::now();
  const Index n1 = obs.rows();
  const Index n2 = obs.cols();
  const auto& m = obs.values();

  // per-row column lists; entries are sorted by row so each row is contiguous
  std::vector<std::size_t> row_start(static_cast<std::size_t>(n1) + 1, 0);
  for (const auto& e : obs.mask().entries()) {
    ++row_start[static_cast<std::size_t>(e.row) + 1];
  }
  for (std::size_t i = 0; i < static_cast<std::size_t>(n1); ++i) {
    row_start[i + 1] += row_start[i];
  }
  const auto entries = obs.mask().entries();

  Rng rng(cfg.seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix left(n1, k);
  Matrix right(n2, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n1; ++i) left(i, j) = scale * rng.normal();
  }
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i < n2; ++i) right(i, j) = scale * rng.normal();
  }

  CompletionResult result;
  result.solver = "mf";
  result.trace.threads = cfg.threads;
  std::size_t half_steps = 0;
  auto record = [&](double obj) {
    ++half_steps;
    if (cfg.trace_every > 0 && half_steps % cfg.trace_every == 0) {
      result.trace.rows.push_back({half_steps, reg, obj, std::numeric_limits<double>::quiet_NaN(), k, seconds_since(t0)});
    }
  };

  double prev = mf_objective(obs, left, right, reg);
  result.status = CompletionStatus::max_iterations;
  std::size_t sweeps = 0;
  for (; sweeps < cfg.max_iters; ++sweeps) {
    for (Index i = 0; i < n1; ++i) {
      const auto begin = row_start[static_cast<std::size_t>(i)];
      const auto end = row_start[static_cast<std::size_t>(i) + 1];
      if (begin == end) {
        left.row(i).setZero();  // the ridge minimiser; with reg = 0 the minimum-norm one
        continue;
      }
      const auto cnt = static_cast<Index>(end - begin);
      Matrix a(cnt, k);
      Vector b(cnt);
      for (std::size_t t = begin; t < end; ++t) {
        const auto& e = entries[t];
        a.row(static_cast<Index>(t - begin)) = right.row(e.col);
        b(static_cast<Index>(t - begin)) = m(e.row, e.col);
      }
      left.row(i) = ridge_solve(a, b, reg).transpose();
    }
    record(mf_objective(obs, left, right, reg));

    for (Index j = 0; j < n2; ++j) {
      auto rows = obs.mask().column(j);
      if (rows.empty()) {
        right.row(j).setZero();
        continue;
      }
      const auto cnt = static_cast<Index>(rows.size());
      Matrix a(cnt, k);
      Vector b(cnt);
      for (Index t = 0; t < cnt; ++t) {
        a.row(t) = left.row(rows[static_cast<std::size_t>(t)]);
        b(t) = m(rows[static_cast<std::size_t>(t)], j);
      }
      right.row(j) = ridge_solve(a, b, reg).transpose();
    }
    const double obj = mf_objective(obs, left, right, reg);
    record(obj);
    if (!std::isfinite(obj)) {
      throw DivergenceError("mf", sweeps + 1);
    }
    const double change = std::abs(prev - obj) / std::max(prev, std::numeric_limits<double>::min());
    prev = obj;
    if (obj == 0.0 || change < cfg.tol_rel) {
      result.status = CompletionStatus::converged;
      ++sweeps;
      break;
    }
  }
  result.estimate = left * right.transpose();
  result.iterations = sweeps;
  result.residual = feasibility_residual(result.estimate, obs);
  result.elapsed_s = seconds_since(t0);
  return result;
}

}  // namespace csmc
