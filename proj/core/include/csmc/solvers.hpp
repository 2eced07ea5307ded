#pragma once

// Nuclear-norm completion solvers and the matrix-factorization baseline.
//
// pgd_complete minimises the regularised objective
//     F(X) = 1/2 ||R_Omega(X - M)||_F^2 + lambda ||X||_*
// by proximal gradient steps X <- svt(X + t R_Omega(M - X), t lambda).
// nn_complete approaches the equality-constrained problem
//     min ||X||_*  s.t.  R_Omega(X) = R_Omega(M)
// by running the same iteration over a geometrically decreasing lambda
// schedule with warm starts.

#include "csmc/matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace csmc {

struct ContinuationConfig {
  double eta = 2.0;                    // lambda_{i+1} = lambda_i / eta
  double lambda_min_ratio = 1e-8;      // lambda_min = ratio * lambda_0 unless lambda_min is set
  std::optional<double> lambda_min;
  double tol_feas = 1e-6;              // stop once the observed-entry residual drops below this
};

struct SolverConfig {
  /// Regulariser for pgd_complete. Unset means lambda_ratio * ||R_Omega(M)||_2.
  std::optional<double> lambda;
  double lambda_ratio = 1e-2;
  double step = 1.0;
  std::size_t max_iters = 500;  // per lambda value
  double tol_rel = 1e-6;        // relative objective change
  ContinuationConfig continuation;
  std::uint64_t seed = 0;
  std::size_t trace_every = 1;
  int threads = 1;  // stage-II column parallelism; recorded for reproducibility

  /// Throws DomainError when a field is outside its documented range.
  void validate() const;
};

struct TraceRow {
  std::size_t iteration = 0;
  double lambda = 0.0;
  double objective = 0.0;
  double residual = 0.0;  // ||R_Omega(X - M)||_F / ||R_Omega(M)||_F
  Index rank = 0;
  double elapsed_s = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  int threads = 1;

  std::size_t size() const noexcept { return rows.size(); }
  bool empty() const noexcept { return rows.empty(); }
};

enum class CompletionStatus {
  converged,
  max_iterations,
  infeasible_tolerance,  // continuation schedule exhausted above tol_feas
};

std::string to_string(CompletionStatus status);

struct CompletionResult {
  Matrix estimate;
  ConvergenceTrace trace;
  std::string solver;
  CompletionStatus status = CompletionStatus::converged;
  std::size_t iterations = 0;
  double residual = 0.0;
  double elapsed_s = 0.0;
};

/// 1/2 ||R_Omega(X - M)||_F^2 + lambda * nuclear, with the nuclear norm of X
/// supplied by the caller.
double regularized_objective(const Matrix& x, const MaskedMatrix& obs, double lambda, double nuclear);

/// ||R_Omega(M)||_2: the smallest lambda for which X = 0 is optimal.
double lambda_max(const MaskedMatrix& obs);

CompletionResult pgd_complete(const MaskedMatrix& obs, const SolverConfig& cfg);

/// Proximal gradient from an explicit starting point at a fixed lambda.
/// Used by the continuation driver; exposed for warm-start checks.
CompletionResult pgd_complete_from(const MaskedMatrix& obs, const Matrix& start, double lambda,
                                   const SolverConfig& cfg);

CompletionResult nn_complete(const MaskedMatrix& obs, const SolverConfig& cfg);

/// Continuation over an explicit lambda schedule. Stops early once the
/// residual falls below cfg.continuation.tol_feas.
CompletionResult nn_complete_schedule(const MaskedMatrix& obs, const std::vector<double>& lambdas,
                                      const SolverConfig& cfg, const Matrix* start = nullptr);

/// Alternating ridge least squares for min 1/2 ||R_Omega(M - L R^T)||^2 +
/// reg/2 (||L||^2 + ||R||^2) with rank-k factors.
CompletionResult mf_als_complete(const MaskedMatrix& obs, Index k, double reg, const SolverConfig& cfg);

/// The objective minimised by mf_als_complete.
double mf_objective(const MaskedMatrix& obs, const Matrix& left, const Matrix& right, double reg);

}  // namespace csmc
