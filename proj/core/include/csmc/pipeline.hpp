#pragma once

// Two-stage Columns Selected Matrix Completion.
//
// Stage I samples d = max(1, round(alpha n2)) columns uniformly, restricts the
// observations to them and completes the n1 x d submatrix C with a
// nuclear-norm solver. Stage II regresses every column of M on the completed
// C_hat using only that column's observed rows, giving M_hat = C_hat Z_hat.

#include "csmc/matrix.hpp"
#include "csmc/sampling.hpp"
#include "csmc/solvers.hpp"

#include <string>
#include <vector>

namespace csmc {

enum class Stage1Solver { pgd, nn };

std::string to_string(Stage1Solver s);
Stage1Solver parse_stage1_solver(const std::string& name);

/// Run the chosen nuclear-norm solver on the full problem.
CompletionResult complete(const MaskedMatrix& obs, Stage1Solver solver, const SolverConfig& cfg);

struct Stage2Result {
  Matrix coefficients;                        // Z_hat, d x n2
  std::vector<Index> unconstrained_columns;  // columns with no observed entry
};

/// Column-wise least squares against the completed submatrix. Each column j
/// gets the minimum-norm solution of ||C_hat[Omega_j, :] z - m[Omega_j, j]||;
/// columns without observations get z = 0 and are listed. `threads` splits
/// the columns across workers; the result does not depend on it.
Stage2Result stage2_solve(const Matrix& c_hat, const MaskedMatrix& obs, int threads = 1);

struct CsmcReport {
  ColumnSelection selection;
  CompletionResult stage1;  // on the n1 x d submatrix
  Matrix coefficients;      // Z_hat, d x n2
  Matrix estimate;          // M_hat = C_hat Z_hat
  std::vector<Index> unconstrained_columns;
  double stage1_s = 0.0;
  double stage2_s = 0.0;

  double elapsed_s() const noexcept { return stage1_s + stage2_s; }
};

/// Algorithm CSMC-alpha. Stage II uses every observed entry of M, including
/// those in the selected columns.
CsmcReport csmc_complete(const MaskedMatrix& obs, double alpha, Stage1Solver solver, const SolverConfig& cfg,
                         Rng& rng);

/// Stage I/II with a caller-provided column selection.
CsmcReport csmc_complete_with(const MaskedMatrix& obs, ColumnSelection selection, Stage1Solver solver,
                              const SolverConfig& cfg);

}  // namespace csmc
