#pragma once

// Coherence, conditioning and the sample-size conditions under which the
// column-regression stage reproduces M exactly.

#include "csmc/matrix.hpp"

#include <cstdint>

namespace csmc {

/// (n/k) * max_i ||row_i(basis)||^2 for a column-orthonormal n x k basis.
/// Throws DomainError if the basis is not orthonormal within 1e-8.
double subspace_coherence(const Matrix& basis);

struct Coherence {
  double mu0 = 0.0;  // max(mu(U), mu(V))
  Index rank = 0;
};

inline constexpr double default_rank_tol = 1e-10;

/// Numerical rank (singular values > rank_tol * sigma_1) and the coherence
/// of the leading left and right singular subspaces.
Coherence coherence(const Matrix& x, double rank_tol = default_rank_tol);

/// sigma_1 / sigma_r with r the numerical rank.
double condition_number(const Matrix& x, double rank_tol = default_rank_tol);

struct RecoveryBounds {
  std::int64_t d_min = 1;      // ceil(7 mu0(M) r (gamma + ln r))
  std::int64_t omega_min = 1;  // ceil(r~ n2 mu0(C) (gamma + ln(n2 r~ / 2)))
  double success_prob = 0.0;   // 1 - 3 exp(-gamma), floored at 0
  std::int64_t thm1_d_min = 1; // ceil(1.06 mu0(M) r ln(r n2))
  double coherence_inflation = 0.0;  // 100 kappa^2 mu0(M), a-priori bound on mu0(C)
};

struct RecoveryInputs {
  Index n1 = 0;
  Index n2 = 0;
  Index rank = 0;          // r
  Index rank_c = 0;        // r~, rank of the column submatrix
  double mu0_m = 1.0;
  double mu0_c = 1.0;
  double kappa = 1.0;
  double gamma = 0.0;
};

RecoveryBounds recovery_bounds(const RecoveryInputs& in);

}  // namespace csmc
