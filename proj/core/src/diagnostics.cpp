#include "csmc/diagnostics.hpp"

#include "csmc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace csmc {
namespace {

std::int64_t ceil_count(double x) { return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(x))); }

SvdFactors leading_subspaces(const Matrix& x, double rank_tol) {
  if (!x.allFinite()) {
    throw DomainError("coherence of a matrix with non-finite entries");
  }
  auto f = thin_svd(x);
  if (f.sigma.size() == 0 || f.sigma(0) == 0.0) {
    throw DomainError("zero matrix has no singular subspace");
  }
  const double cutoff = rank_tol * f.sigma(0);
  return truncate(std::move(f), cutoff);
}

}  // namespace

double subspace_coherence(const Matrix& basis) {
  const Index n = basis.rows();
  const Index k = basis.cols();
  if (k == 0 || n == 0) {
    throw DomainError("coherence of an empty basis");
  }
  const Matrix gram = basis.transpose() * basis;
  if ((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-8) {
    throw DomainError("coherence basis is not column-orthonormal");
  }
  const double max_leverage = basis.rowwise().squaredNorm().maxCoeff();
  return static_cast<double>(n) / static_cast<double>(k) * max_leverage;
}

Coherence coherence(const Matrix& x, double rank_tol) {
  const auto f = leading_subspaces(x, rank_tol);
  return {std::max(subspace_coherence(f.U), subspace_coherence(f.V)), f.rank()};
}

double condition_number(const Matrix& x, double rank_tol) {
  const auto f = leading_subspaces(x, rank_tol);
  return f.sigma(0) / f.sigma(f.rank() - 1);
}

RecoveryBounds recovery_bounds(const RecoveryInputs& in) {
  if (!(in.gamma > 0.0)) {
    throw DomainError(fmt::format("gamma must be positive, got {}", in.gamma));
  }
  if (in.n1 < 1 || in.n2 < 1 || in.rank < 1 || in.rank_c < 1) {
    throw DomainError("dimensions and ranks must be positive");
  }
  if (in.rank_c > in.rank) {
    throw DomainError("rank of the column submatrix cannot exceed rank of M");
  }
  if (!(in.mu0_m > 0.0 && in.mu0_c > 0.0 && in.kappa > 0.0)) {
    throw DomainError("coherence and condition number must be positive");
  }
  const double r = static_cast<double>(in.rank);
  const double rc = static_cast<double>(in.rank_c);
  const double n2 = static_cast<double>(in.n2);
  RecoveryBounds b;
  b.d_min = ceil_count(7.0 * in.mu0_m * r * (in.gamma + std::log(r)));
  b.omega_min = ceil_count(rc * n2 * in.mu0_c * (in.gamma + std::log(n2 * rc / 2.0)));
  b.success_prob = std::max(0.0, 1.0 - 3.0 * std::exp(-in.gamma));
  b.thm1_d_min = ceil_count(1.06 * in.mu0_m * r * std::log(r * n2));
  b.coherence_inflation = 100.0 * in.kappa * in.kappa * in.mu0_m;
  return b;
}

}  // namespace csmc
