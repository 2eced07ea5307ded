#pragma once

// Reference computations used only by tests. They go through different
// decompositions (JacobiSVD, pivoted QR, normal equations) than the library
// so that agreement is evidence rather than tautology.

#include <csmc/matrix.hpp>
#include <csmc/sampling.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace csmc::oracle {

inline Matrix gaussian(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Matrix low_rank(Index rows, Index cols, Index rank, Rng& rng) {
  return gaussian(rows, rank, rng) * gaussian(rank, cols, rng);
}

/// Random matrix with orthonormal columns via Householder QR.
inline Matrix orthonormal(Index rows, Index cols, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

/// Full SVD shrink-and-rebuild with the one-sided Jacobi algorithm.
inline Matrix svt(const Matrix& x, double tau) {
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector s = svd.singularValues();
  Matrix shrunk = Matrix::Zero(x.rows(), x.cols());
  for (Index k = 0; k < s.size(); ++k) {
    const double v = std::max(s(k) - tau, 0.0);
    shrunk += v * svd.matrixU().col(k) * svd.matrixV().col(k).transpose();
  }
  return shrunk;
}

inline double nuclear(const Matrix& x) {
  return Eigen::JacobiSVD<Matrix>(x).singularValues().sum();
}

/// Moore-Penrose pseudoinverse via Jacobi SVD with a relative cutoff.
inline Matrix pinv(const Matrix& a, double rcond = 1e-12) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector inv = Vector::Zero(s.size());
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > rcond * s(0)) inv(k) = 1.0 / s(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Coherence of range(x) straight from the definition: an orthonormal basis
/// from column-pivoted QR, the projector P = Q Q^T and (n / r) max_i P_ii.
inline double range_coherence(const Matrix& x, Index rank) {
  Eigen::ColPivHouseholderQR<Matrix> qr(x);
  Matrix q = qr.householderQ() * Matrix::Identity(x.rows(), rank);
  Matrix p = q * q.transpose();
  double best = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    Vector e = Vector::Zero(x.rows());
    e(i) = 1.0;
    best = std::max(best, (p * e).squaredNorm());
  }
  return static_cast<double>(x.rows()) / static_cast<double>(rank) * best;
}

inline double definition_mu0(const Matrix& x, Index rank) {
  return std::max(range_coherence(x, rank), range_coherence(x.transpose(), rank));
}

/// Soft-impute in its textbook form: Z <- svt(P_Omega(M) + P_Omega_perp(Z), lambda)
/// until the iterate stops moving.
inline Matrix soft_impute(const MaskedMatrix& obs, double lambda, int max_iters, double tol) {
  Matrix z = Matrix::Zero(obs.rows(), obs.cols());
  Matrix observed_mask = Matrix::Zero(obs.rows(), obs.cols());
  for (const auto& e : obs.mask().entries()) observed_mask(e.row, e.col) = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    Matrix filled = obs.values().cwiseProduct(observed_mask) + z.cwiseProduct(Matrix::Ones(obs.rows(), obs.cols()) - observed_mask);
    Matrix next = svt(filled, lambda);
    const double change = (next - z).norm() / std::max(1.0, z.norm());
    z = std::move(next);
    if (change < tol) break;
  }
  return z;
}

}  // namespace csmc::oracle
