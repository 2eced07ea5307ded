#pragma once

// Matrix containers, the sampling operator R_Omega, singular value
// thresholding and the masked least-squares primitive shared by every solver.

#include <Eigen/Dense>

#include <compare>
#include <optional>
#include <span>
#include <vector>

namespace csmc {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A single observed cell, 0-based.
struct Entry {
  Index row = 0;
  Index col = 0;

  friend auto operator<=>(const Entry&, const Entry&) = default;
};

/// The index set of known entries of an n1 x n2 matrix.
///
/// Entries are kept sorted lexicographically by (row, col) and are unique.
/// A compressed per-column copy of the row indices is built alongside so the
/// column-wise least-squares stage can extract Omega_j without searching.
class ObservationSet {
 public:
  ObservationSet() = default;

  /// Validates, sorts and freezes the entry list. Throws ShapeError on an
  /// out-of-range index and DomainError on a duplicate pair.
  ObservationSet(Index rows, Index cols, std::vector<Entry> entries);

  /// Every cell of a rows x cols matrix.
  static ObservationSet full(Index rows, Index cols);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// |Omega| / (n1 n2).
  double density() const noexcept;

  std::span<const Entry> entries() const noexcept { return entries_; }

  /// Sorted row indices observed in column j.
  std::span<const Index> column(Index j) const;

  bool contains(Index row, Index col) const;

  /// The mask of the column submatrix X[:, columns], with columns re-indexed
  /// 0..columns.size()-1 in the given order.
  ObservationSet restrict_columns(std::span<const Index> columns) const;

  friend bool operator==(const ObservationSet& a, const ObservationSet& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  void build_columns();

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Entry> entries_;
  std::vector<Index> col_start_;
  std::vector<Index> col_rows_;
};

/// Dense value store paired with the set of cells that carry information.
/// Values outside the mask are stored as exactly 0 and never read.
class MaskedMatrix {
 public:
  MaskedMatrix() = default;

  /// Copies `values` and zeroes every cell outside `mask`. Observed values
  /// must be finite.
  MaskedMatrix(const Matrix& values, ObservationSet mask);

  const Matrix& values() const noexcept { return values_; }
  const ObservationSet& mask() const noexcept { return mask_; }
  Index rows() const noexcept { return values_.rows(); }
  Index cols() const noexcept { return values_.cols(); }
  double density() const noexcept { return mask_.density(); }

  /// m[Omega_j, j] in the row order of mask().column(j).
  Vector observed_column(Index j) const;

  /// Column submatrix with the mask restricted to those columns.
  MaskedMatrix select_columns(std::span<const Index> columns) const;

 private:
  Matrix values_;
  ObservationSet mask_;
};

/// Thin SVD X = U diag(sigma) V^T with sigma non-increasing.
struct SvdFactors {
  Matrix U;
  Vector sigma;
  Matrix V;

  Index rank() const noexcept { return sigma.size(); }
  Matrix reconstruct() const;
};

SvdFactors thin_svd(const Matrix& x);

/// Keep only singular values strictly greater than `cutoff`.
SvdFactors truncate(SvdFactors f, double cutoff);

double spectral_norm(const Matrix& x);
double nuclear_norm(const Matrix& x);

/// R_Omega(X): entries on Omega kept, everything else set to 0.
Matrix project_observed(const Matrix& x, const ObservationSet& omega);

/// Output of a singular value shrink together with the quantities the
/// solvers need for their objective and rank traces.
struct SvtResult {
  Matrix value;
  Index rank = 0;             // count of singular values > tau
  double nuclear_norm = 0.0;  // sum of max(sigma_i - tau, 0)
};

/// Proximal operator of tau * ||.||_*: U max(Sigma - tau, 0) V^T.
SvtResult svt_detailed(const Matrix& x, double tau);

inline Matrix svt(const Matrix& x, double tau) { return svt_detailed(x, tau).value; }

/// Relative cutoff used by every pseudoinverse in the project.
double pinv_rcond(Index rows, Index cols);

/// Minimum-norm minimiser of ||A[rows, :] z - b||_2 through a truncated
/// pseudoinverse. Returns nullopt when `rows` is empty, i.e. the column is
/// unconstrained and the caller decides what to do with it.
std::optional<Vector> masked_least_squares(const Matrix& a, std::span<const Index> rows, const Vector& b);

/// Same, with singular values at or below rcond * sigma_1 discarded.
std::optional<Vector> masked_least_squares(const Matrix& a, std::span<const Index> rows, const Vector& b,
                                           double rcond);

/// Frobenius norm of R_Omega(X - M) divided by that of R_Omega(M).
double feasibility_residual(const Matrix& x, const MaskedMatrix& obs);

}  // namespace csmc
