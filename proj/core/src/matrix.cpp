#include "csmc/matrix.hpp"

#include "csmc/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace csmc {

ObservationSet::ObservationSet(Index rows, Index cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (rows < 0 || cols < 0) {
    throw ShapeError(fmt::format("negative observation set shape {}x{}", rows, cols));
  }
  for (const auto& e : entries_) {
    if (e.row < 0 || e.row >= rows || e.col < 0 || e.col >= cols) {
      throw ShapeError(fmt::format("observed index ({}, {}) outside {}x{}", e.row, e.col, rows, cols));
    }
  }
  std::sort(entries_.begin(), entries_.end());
  auto dup = std::adjacent_find(entries_.begin(), entries_.end());
  if (dup != entries_.end()) {
    throw DomainError(fmt::format("duplicate observed index ({}, {})", dup->row, dup->col));
  }
  build_columns();
}

ObservationSet ObservationSet::full(Index rows, Index cols) {
  std::vector<Entry> all;
  all.reserve(static_cast<std::size_t>(rows * cols));
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      all.push_back({i, j});
    }
  }
  return ObservationSet(rows, cols, std::move(all));
}

void ObservationSet::build_columns() {
  col_start_.assign(static_cast<std::size_t>(cols_) + 1, 0);
  for (const auto& e : entries_) {
    ++col_start_[static_cast<std::size_t>(e.col) + 1];
  }
  for (std::size_t j = 0; j < static_cast<std::size_t>(cols_); ++j) {
    col_start_[j + 1] += col_start_[j];
  }
  col_rows_.resize(entries_.size());
  std::vector<Index> fill(col_start_.begin(), col_start_.end() - 1);
  // entries_ is row-major sorted, so rows land in ascending order per column
  for (const auto& e : entries_) {
    col_rows_[static_cast<std::size_t>(fill[static_cast<std::size_t>(e.col)]++)] = e.row;
  }
}

double ObservationSet::density() const noexcept {
  if (rows_ == 0 || cols_ == 0) {
    return 0.0;
  }
  return static_cast<double>(entries_.size()) / (static_cast<double>(rows_) * static_cast<double>(cols_));
}

std::span<const Index> ObservationSet::column(Index j) const {
  if (j < 0 || j >= cols_) {
    throw ShapeError(fmt::format("column {} outside {} columns", j, cols_));
  }
  const auto begin = static_cast<std::size_t>(col_start_[static_cast<std::size_t>(j)]);
  const auto end = static_cast<std::size_t>(col_start_[static_cast<std::size_t>(j) + 1]);
  return std::span<const Index>(col_rows_).subspan(begin, end - begin);
}

bool ObservationSet::contains(Index row, Index col) const {
  if (col < 0 || col >= cols_) {
    return false;
  }
  auto rows = column(col);
  return std::binary_search(rows.begin(), rows.end(), row);
}

ObservationSet ObservationSet::restrict_columns(std::span<const Index> columns) const {
  std::vector<Entry> sub;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    for (Index i : column(columns[k])) {
      sub.push_back({i, static_cast<Index>(k)});
    }
  }
  return ObservationSet(rows_, static_cast<Index>(columns.size()), std::move(sub));
}

MaskedMatrix::MaskedMatrix(const Matrix& values, ObservationSet mask)
    : values_(Matrix::Zero(values.rows(), values.cols())), mask_(std::move(mask)) {
  if (mask_.rows() != values.rows() || mask_.cols() != values.cols()) {
    throw ShapeError(fmt::format("mask shape {}x{} does not match matrix {}x{}", mask_.rows(), mask_.cols(),
                                 values.rows(), values.cols()));
  }
  for (const auto& e : mask_.entries()) {
    const double v = values(e.row, e.col);
    if (!std::isfinite(v)) {
      throw DomainError(fmt::format("non-finite observed value at ({}, {})", e.row, e.col));
    }
    values_(e.row, e.col) = v;
  }
}

Vector MaskedMatrix::observed_column(Index j) const {
  auto rows = mask_.column(j);
  Vector b(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    b(static_cast<Index>(k)) = values_(rows[k], j);
  }
  return b;
}

MaskedMatrix MaskedMatrix::select_columns(std::span<const Index> columns) const {
  Matrix sub(rows(), static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (columns[k] < 0 || columns[k] >= cols()) {
      throw ShapeError(fmt::format("selected column {} outside {} columns", columns[k], cols()));
    }
    sub.col(static_cast<Index>(k)) = values_.col(columns[k]);
  }
  return MaskedMatrix(sub, mask_.restrict_columns(columns));
}

Matrix SvdFactors::reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }

SvdFactors thin_svd(const Matrix& x) {
  if (!x.allFinite()) {
    throw DomainError("SVD of a matrix with non-finite entries");
  }
  Eigen::BDCSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

SvdFactors truncate(SvdFactors f, double cutoff) {
  Index k = 0;
  while (k < f.sigma.size() && f.sigma(k) > cutoff) {
    ++k;
  }
  f.U.conservativeResize(Eigen::NoChange, k);
  f.V.conservativeResize(Eigen::NoChange, k);
  f.sigma.conservativeResize(k);
  return f;
}

double spectral_norm(const Matrix& x) {
  if (x.size() == 0) {
    return 0.0;
  }
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues()(0);
}

double nuclear_norm(const Matrix& x) {
  if (x.size() == 0) {
    return 0.0;
  }
  Eigen::BDCSVD<Matrix> svd(x);
  return svd.singularValues().sum();
}

Matrix project_observed(const Matrix& x, const ObservationSet& omega) {
  if (omega.rows() != x.rows() || omega.cols() != x.cols()) {
    throw ShapeError(fmt::format("mask shape {}x{} does not match matrix {}x{}", omega.rows(), omega.cols(),
                                 x.rows(), x.cols()));
  }
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& e : omega.entries()) {
    out(e.row, e.col) = x(e.row, e.col);
  }
  return out;
}

SvtResult svt_detailed(const Matrix& x, double tau) {
  if (!(tau >= 0.0)) {
    throw DomainError(fmt::format("threshold must be non-negative, got {}", tau));
  }
  auto f = truncate(thin_svd(x), tau);
  f.sigma.array() -= tau;
  SvtResult out;
  out.rank = f.rank();
  out.nuclear_norm = f.sigma.sum();
  out.value = f.rank() > 0 ? f.reconstruct() : Matrix::Zero(x.rows(), x.cols());
  return out;
}

double pinv_rcond(Index rows, Index cols) {
  return std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(rows, cols));
}

std::optional<Vector> masked_least_squares(const Matrix& a, std::span<const Index> rows, const Vector& b) {
  return masked_least_squares(a, rows, b, pinv_rcond(static_cast<Index>(rows.size()), a.cols()));
}

std::optional<Vector> masked_least_squares(const Matrix& a, std::span<const Index> rows, const Vector& b,
                                           double rcond) {
  if (rows.empty()) {
    return std::nullopt;
  }
  if (static_cast<Index>(rows.size()) != b.size()) {
    throw ShapeError(fmt::format("{} rows but {} right-hand side values", rows.size(), b.size()));
  }
  const Index m = static_cast<Index>(rows.size());
  Matrix sub(m, a.cols());
  for (Index k = 0; k < m; ++k) {
    const Index i = rows[static_cast<std::size_t>(k)];
    if (i < 0 || i >= a.rows()) {
      throw ShapeError(fmt::format("row {} outside design with {} rows", i, a.rows()));
    }
    sub.row(k) = a.row(i);
  }
  Eigen::BDCSVD<Matrix> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector z = Vector::Zero(a.cols());
  if (s.size() == 0 || s(0) == 0.0) {
    return z;
  }
  const double cutoff = rcond * s(0);
  const Vector utb = svd.matrixU().transpose() * b;
  for (Index k = 0; k < s.size() && s(k) > cutoff; ++k) {
    z.noalias() += (utb(k) / s(k)) * svd.matrixV().col(k);
  }
  return z;
}

double feasibility_residual(const Matrix& x, const MaskedMatrix& obs) {
  double num = 0.0;
  double den = 0.0;
  const auto& m = obs.values();
  for (const auto& e : obs.mask().entries()) {
    const double d = x(e.row, e.col) - m(e.row, e.col);
    num += d * d;
    den += m(e.row, e.col) * m(e.row, e.col);
  }
  if (den == 0.0) {
    return std::sqrt(num);
  }
  return std::sqrt(num / den);
}

}  // namespace csmc
