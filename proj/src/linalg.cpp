#include "dps/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace dps {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

std::vector<double> Matrix::multiply(std::span<const double> x) const {
  assert(x.size() == cols_);
  std::vector<double> y(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) y[r] = dot(row(r), x);
  return y;
}

Matrix Matrix::multiply(const Matrix& other) const {
  assert(cols_ == other.rows_);
  Matrix out(rows_, other.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < other.cols_; ++j) out(i, j) += a * other(k, j);
    }
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) worst = std::max(worst, max_abs_diff(a.row(r), b.row(r)));
  return worst;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

std::optional<LuDecomposition> LuDecomposition::factor(Matrix a, double pivot_tolerance) {
  const std::size_t n = a.rows();
  assert(a.cols() == n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double min_pivot = n == 0 ? 0.0 : std::abs(a(0, 0));

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    const double p = a(pivot, col);
    min_pivot = col == 0 ? std::abs(p) : std::min(min_pivot, std::abs(p));
    if (std::abs(p) < pivot_tolerance) return std::nullopt;
    if (pivot != col) {
      std::swap_ranges(a.row(col).begin(), a.row(col).end(), a.row(pivot).begin());
      std::swap(perm[col], perm[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a(r, col) / p;
      a(r, col) = factor;
      if (factor == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) a(r, c) -= factor * a(col, c);
    }
  }
  return LuDecomposition(std::move(a), std::move(perm), min_pivot);
}

std::vector<double> LuDecomposition::solve(std::span<const double> b) const {
  const std::size_t n = lu_.rows();
  assert(b.size() == n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
    x[i] = s;
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * x[j];
    x[i] = s / lu_(i, i);
  }
  return x;
}

std::vector<double> LuDecomposition::solve_transposed(std::span<const double> b) const {
  // A = P^T L U, so A^T x = U^T L^T P x = b.
  const std::size_t n = lu_.rows();
  assert(b.size() == n);
  std::vector<double> z(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) {
    double s = z[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * z[j];
    z[i] = s / lu_(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = z[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lu_(j, i) * z[j];
    z[i] = s;
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
  return x;
}

Matrix LuDecomposition::inverse() const {
  const std::size_t n = lu_.rows();
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    e[c] = 1.0;
    const auto col = solve(e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    e[c] = 0.0;
  }
  return inv;
}

}  // namespace dps
