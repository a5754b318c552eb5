#pragma once

// Small dense linear algebra: a row-major matrix and an LU factorization
// with partial pivoting. Problem sizes here are a few hundred at most.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dps {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  [[nodiscard]] std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  [[nodiscard]] std::vector<double> column(std::size_t c) const;

  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  [[nodiscard]] Matrix multiply(const Matrix& other) const;
  [[nodiscard]] Matrix transpose() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);

/// PA = LU for a square matrix.
class LuDecomposition {
 public:
  /// Returns nullopt when some pivot has magnitude below `pivot_tolerance`.
  static std::optional<LuDecomposition> factor(Matrix a, double pivot_tolerance);

  [[nodiscard]] std::vector<double> solve(std::span<const double> b) const;
  /// x^T A = b^T, i.e. A^T x = b.
  [[nodiscard]] std::vector<double> solve_transposed(std::span<const double> b) const;
  [[nodiscard]] Matrix inverse() const;
  [[nodiscard]] double min_pivot() const noexcept { return min_pivot_; }

 private:
  LuDecomposition(Matrix lu, std::vector<std::size_t> perm, double min_pivot)
      : lu_(std::move(lu)), perm_(std::move(perm)), min_pivot_(min_pivot) {}

  Matrix lu_;
  std::vector<std::size_t> perm_;
  double min_pivot_;
};

}  // namespace dps
