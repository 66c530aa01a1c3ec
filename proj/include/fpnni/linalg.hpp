#pragma once

// Small dense real linear algebra. Matrices here are at most ~10x10, so
// everything is plain row-major storage and O(n^3) loops.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fpnni::linalg {

using Vector = std::vector<double>;

class Matrix {
 public:
  /// rows x cols zero matrix. Both dimensions must be >= 1.
  Matrix(std::size_t rows, std::size_t cols);
  /// Row-major entries; every entry must be finite.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  /// Nested row lists, e.g. {{7, -3}, {-4, 2}}.
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> d);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }

  std::span<const double> data() const noexcept { return data_; }
  std::vector<std::vector<double>> to_rows() const;

  Matrix transpose() const;

  friend Matrix operator+(const Matrix& a, const Matrix& b);
  friend Matrix operator-(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator*(double s, const Matrix& a);
  friend Vector operator*(const Matrix& a, std::span<const double> x);
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Vector helpers.
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
Vector add(std::span<const double> a, std::span<const double> b);
Vector sub(std::span<const double> a, std::span<const double> b);
Vector scale(double s, std::span<const double> a);
bool all_finite(std::span<const double> a);

double frobenius_norm(const Matrix& a);
/// Max absolute row sum.
double inf_norm(const Matrix& a);
/// Quadratic form x^T S x.
double quadratic_form(const Matrix& s, std::span<const double> x);

/// Eigen-decomposition of a symmetric matrix. Eigenvalues ascending; the
/// eigenvectors are the columns of `vectors`, in the same order.
struct SymEigen {
  Vector values;
  Matrix vectors;

  double min() const { return values.front(); }
  double max() const { return values.back(); }
};

/// Cyclic Jacobi. Throws NotSymmetric when ||S - S^T||_inf exceeds 1e-12 of
/// ||S||_inf, NoConvergence past the sweep budget.
SymEigen sym_eigen(const Matrix& s);

/// sqrt(lambda_max(A^T A)).
double spectral_norm(const Matrix& a);

struct SpdRoots {
  Matrix half;      // Q^{1/2}
  Matrix neg_half;  // Q^{-1/2}
};

/// Symmetric square root and inverse square root. Throws NotPositiveDefinite
/// when lambda_min(Q) <= 1e-12.
SpdRoots spd_sqrt(const Matrix& q);

/// Result of a definiteness test: the extremal eigenvalue is kept as a
/// signed margin so callers can report slack.
struct DefinitenessCheck {
  bool holds;
  double margin;
};

/// True iff lambda_max(S) <= tol; margin = lambda_max(S).
DefinitenessCheck is_negative_semidefinite(const Matrix& s, double tol);
/// True iff lambda_min(S) > tol; margin = lambda_min(S).
DefinitenessCheck is_positive_definite(const Matrix& s, double tol);

/// (S + S^T) / 2 for a square matrix.
Matrix symmetrize(const Matrix& s);

}  // namespace fpnni::linalg
