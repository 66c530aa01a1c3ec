#include "fpnni/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fpnni/error.hpp"

namespace fpnni::linalg {

namespace {

constexpr int kJacobiSweeps = 100;
constexpr double kJacobiThreshold = 1e-14;
constexpr double kSymmetryTol = 1e-12;
constexpr double kSpdFloor = 1e-12;

void require_finite(std::span<const double> v) {
  if (!all_finite(v)) throw InvalidArgument("matrix entries must be finite");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch(std::string("shape mismatch in ") + op);
  }
}

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw InvalidArgument("matrix dimensions must be >= 1");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) throw InvalidArgument("matrix dimensions must be >= 1");
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("entry count does not match rows x cols");
  }
  require_finite(data_);
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw InvalidArgument("matrix dimensions must be >= 1");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_);
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  require_finite(m.data_);
  return m;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw InvalidArgument("matrix dimensions must be >= 1");
  }
  const std::size_t cols = rows.front().size();
  std::vector<double> entries;
  entries.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionMismatch("ragged matrix rows");
    entries.insert(entries.end(), r.begin(), r.end());
  }
  return Matrix(rows.size(), cols, std::move(entries));
}

std::vector<std::vector<double>> Matrix::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    out[i].assign(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator+");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "operator-");
  Matrix c = a;
  for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
  return c;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.rows_) throw DimensionMismatch("inner dimensions differ in operator*");
  Matrix c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data_) v *= s;
  return c;
}

Vector operator*(const Matrix& a, std::span<const double> x) {
  if (a.cols_ != x.size()) throw DimensionMismatch("matrix-vector dimension mismatch");
  Vector y(a.rows_, 0.0);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) {
  // Scaled to avoid overflow for large states.
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (double v : a) {
    const double r = v / scale;
    s += r * r;
  }
  return scale * std::sqrt(s);
}

Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("add: length mismatch");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] + b[i];
  return c;
}

Vector sub(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("sub: length mismatch");
  Vector c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[i] - b[i];
  return c;
}

Vector scale(double s, std::span<const double> a) {
  Vector c(a.begin(), a.end());
  for (double& v : c) v *= s;
  return c;
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

double frobenius_norm(const Matrix& a) { return norm2(a.data()); }

double inf_norm(const Matrix& a) {
  double best = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

double quadratic_form(const Matrix& s, std::span<const double> x) {
  return dot(x, s * x);
}

Matrix symmetrize(const Matrix& s) {
  if (!s.square()) throw DimensionMismatch("symmetrize: matrix is not square");
  return 0.5 * (s + s.transpose());
}

SymEigen sym_eigen(const Matrix& s) {
  if (!s.square()) throw NotSymmetric("sym_eigen: matrix is not square");
  const double scale = inf_norm(s);
  if (inf_norm(s - s.transpose()) > kSymmetryTol * scale) {
    throw NotSymmetric("sym_eigen: matrix is not symmetric within 1e-12 relative");
  }

  const std::size_t n = s.rows();
  Matrix a = symmetrize(s);
  Matrix v = Matrix::identity(n);
  const double threshold = kJacobiThreshold * frobenius_norm(a);

  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (++sweep > kJacobiSweeps) {
      throw NoConvergence("sym_eigen: Jacobi sweep budget exhausted", off_diagonal_norm(a));
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the 2x2 subproblem, small-angle root for stability.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SymEigen out{Vector(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

double spectral_norm(const Matrix& a) {
  const SymEigen e = sym_eigen(a.transpose() * a);
  return std::sqrt(std::max(0.0, e.max()));
}

SpdRoots spd_sqrt(const Matrix& q) {
  const SymEigen e = sym_eigen(q);
  if (e.min() <= kSpdFloor) {
    throw NotPositiveDefinite("spd_sqrt: lambda_min(Q) = " + std::to_string(e.min()));
  }
  const std::size_t n = q.rows();
  Vector root(n), inv_root(n);
  for (std::size_t k = 0; k < n; ++k) {
    root[k] = std::sqrt(e.values[k]);
    inv_root[k] = 1.0 / root[k];
  }
  const Matrix vt = e.vectors.transpose();
  Matrix half = symmetrize(e.vectors * Matrix::diagonal(root) * vt);
  Matrix neg_half = symmetrize(e.vectors * Matrix::diagonal(inv_root) * vt);
  return {std::move(half), std::move(neg_half)};
}

DefinitenessCheck is_negative_semidefinite(const Matrix& s, double tol) {
  const double top = sym_eigen(s).max();
  return {top <= tol, top};
}

DefinitenessCheck is_positive_definite(const Matrix& s, double tol) {
  const double bottom = sym_eigen(s).min();
  return {bottom > tol, bottom};
}

}  // namespace fpnni::linalg
