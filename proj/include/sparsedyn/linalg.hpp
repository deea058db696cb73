#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Small dense linear algebra, enough for the solvers in this project. Row
// major storage; the heavy loops route through the dispatched kernels.
namespace sparsedyn {

using Vector = std::vector<double>;

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Vector col(std::size_t j) const {
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = data_[i * cols_ + j];
    return out;
  }

  Matrix transposed() const;

  // Copies the listed columns, preserving order.
  Matrix select_cols(const std::vector<std::size_t>& idx) const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  Vector data_;
};

struct LinalgError : std::runtime_error {
  explicit LinalgError(const std::string& what) : std::runtime_error(what) {}
};

// a * x
Vector matvec(const Matrix& a, const Vector& x);
// aᵀ * x
Vector matvec_t(const Matrix& a, const Vector& x);
// a * b
Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ * a
Matrix gram(const Matrix& a);
// a * diag(d) * aᵀ, d over columns of a
Matrix scaled_outer(const Matrix& a, const Vector& d);

double norm2(const Vector& x);
double norm_inf(const Vector& x);
double dot(const Vector& x, const Vector& y);

// Cholesky factorization of a symmetric positive definite matrix. On a pivot
// failure the factorization is retried with a small escalating diagonal
// jitter before giving up; genuinely indefinite input raises LinalgError.
class Cholesky {
 public:
  explicit Cholesky(const Matrix& a);

  Vector solve(const Vector& b) const;
  // Solves A X = B column-wise.
  Matrix solve(const Matrix& b) const;
  // log determinant of the (possibly jittered) factored matrix
  double log_det() const;
  double jitter_used() const { return jitter_; }

 private:
  Matrix l_;
  double jitter_ = 0.0;
};

// Thin SVD a = u * diag(sigma) * vᵀ with sigma descending, computed by
// one-sided Jacobi rotations. u is rows(a) x r, v is cols(a) x r where
// r = min(rows, cols).
struct Svd {
  Matrix u;
  Vector sigma;
  Matrix v;
};
Svd jacobi_svd(const Matrix& a);

// Minimum-norm least squares solution of a x ≈ b. Singular values below
// rcond * max(sigma) are treated as zero; rcond < 0 picks an epsilon-based
// default. rank_out, if given, receives the numerical rank.
Vector lstsq_minnorm(const Matrix& a, const Vector& b, double rcond = -1.0,
                     std::size_t* rank_out = nullptr);

// Largest eigenvalue of a symmetric PSD matrix by power iteration with a
// deterministic start vector.
double power_iteration_max_eig(const Matrix& s, int max_iter = 1000, double tol = 1e-10);

// All eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
Vector symmetric_eigenvalues(Matrix s);

}  // namespace sparsedyn
