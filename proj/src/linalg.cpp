#include "sparsedyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "sparsedyn/kernels.hpp"

namespace sparsedyn {

namespace {
constexpr double kTiny = 1e-300;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* r = row(i);
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = r[j];
  }
  return t;
}

Matrix Matrix::select_cols(const std::vector<std::size_t>& idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* src = row(i);
    double* dst = out.row(i);
    for (std::size_t k = 0; k < idx.size(); ++k) dst[k] = src[idx[k]];
  }
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (x.size() != a.cols()) throw LinalgError("matvec: dimension mismatch");
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    out[i] = kernels::dot(a.row(i), x.data(), a.cols());
  }
  return out;
}

Vector matvec_t(const Matrix& a, const Vector& x) {
  if (x.size() != a.rows()) throw LinalgError("matvec_t: dimension mismatch");
  Vector out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (x[i] != 0.0) kernels::axpy(x[i], a.row(i), out.data(), a.cols());
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw LinalgError("matmul: dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* arow = a.row(i);
    double* crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (arow[k] != 0.0) kernels::axpy(arow[k], b.row(k), crow, b.cols());
    }
  }
  return c;
}

Matrix gram(const Matrix& a) {
  Matrix g(a.cols(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (r[j] != 0.0) kernels::axpy(r[j], r, g.row(j), a.cols());
    }
  }
  return g;
}

Matrix scaled_outer(const Matrix& a, const Vector& d) {
  if (d.size() != a.cols()) throw LinalgError("scaled_outer: dimension mismatch");
  Matrix s(a.rows(), a.rows());
  Vector tmp(a.cols());
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const double* rp = a.row(p);
    for (std::size_t j = 0; j < a.cols(); ++j) tmp[j] = rp[j] * d[j];
    for (std::size_t q = p; q < a.rows(); ++q) {
      const double v = kernels::dot(tmp.data(), a.row(q), a.cols());
      s(p, q) = v;
      s(q, p) = v;
    }
  }
  return s;
}

double norm2(const Vector& x) { return std::sqrt(kernels::sumsq(x.data(), x.size())); }

double norm_inf(const Vector& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::fabs(v));
  return m;
}

double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw LinalgError("dot: dimension mismatch");
  return kernels::dot(x.data(), y.data(), x.size());
}

// ---------------------------------------------------------------------------
// Cholesky

namespace {

// Attempts an LLT factorization in place; returns false on a bad pivot.
bool try_llt(Matrix& l) {
  const std::size_t n = l.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = l(j, j) - kernels::dot(l.row(j), l.row(j), j);
    if (!(d > 0.0) || !std::isfinite(d)) return false;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      l(i, j) = (l(i, j) - kernels::dot(l.row(i), l.row(j), j)) / ljj;
    }
  }
  // zero the strict upper triangle so the factor is self-contained
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) l(i, j) = 0.0;
  }
  return true;
}

}  // namespace

Cholesky::Cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw LinalgError("cholesky: matrix not square");
  const std::size_t n = a.rows();
  double diag_scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) diag_scale += std::fabs(a(i, i));
  diag_scale = n > 0 ? diag_scale / static_cast<double>(n) : 0.0;
  if (diag_scale == 0.0) diag_scale = 1.0;

  const double levels[] = {0.0, 1e-14, 1e-10, 1e-6};
  for (double level : levels) {
    Matrix l = a;
    const double jitter = level * diag_scale;
    for (std::size_t i = 0; i < n; ++i) l(i, i) += jitter;
    if (try_llt(l)) {
      l_ = std::move(l);
      jitter_ = jitter;
      return;
    }
  }
  throw LinalgError("cholesky: matrix not positive definite");
}

Vector Cholesky::solve(const Vector& b) const {
  const std::size_t n = l_.rows();
  if (b.size() != n) throw LinalgError("cholesky solve: dimension mismatch");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = (b[i] - kernels::dot(l_.row(i), y.data(), i)) / l_(i, i);
  }
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * x[k];
    x[ii] = s / l_(ii, ii);
  }
  return x;
}

Matrix Cholesky::solve(const Matrix& b) const {
  if (b.rows() != l_.rows()) throw LinalgError("cholesky solve: dimension mismatch");
  Matrix x(b.rows(), b.cols());
  Vector col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    Vector xc = solve(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = xc[i];
  }
  return x;
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < l_.rows(); ++i) s += std::log(l_(i, i));
  return 2.0 * s;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD

namespace {

// Core routine for rows(a) >= cols(a). Works on the transpose so that the
// columns being rotated are contiguous in memory.
Svd jacobi_svd_tall(const Matrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix wt = a.transposed();        // n x m, row j is column j of a
  Matrix vt = Matrix::identity(n);   // accumulates right rotations, row-wise

  const double eps = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double* wp = wt.row(p);
        double* wq = wt.row(q);
        const double alpha = kernels::sumsq(wp, m);
        const double beta = kernels::sumsq(wq, m);
        const double gamma = kernels::dot(wp, wq, m);
        if (alpha * beta == 0.0) continue;
        if (std::fabs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double xp = wp[k];
          const double xq = wq[k];
          wp[k] = c * xp - s * xq;
          wq[k] = s * xp + c * xq;
        }
        double* vp = vt.row(p);
        double* vq = vt.row(q);
        for (std::size_t k = 0; k < n; ++k) {
          const double xp = vp[k];
          const double xq = vq[k];
          vp[k] = c * xp - s * xq;
          vq[k] = s * xp + c * xq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = std::sqrt(kernels::sumsq(wt.row(j), m));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return sigma[i] > sigma[j]; });

  Svd out;
  out.u = Matrix(m, n);
  out.v = Matrix(n, n);
  out.sigma.resize(n);
  for (std::size_t jj = 0; jj < n; ++jj) {
    const std::size_t src = order[jj];
    const double sg = sigma[src];
    out.sigma[jj] = sg;
    const double inv = sg > 0.0 ? 1.0 / sg : 0.0;
    const double* wrow = wt.row(src);
    for (std::size_t i = 0; i < m; ++i) out.u(i, jj) = wrow[i] * inv;
    const double* vrow = vt.row(src);
    for (std::size_t i = 0; i < n; ++i) out.v(i, jj) = vrow[i];
  }
  return out;
}

}  // namespace

Svd jacobi_svd(const Matrix& a) {
  if (a.empty()) throw LinalgError("svd: empty matrix");
  if (a.rows() >= a.cols()) return jacobi_svd_tall(a);
  Svd t = jacobi_svd_tall(a.transposed());
  return Svd{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

Vector lstsq_minnorm(const Matrix& a, const Vector& b, double rcond, std::size_t* rank_out) {
  if (b.size() != a.rows()) throw LinalgError("lstsq: dimension mismatch");
  const Svd svd = jacobi_svd(a);
  const double smax = svd.sigma.empty() ? 0.0 : svd.sigma.front();
  const double cutoff =
      (rcond < 0.0 ? static_cast<double>(std::max(a.rows(), a.cols())) *
                         std::numeric_limits<double>::epsilon()
                   : rcond) *
      smax;
  Vector x(a.cols(), 0.0);
  std::size_t rank = 0;
  for (std::size_t j = 0; j < svd.sigma.size(); ++j) {
    const double sg = svd.sigma[j];
    if (sg <= cutoff || sg == 0.0) continue;
    ++rank;
    double uj_b = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) uj_b += svd.u(i, j) * b[i];
    const double coef = uj_b / sg;
    for (std::size_t i = 0; i < a.cols(); ++i) x[i] += coef * svd.v(i, j);
  }
  if (rank_out) *rank_out = rank;
  return x;
}

double power_iteration_max_eig(const Matrix& s, int max_iter, double tol) {
  if (s.rows() != s.cols()) throw LinalgError("power iteration: matrix not square");
  const std::size_t n = s.rows();
  if (n == 0) return 0.0;
  // deterministic start, slightly tilted to avoid unlucky orthogonality
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  const double nx = norm2(x);
  kernels::scal(1.0 / nx, x.data(), n);

  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Vector y = matvec(s, x);
    const double lambda_new = dot(x, y);
    const double ny = norm2(y);
    if (ny == 0.0) return 0.0;
    kernels::scal(1.0 / ny, y.data(), n);
    x = std::move(y);
    if (it > 0 && std::fabs(lambda_new - lambda) <= tol * std::max(std::fabs(lambda_new), kTiny)) {
      return lambda_new;
    }
    lambda = lambda_new;
  }
  return lambda;
}

Vector symmetric_eigenvalues(Matrix s) {
  if (s.rows() != s.cols()) throw LinalgError("eigenvalues: matrix not square");
  const std::size_t n = s.rows();
  double fro = 0.0;
  for (std::size_t i = 0; i < n; ++i) fro += kernels::sumsq(s.row(i), n);
  fro = std::sqrt(fro);
  const double stop = 1e-13 * (fro + kTiny);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += 2.0 * s(i, j) * s(i, j);
    }
    if (std::sqrt(off) <= stop) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double tau = (s(q, q) - s(p, p)) / (2.0 * apq);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double skp = s(k, p);
          const double skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double spk = s(p, k);
          const double sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

}  // namespace sparsedyn
