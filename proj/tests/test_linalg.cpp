#include <cmath>
#include <vector>

#include <doctest.h>

#include "sparsedyn/linalg.hpp"
#include "sparsedyn/rng.hpp"

using namespace sparsedyn;

namespace {

// Independent oracle: plain Gauss-Jordan elimination with partial pivoting.
// Deliberately shares no code with the library solvers.
Matrix gauss_jordan_inverse(Matrix a) {
  const std::size_t n = a.rows();
  REQUIRE(a.cols() == n);
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
    REQUIRE(std::fabs(a(piv, col)) > 1e-300);
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(col, j), a(piv, j));
      std::swap(inv(col, j), inv(piv, j));
    }
    const double d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

Matrix random_spd(Rng& rng, std::size_t n) {
  const Matrix a = random_matrix(rng, n + 3, n);
  Matrix s = gram(a);
  for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.5;
  return s;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  REQUIRE(a.rows() == b.rows());
  REQUIRE(a.cols() == b.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::fabs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("matvec, matmul, gram and scaled_outer against naive loops") {
  Rng rng(3);
  const Matrix a = random_matrix(rng, 5, 4);
  const Matrix b = random_matrix(rng, 4, 3);
  const Vector x = {1.0, -2.0, 0.5, 3.0};
  const Vector d = {0.5, 1.5, 2.0, 0.25};

  const Vector ax = matvec(a, x);
  for (std::size_t i = 0; i < 5; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j) s += a(i, j) * x[j];
    CHECK(ax[i] == doctest::Approx(s).epsilon(1e-14));
  }

  const Vector y = {1.0, 2.0, 3.0, 4.0, 5.0};
  const Vector aty = matvec_t(a, y);
  for (std::size_t j = 0; j < 4; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += a(i, j) * y[i];
    CHECK(aty[j] == doctest::Approx(s).epsilon(1e-14));
  }

  const Matrix ab = matmul(a, b);
  REQUIRE(ab.rows() == 5);
  REQUIRE(ab.cols() == 3);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < 4; ++l) s += a(i, l) * b(l, j);
      CHECK(ab(i, j) == doctest::Approx(s).epsilon(1e-13));
    }

  const Matrix g = gram(a);
  CHECK(max_abs_diff(g, matmul(a.transposed(), a)) < 1e-13);

  const Matrix so = scaled_outer(a, d);
  Matrix scaled = a;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j) scaled(i, j) *= d[j];
  CHECK(max_abs_diff(so, matmul(scaled, a.transposed())) < 1e-13);
}

TEST_CASE("transposed and select_cols") {
  Matrix a(2, 3);
  a(0, 0) = 1;
  a(0, 1) = 2;
  a(0, 2) = 3;
  a(1, 0) = 4;
  a(1, 1) = 5;
  a(1, 2) = 6;
  const Matrix t = a.transposed();
  CHECK(t.rows() == 3);
  CHECK(t(2, 1) == 6);
  CHECK(t(0, 1) == 4);
  const Matrix s = a.select_cols({2, 0});
  CHECK(s.cols() == 2);
  CHECK(s(0, 0) == 3);
  CHECK(s(1, 1) == 4);
}

TEST_CASE("cholesky solve matches the Gauss-Jordan inverse") {
  Rng rng(10);
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    const Matrix s = random_spd(rng, n);
    const Matrix inv = gauss_jordan_inverse(s);
    const Cholesky chol(s);

    const Vector b = random_matrix(rng, n, 1).col(0);
    const Vector x = chol.solve(b);
    const Vector x_ref = matvec(inv, b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(x_ref[i]).epsilon(1e-9));

    // matrix right-hand side
    const Matrix bm = random_matrix(rng, n, 3);
    CHECK(max_abs_diff(chol.solve(bm), matmul(inv, bm)) < 1e-8);
    CHECK(chol.jitter_used() == 0.0);
  }
}

TEST_CASE("cholesky log determinant") {
  // diag(2, 8): log det = log 16
  Matrix s(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 8.0;
  CHECK(Cholesky(s).log_det() == doctest::Approx(std::log(16.0)).epsilon(1e-12));

  // random SPD: compare against the product of eigenvalues
  Rng rng(4);
  const Matrix m = random_spd(rng, 6);
  const Vector ev = symmetric_eigenvalues(m);
  double ld = 0.0;
  for (double e : ev) ld += std::log(e);
  CHECK(Cholesky(m).log_det() == doctest::Approx(ld).epsilon(1e-9));
}

TEST_CASE("cholesky recovers from a semidefinite matrix with jitter") {
  // rank-1 PSD matrix, exactly singular
  Matrix s(3, 3);
  const double v[3] = {1.0, 2.0, 3.0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s(i, j) = v[i] * v[j];
  const Cholesky chol(s);
  CHECK(chol.jitter_used() > 0.0);
  // the jittered solve still approximately satisfies the normal equations
  const Vector b = {1.0, 2.0, 3.0};
  const Vector x = chol.solve(b);
  for (double xi : x) CHECK(std::isfinite(xi));
}

TEST_CASE("cholesky rejects an indefinite matrix") {
  Matrix s(2, 2);
  s(0, 0) = 1.0;
  s(0, 1) = s(1, 0) = 0.0;
  s(1, 1) = -5.0;
  CHECK_THROWS_AS(Cholesky(s), LinalgError);
}

TEST_CASE("svd reconstructs and has orthonormal factors") {
  Rng rng(21);
  for (auto [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{
           {5, 3}, {3, 5}, {6, 6}, {1, 4}, {4, 1}}) {
    const Matrix a = random_matrix(rng, r, c);
    const Svd svd = jacobi_svd(a);
    const std::size_t k = std::min(r, c);
    REQUIRE(svd.sigma.size() == k);

    for (std::size_t i = 1; i < k; ++i) CHECK(svd.sigma[i - 1] >= svd.sigma[i]);

    CHECK(max_abs_diff(gram(svd.u), Matrix::identity(k)) < 1e-10);
    CHECK(max_abs_diff(gram(svd.v), Matrix::identity(k)) < 1e-10);

    Matrix us = svd.u;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < k; ++j) us(i, j) *= svd.sigma[j];
    CHECK(max_abs_diff(matmul(us, svd.v.transposed()), a) < 1e-10);
  }
}

TEST_CASE("singular values match eigenvalues of the gram matrix") {
  // independent route: sigma_i^2 are the eigenvalues of a^T a
  Rng rng(8);
  const Matrix a = random_matrix(rng, 7, 4);
  const Svd svd = jacobi_svd(a);
  Vector ev = symmetric_eigenvalues(gram(a));  // ascending
  REQUIRE(ev.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double sig = svd.sigma[3 - i];
    CHECK(sig * sig == doctest::Approx(std::max(ev[i], 0.0)).epsilon(1e-9));
  }
}

TEST_CASE("svd of a known diagonal matrix") {
  Matrix a(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = -1.0;  // singular value 1, sign goes into the factors
  a(2, 2) = 2.0;
  const Svd svd = jacobi_svd(a);
  CHECK(svd.sigma[0] == doctest::Approx(3.0));
  CHECK(svd.sigma[1] == doctest::Approx(2.0));
  CHECK(svd.sigma[2] == doctest::Approx(1.0));
}

TEST_CASE("least squares: overdetermined full rank equals normal equations") {
  Rng rng(31);
  const Matrix a = random_matrix(rng, 10, 4);
  const Vector b = random_matrix(rng, 10, 1).col(0);
  std::size_t rank = 0;
  const Vector x = lstsq_minnorm(a, b, -1.0, &rank);
  CHECK(rank == 4);

  // oracle: solve a^T a x = a^T b with the Gauss-Jordan inverse
  const Vector x_ref = matvec(gauss_jordan_inverse(gram(a)), matvec_t(a, b));
  for (std::size_t j = 0; j < 4; ++j) CHECK(x[j] == doctest::Approx(x_ref[j]).epsilon(1e-9));
}

TEST_CASE("least squares: duplicated column gets the minimum-norm split") {
  // y = 2 * x with the same column twice: min-norm solution is (1, 1)
  Matrix a(4, 2);
  for (std::size_t i = 0; i < 4; ++i) a(i, 0) = a(i, 1) = static_cast<double>(i) + 1.0;
  Vector b(4);
  for (std::size_t i = 0; i < 4; ++i) b[i] = 2.0 * a(i, 0);
  std::size_t rank = 0;
  const Vector x = lstsq_minnorm(a, b, -1.0, &rank);
  CHECK(rank == 1);
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("least squares: underdetermined system") {
  // single equation x0 + 2 x1 = 5, min-norm answer is (1, 2)
  Matrix a(1, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  const Vector x = lstsq_minnorm(a, {5.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("power iteration finds the top eigenvalue") {
  Matrix s(2, 2);
  s(0, 0) = 2.0;
  s(0, 1) = s(1, 0) = 1.0;
  s(1, 1) = 2.0;  // eigenvalues 1 and 3
  CHECK(power_iteration_max_eig(s) == doctest::Approx(3.0).epsilon(1e-8));

  Rng rng(12);
  const Matrix m = random_spd(rng, 9);
  const Vector ev = symmetric_eigenvalues(m);
  CHECK(power_iteration_max_eig(m) == doctest::Approx(ev.back()).epsilon(1e-7));
}

TEST_CASE("symmetric eigenvalues on analytic cases") {
  Matrix s(2, 2);
  s(0, 0) = 4.0;
  s(0, 1) = s(1, 0) = 1.0;
  s(1, 1) = 2.0;
  // roots of l^2 - 6 l + 7
  const Vector ev = symmetric_eigenvalues(s);
  CHECK(ev[0] == doctest::Approx(3.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(3.0 + std::sqrt(2.0)).epsilon(1e-12));

  // trace and determinant consistency on a random symmetric matrix
  Rng rng(9);
  Matrix m = random_matrix(rng, 5, 5);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j) m(i, j) = m(j, i);
  const Vector e = symmetric_eigenvalues(m);
  double tr = 0.0, esum = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    tr += m(i, i);
    esum += e[i];
  }
  CHECK(esum == doctest::Approx(tr).epsilon(1e-10));
}

}  // TEST_SUITE
