#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "sparsedyn/linalg.hpp"
#include "sparsedyn/rng.hpp"
#include "sparsedyn/weighted_l1.hpp"

using namespace sparsedyn;

namespace {

double soft(double v, double t) {
  const double a = std::fabs(v) - t;
  return a > 0.0 ? std::copysign(a, v) : 0.0;
}

Matrix random_matrix(Rng& rng, std::size_t r, std::size_t c) {
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = rng.normal();
  return m;
}

// Orthonormal columns from the left factor of an SVD.
Matrix random_orthonormal(Rng& rng, std::size_t r, std::size_t c) {
  return jacobi_svd(random_matrix(rng, r, c)).u;
}

L1Options with_method(L1Method m) {
  L1Options o;
  o.method = m;
  return o;
}

}  // namespace

TEST_SUITE("weighted_l1") {

TEST_CASE("objective value is the penalized residual") {
  Matrix phi(2, 2);
  phi(0, 0) = 1.0;
  phi(1, 1) = 2.0;
  const Vector y = {1.0, 1.0};
  const Vector w = {2.0, -1.0};
  // residual (1-2, 1+2) = (-1, 3), weighted penalty 1*2 + 3*1 = 5
  CHECK(weighted_l1_objective(phi, y, {1.0, 3.0}, 0.5, w) ==
        doctest::Approx(1.0 + 9.0 + 2.0 * 0.5 * 5.0));
}

TEST_CASE("identity design reduces to soft thresholding") {
  const Matrix phi = Matrix::identity(4);
  const Vector y = {3.0, -0.2, 1.0, -2.5};
  const Vector u = {1.0, 1.0, 2.0, 0.5};
  const double lambda = 0.4;
  for (L1Method m : {L1Method::coordinate_descent, L1Method::admm}) {
    const L1Solution sol = solve_weighted_l1(phi, y, u, lambda, {}, with_method(m));
    REQUIRE(sol.status == SolveStatus::converged);
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(sol.w[j] == doctest::Approx(soft(y[j], lambda * u[j])).epsilon(1e-7));
    // the exactly-thresholded coordinate is an exact zero, not a small number
    CHECK(sol.w[1] == 0.0);
  }
}

TEST_CASE("orthonormal design matches the closed-form solution") {
  Rng rng(2);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix phi = random_orthonormal(rng, 12, 5);
    Vector y(12);
    for (double& v : y) v = 2.0 * rng.normal();
    Vector u(5);
    for (double& v : u) v = 0.2 + rng.uniform01();
    const double lambda = 0.3;
    const Vector g = matvec_t(phi, y);
    for (L1Method m : {L1Method::coordinate_descent, L1Method::admm}) {
      const L1Solution sol = solve_weighted_l1(phi, y, u, lambda, {}, with_method(m));
      for (std::size_t j = 0; j < 5; ++j)
        CHECK(sol.w[j] == doctest::Approx(soft(g[j], lambda * u[j])).epsilon(1e-6));
    }
  }
}

TEST_CASE("zero weights without constraints give the least squares solution") {
  Rng rng(5);
  const Matrix phi = random_matrix(rng, 8, 3);
  const Vector w0 = {1.0, -2.0, 0.5};
  const Vector y = matvec(phi, w0);
  const L1Solution sol = solve_weighted_l1(phi, y, Vector(3, 0.0), 0.7);
  for (std::size_t j = 0; j < 3; ++j) CHECK(sol.w[j] == doctest::Approx(w0[j]).epsilon(1e-8));
}

TEST_CASE("solver methods agree on random unconstrained problems") {
  Rng rng(14);
  for (int rep = 0; rep < 8; ++rep) {
    const std::size_t n = 6 + rep;
    const Matrix phi = random_matrix(rng, 2 * n + 4, n);
    Vector y(phi.rows());
    for (double& v : y) v = rng.normal();
    Vector u(n, 1.0);
    u[0] = 0.0;  // one unpenalized coordinate
    const double lambda = 0.2;

    const L1Solution cd = solve_weighted_l1(phi, y, u, lambda, {},
                                            with_method(L1Method::coordinate_descent));
    const L1Solution ad = solve_weighted_l1(phi, y, u, lambda, {}, with_method(L1Method::admm));
    REQUIRE(cd.status == SolveStatus::converged);
    REQUIRE(ad.status == SolveStatus::converged);
    for (std::size_t j = 0; j < n; ++j)
      CHECK(std::fabs(cd.w[j] - ad.w[j]) <= 1e-6 * std::max(1.0, std::fabs(cd.w[j])));
    CHECK(ad.objective == doctest::Approx(cd.objective).epsilon(1e-8));
  }
}

TEST_CASE("solutions satisfy the stationarity conditions") {
  Rng rng(33);
  const Matrix phi = random_matrix(rng, 20, 9);
  Vector y(20);
  for (double& v : y) v = rng.normal();
  const Vector u(9, 1.0);
  const double lambda = 0.15;
  const Vector g = matvec_t(phi, y);
  const double scale = std::max(1.0, 2.0 * norm_inf(g));
  for (L1Method m : {L1Method::coordinate_descent, L1Method::admm}) {
    const L1Solution sol = solve_weighted_l1(phi, y, u, lambda, {}, with_method(m));
    CHECK(weighted_l1_kkt_residual(phi, y, u, lambda, sol.w) <= 1e-5 * scale);
    CHECK(weighted_l1_objective(phi, y, u, lambda, sol.w) <=
          weighted_l1_objective(phi, y, u, lambda, Vector(9, 0.0)));
  }
}

TEST_CASE("equality constrained solution matches a dense line search") {
  // two variables tied by w1 + w2 = 1: scan the feasible line as the oracle
  Matrix phi(3, 2);
  phi(0, 0) = 1.0;
  phi(0, 1) = 0.0;
  phi(1, 0) = 0.0;
  phi(1, 1) = 1.0;
  phi(2, 0) = 1.0;
  phi(2, 1) = 1.0;
  const Vector y = {1.0, 2.0, 0.5};
  const Vector u = {1.0, 1.0};
  const double lambda = 0.3;

  LinearConstraints con;
  con.eq_matrix = Matrix(1, 2);
  con.eq_matrix(0, 0) = con.eq_matrix(0, 1) = 1.0;
  con.eq_rhs = {1.0};

  auto objective_at = [&](double w1) {
    return weighted_l1_objective(phi, y, u, lambda, {w1, 1.0 - w1});
  };
  double lo = -3.0, hi = 3.0, best = 0.0;
  for (int pass = 0; pass < 4; ++pass) {
    double best_f = std::numeric_limits<double>::infinity();
    const double step = (hi - lo) / 10000.0;
    for (int i = 0; i <= 10000; ++i) {
      const double w1 = lo + step * i;
      const double f = objective_at(w1);
      if (f < best_f) {
        best_f = f;
        best = w1;
      }
    }
    lo = best - 2.0 * step;
    hi = best + 2.0 * step;
  }

  const L1Solution sol = solve_weighted_l1(phi, y, u, lambda, con);
  REQUIRE(sol.status == SolveStatus::converged);
  CHECK(sol.w[0] == doctest::Approx(best).epsilon(1e-5));
  CHECK(sol.w[0] + sol.w[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(constraint_violation(con, sol.w) <= 1e-8);
}

TEST_CASE("inequality constraints hold at the solution") {
  Rng rng(40);
  const Matrix phi = random_matrix(rng, 15, 4);
  const Vector w0 = {1.5, -2.0, 0.0, 0.75};
  const Vector y = matvec(phi, w0);

  // nonnegativity: -w <= 0
  LinearConstraints con;
  con.ineq_matrix = Matrix(4, 4);
  for (int i = 0; i < 4; ++i) con.ineq_matrix(i, i) = -1.0;
  con.ineq_rhs = Vector(4, 0.0);

  const L1Solution sol = solve_weighted_l1(phi, y, Vector(4, 1.0), 0.05, con);
  REQUIRE(sol.status == SolveStatus::converged);
  for (double w : sol.w) CHECK(w >= -1e-8);
  CHECK(constraint_violation(con, sol.w) <= 1e-8);
  // restricting the feasible set cannot improve the optimum
  CHECK(weighted_l1_objective(phi, y, {1, 1, 1, 1}, 0.05, sol.w) >=
        solve_weighted_l1(phi, y, Vector(4, 1.0), 0.05).objective - 1e-9);
}

TEST_CASE("active inequality pins the solution to the boundary") {
  // unconstrained minimum of ||y - w||^2 at w = 2, constraint w <= 1
  Matrix phi(1, 1);
  phi(0, 0) = 1.0;
  LinearConstraints con;
  con.ineq_matrix = Matrix(1, 1);
  con.ineq_matrix(0, 0) = 1.0;
  con.ineq_rhs = {1.0};
  const L1Solution sol = solve_weighted_l1(phi, {2.0}, {0.0}, 0.1, con);
  CHECK(sol.w[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("contradictory equalities are reported infeasible") {
  Matrix phi(3, 2);
  phi(0, 0) = phi(1, 1) = phi(2, 0) = 1.0;
  LinearConstraints con;
  con.eq_matrix = Matrix(2, 2);
  con.eq_matrix(0, 0) = 1.0;
  con.eq_matrix(1, 0) = 1.0;
  con.eq_rhs = {1.0, 2.0};  // w1 = 1 and w1 = 2
  const L1Solution sol = solve_weighted_l1(phi, {1.0, 1.0, 1.0}, {1.0, 1.0}, 0.1, con);
  CHECK(sol.status == SolveStatus::infeasible);
}

TEST_CASE("contradictory inequalities are reported infeasible") {
  Matrix phi(2, 1);
  phi(0, 0) = phi(1, 0) = 1.0;
  LinearConstraints con;
  con.ineq_matrix = Matrix(2, 1);
  con.ineq_matrix(0, 0) = 1.0;   //  w <= -1
  con.ineq_matrix(1, 0) = -1.0;  // -w <= -2, i.e. w >= 2
  con.ineq_rhs = {-1.0, -2.0};
  const L1Solution sol = solve_weighted_l1(phi, {0.0, 0.0}, {1.0}, 0.1, con);
  CHECK(sol.status == SolveStatus::infeasible);
}

TEST_CASE("warm starts reproduce the solution") {
  Rng rng(50);
  const Matrix phi = random_matrix(rng, 12, 5);
  Vector y(12);
  for (double& v : y) v = rng.normal();
  const Vector u(5, 1.0);
  const L1Solution cold = solve_weighted_l1(phi, y, u, 0.25);
  L1Options warm;
  warm.warm_start = cold.w;
  const L1Solution hot = solve_weighted_l1(phi, y, u, 0.25, {}, warm);
  for (std::size_t j = 0; j < 5; ++j) CHECK(hot.w[j] == doctest::Approx(cold.w[j]).epsilon(1e-7));
  CHECK(hot.iterations <= cold.iterations);
}

TEST_CASE("argument validation") {
  Matrix phi(3, 2);
  phi(0, 0) = 1.0;
  const Vector y = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(solve_weighted_l1(phi, {1.0}, {1.0, 1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_weighted_l1(phi, y, {1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_weighted_l1(phi, y, {1.0, -1.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_weighted_l1(phi, y, {1.0, 1.0}, -0.1), std::invalid_argument);

  LinearConstraints con;
  con.eq_matrix = Matrix(1, 3);  // wrong variable count
  con.eq_rhs = {1.0};
  CHECK_THROWS_AS(solve_weighted_l1(phi, y, {1.0, 1.0}, 0.1, con), std::invalid_argument);

  LinearConstraints ok;
  ok.eq_matrix = Matrix(1, 2);
  ok.eq_matrix(0, 0) = 1.0;
  ok.eq_rhs = {0.5};
  CHECK_THROWS_AS(
      solve_weighted_l1(phi, y, {1.0, 1.0}, 0.1, ok, with_method(L1Method::coordinate_descent)),
      std::invalid_argument);
}

}  // TEST_SUITE
