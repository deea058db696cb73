#pragma once

#include <optional>
#include <string_view>

#include "sparsedyn/linalg.hpp"

namespace sparsedyn {

// Optional affine constraints for the solver: eq_matrix * w = eq_rhs and
// ineq_matrix * w <= ineq_rhs (componentwise). Empty matrices mean absent.
struct LinearConstraints {
  Matrix eq_matrix;
  Vector eq_rhs;
  Matrix ineq_matrix;
  Vector ineq_rhs;

  bool empty() const { return eq_matrix.empty() && ineq_matrix.empty(); }
  std::size_t n_eq() const { return eq_matrix.rows(); }
  std::size_t n_ineq() const { return ineq_matrix.rows(); }
  // Throws std::invalid_argument on dimension mismatches against n variables.
  void validate(std::size_t n) const;
};

enum class SolveStatus {
  converged,
  max_iter,
  infeasible,
  degenerate,  // rank-deficient subproblem solved in the minimum-norm sense
};
std::string_view to_string(SolveStatus s);

struct L1Solution {
  Vector w;
  double objective = 0.0;
  SolveStatus status = SolveStatus::converged;
  int iterations = 0;
};

enum class L1Method {
  automatic,           // coordinate descent when unconstrained, ADMM otherwise
  admm,
  coordinate_descent,  // valid only without constraints
};

struct L1Options {
  double tol = 1e-8;
  int max_iter = 10000;
  L1Method method = L1Method::automatic;
  std::optional<Vector> warm_start;
};

// Minimizes  ||y - phi w||^2 + 2 lambda sum_j u_j |w_j|  subject to the given
// affine constraints. u_j >= 0 are per-coordinate penalty weights; u_j = 0
// leaves coordinate j unpenalized, and an all-zero u without constraints
// reduces to minimum-norm least squares.
L1Solution solve_weighted_l1(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                             const LinearConstraints& constraints = {},
                             const L1Options& options = {});

// Objective value at w (no constraint terms).
double weighted_l1_objective(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                             const Vector& w);

// Max-norm violation of the first-order optimality conditions of the
// unconstrained problem at w. Zero at an exact minimizer.
double weighted_l1_kkt_residual(const Matrix& phi, const Vector& y, const Vector& u,
                                double lambda, const Vector& w);

// Max-norm constraint violation at w (0 when constraints are absent).
double constraint_violation(const LinearConstraints& constraints, const Vector& w);

}  // namespace sparsedyn
