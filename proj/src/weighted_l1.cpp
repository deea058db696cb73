#include "sparsedyn/weighted_l1.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsedyn/kernels.hpp"

namespace sparsedyn {

void LinearConstraints::validate(std::size_t n) const {
  if (!eq_matrix.empty()) {
    if (eq_matrix.cols() != n) throw std::invalid_argument("eq_matrix column count mismatch");
    if (eq_rhs.size() != eq_matrix.rows()) throw std::invalid_argument("eq_rhs size mismatch");
  } else if (!eq_rhs.empty()) {
    throw std::invalid_argument("eq_rhs given without eq_matrix");
  }
  if (!ineq_matrix.empty()) {
    if (ineq_matrix.cols() != n) throw std::invalid_argument("ineq_matrix column count mismatch");
    if (ineq_rhs.size() != ineq_matrix.rows()) throw std::invalid_argument("ineq_rhs size mismatch");
  } else if (!ineq_rhs.empty()) {
    throw std::invalid_argument("ineq_rhs given without ineq_matrix");
  }
}

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

double weighted_l1_objective(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                             const Vector& w) {
  Vector r = matvec(phi, w);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  double penalty = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) penalty += u[j] * std::fabs(w[j]);
  return kernels::sumsq(r.data(), r.size()) + 2.0 * lambda * penalty;
}

double weighted_l1_kkt_residual(const Matrix& phi, const Vector& y, const Vector& u,
                                double lambda, const Vector& w) {
  Vector r = matvec(phi, w);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = y[i] - r[i];
  const Vector g = matvec_t(phi, r);  // note: gradient is -2 g
  double worst = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double grad = -2.0 * g[j];
    const double thr = 2.0 * lambda * u[j];
    double v;
    if (w[j] != 0.0) {
      v = std::fabs(grad + (w[j] > 0.0 ? thr : -thr));
    } else {
      v = std::max(0.0, std::fabs(grad) - thr);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double constraint_violation(const LinearConstraints& constraints, const Vector& w) {
  double v = 0.0;
  if (constraints.n_eq() > 0) {
    const Vector aw = matvec(constraints.eq_matrix, w);
    for (std::size_t i = 0; i < aw.size(); ++i) {
      v = std::max(v, std::fabs(aw[i] - constraints.eq_rhs[i]));
    }
  }
  if (constraints.n_ineq() > 0) {
    const Vector gw = matvec(constraints.ineq_matrix, w);
    for (std::size_t i = 0; i < gw.size(); ++i) {
      v = std::max(v, gw[i] - constraints.ineq_rhs[i]);
    }
  }
  return v;
}

namespace {

void validate_inputs(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                     const LinearConstraints& constraints, const L1Options& options) {
  if (phi.rows() == 0 || phi.cols() == 0) throw std::invalid_argument("phi is empty");
  if (y.size() != phi.rows()) throw std::invalid_argument("y size does not match phi rows");
  if (u.size() != phi.cols()) throw std::invalid_argument("u size does not match phi columns");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  for (double uj : u) {
    if (!(uj >= 0.0) || !std::isfinite(uj)) {
      throw std::invalid_argument("penalty weights must be nonnegative and finite");
    }
  }
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  constraints.validate(phi.cols());
  if (options.warm_start && options.warm_start->size() != phi.cols()) {
    throw std::invalid_argument("warm start size mismatch");
  }
  if (options.method == L1Method::coordinate_descent && !constraints.empty()) {
    throw std::invalid_argument("coordinate descent does not support constraints");
  }
}

// ---------------------------------------------------------------------------
// coordinate descent (unconstrained)

L1Solution solve_cd(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                    const L1Options& options) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const Matrix phit = phi.transposed();  // rows are the columns of phi

  Vector col_sq(n);
  for (std::size_t j = 0; j < n; ++j) col_sq[j] = kernels::sumsq(phit.row(j), m);

  Vector w = options.warm_start ? *options.warm_start : Vector(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (col_sq[j] == 0.0) w[j] = 0.0;  // zero column: coordinate is irrelevant
  }

  // residual r = y - phi w, maintained incrementally
  Vector r = y;
  for (std::size_t j = 0; j < n; ++j) {
    if (w[j] != 0.0) kernels::axpy(-w[j], phit.row(j), r.data(), m);
  }

  const Vector phity = matvec_t(phi, y);
  const double scale = std::max(1.0, 2.0 * norm_inf(phity));
  const double thresh = options.tol * scale;

  auto kkt_from_residual = [&](const Vector& res) {
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double grad = -2.0 * kernels::dot(phit.row(j), res.data(), m);
      const double t = 2.0 * lambda * u[j];
      double v;
      if (w[j] != 0.0) {
        v = std::fabs(grad + (w[j] > 0.0 ? t : -t));
      } else {
        v = std::max(0.0, std::fabs(grad) - t);
      }
      worst = std::max(worst, v);
    }
    return worst;
  };

  L1Solution out;
  out.status = SolveStatus::max_iter;
  int sweep = 0;
  for (; sweep < options.max_iter; ++sweep) {
    for (std::size_t j = 0; j < n; ++j) {
      if (col_sq[j] == 0.0) continue;
      const double rho = kernels::dot(phit.row(j), r.data(), m) + col_sq[j] * w[j];
      const double t = lambda * u[j];
      const double a = std::fabs(rho) - t;
      const double w_new = a > 0.0 ? std::copysign(a, rho) / col_sq[j] : 0.0;
      const double delta = w_new - w[j];
      if (delta != 0.0) {
        kernels::axpy(-delta, phit.row(j), r.data(), m);
        w[j] = w_new;
      }
    }
    // periodic exact refresh kills incremental-update drift
    if ((sweep + 1) % 64 == 0) {
      r = y;
      for (std::size_t j = 0; j < n; ++j) {
        if (w[j] != 0.0) kernels::axpy(-w[j], phit.row(j), r.data(), m);
      }
    }
    if (kkt_from_residual(r) <= thresh) {
      r = y;
      for (std::size_t j = 0; j < n; ++j) {
        if (w[j] != 0.0) kernels::axpy(-w[j], phit.row(j), r.data(), m);
      }
      if (kkt_from_residual(r) <= thresh) {
        out.status = SolveStatus::converged;
        ++sweep;
        break;
      }
    }
  }
  out.w = std::move(w);
  out.iterations = sweep;
  out.objective = weighted_l1_objective(phi, y, u, lambda, out.w);
  return out;
}

// ---------------------------------------------------------------------------
// ADMM (handles constraints; also usable unconstrained)

L1Solution solve_admm(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                      const LinearConstraints& con, const L1Options& options) {
  const std::size_t n = phi.cols();
  const std::size_t n_eq = con.n_eq();
  const std::size_t n_ineq = con.n_ineq();
  const double alpha = 1.6;  // over-relaxation

  // inconsistent equalities are detected up front
  if (n_eq > 0) {
    const Vector w_f = lstsq_minnorm(con.eq_matrix, con.eq_rhs);
    Vector res = matvec(con.eq_matrix, w_f);
    double worst = 0.0;
    for (std::size_t i = 0; i < n_eq; ++i) {
      worst = std::max(worst, std::fabs(res[i] - con.eq_rhs[i]));
    }
    if (worst > 1e-8 * (1.0 + norm_inf(con.eq_rhs))) {
      L1Solution out;
      out.w.assign(n, 0.0);
      out.objective = weighted_l1_objective(phi, y, u, lambda, out.w);
      out.status = SolveStatus::infeasible;
      out.iterations = 0;
      return out;
    }
  }

  const Matrix g0 = [&] {
    Matrix g = gram(phi);
    for (std::size_t i = 0; i < n; ++i) {
      kernels::scal(2.0, g.row(i), n);
    }
    return g;
  }();
  const Matrix ga = n_eq > 0 ? gram(con.eq_matrix) : Matrix();
  const Matrix gg = n_ineq > 0 ? gram(con.ineq_matrix) : Matrix();
  const Vector q = [&] {
    Vector v = matvec_t(phi, y);
    kernels::scal(2.0, v.data(), v.size());
    return v;
  }();

  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += g0(i, i);
  double rho = std::max(1e-8, 0.1 * trace / static_cast<double>(n));
  const double rho_floor = rho * 1e-8;
  const double rho_ceil = rho * 1e8;

  auto factor = [&](double rho_now) {
    Matrix k = g0;
    for (std::size_t i = 0; i < n; ++i) {
      double* krow = k.row(i);
      if (!ga.empty()) kernels::axpy(rho_now, ga.row(i), krow, n);
      if (!gg.empty()) kernels::axpy(rho_now, gg.row(i), krow, n);
      krow[i] += rho_now;
    }
    return Cholesky(k);
  };
  Cholesky chol = factor(rho);

  Vector w = options.warm_start ? *options.warm_start : Vector(n, 0.0);
  Vector z = w;
  Vector s(n_ineq, 0.0);
  if (n_ineq > 0) {
    const Vector gw = matvec(con.ineq_matrix, w);
    for (std::size_t i = 0; i < n_ineq; ++i) s[i] = std::max(0.0, con.ineq_rhs[i] - gw[i]);
  }
  Vector d1(n, 0.0), d2(n_eq, 0.0), d3(n_ineq, 0.0);

  const double norm_b = n_eq > 0 ? norm2(con.eq_rhs) : 0.0;
  const double norm_h = n_ineq > 0 ? norm2(con.ineq_rhs) : 0.0;
  const double cnorm = std::sqrt(norm_b * norm_b + norm_h * norm_h);
  const double dim_pri = std::sqrt(static_cast<double>(n + n_eq + n_ineq));
  const double dim_dual = std::sqrt(static_cast<double>(n));
  const double con_scale = 1.0 + std::max(n_eq > 0 ? norm_inf(con.eq_rhs) : 0.0,
                                          n_ineq > 0 ? norm_inf(con.ineq_rhs) : 0.0);

  Vector thr(n);
  Vector rhs(n), w_hat(n), aw, gw, aw_hat, gw_hat;
  L1Solution out;
  out.status = SolveStatus::max_iter;

  double viol_checkpoint = -1.0;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    const Vector z_prev = z;
    const Vector s_prev = s;

    // w-update: K w = q + rho (z - d1) + rho A'(b - d2) + rho G'(h - s - d3)
    for (std::size_t j = 0; j < n; ++j) rhs[j] = q[j] + rho * (z[j] - d1[j]);
    if (n_eq > 0) {
      Vector t(n_eq);
      for (std::size_t i = 0; i < n_eq; ++i) t[i] = rho * (con.eq_rhs[i] - d2[i]);
      const Vector at = matvec_t(con.eq_matrix, t);
      for (std::size_t j = 0; j < n; ++j) rhs[j] += at[j];
    }
    if (n_ineq > 0) {
      Vector t(n_ineq);
      for (std::size_t i = 0; i < n_ineq; ++i) t[i] = rho * (con.ineq_rhs[i] - s[i] - d3[i]);
      const Vector gt = matvec_t(con.ineq_matrix, t);
      for (std::size_t j = 0; j < n; ++j) rhs[j] += gt[j];
    }
    w = chol.solve(rhs);

    if (n_eq > 0) aw = matvec(con.eq_matrix, w);
    if (n_ineq > 0) gw = matvec(con.ineq_matrix, w);

    // over-relaxation
    for (std::size_t j = 0; j < n; ++j) w_hat[j] = alpha * w[j] + (1.0 - alpha) * z_prev[j];
    if (n_eq > 0) {
      aw_hat.resize(n_eq);
      for (std::size_t i = 0; i < n_eq; ++i) {
        aw_hat[i] = alpha * aw[i] + (1.0 - alpha) * con.eq_rhs[i];
      }
    }
    if (n_ineq > 0) {
      gw_hat.resize(n_ineq);
      for (std::size_t i = 0; i < n_ineq; ++i) {
        gw_hat[i] = alpha * gw[i] + (1.0 - alpha) * (con.ineq_rhs[i] - s_prev[i]);
      }
    }

    // z-update: elementwise soft threshold at 2 lambda u / rho
    Vector zin(n);
    for (std::size_t j = 0; j < n; ++j) {
      zin[j] = w_hat[j] + d1[j];
      thr[j] = 2.0 * lambda * u[j] / rho;
    }
    kernels::soft_threshold(zin.data(), thr.data(), z.data(), n);

    // s-update: projection onto the nonnegative orthant
    for (std::size_t i = 0; i < n_ineq; ++i) {
      s[i] = std::max(0.0, con.ineq_rhs[i] - gw_hat[i] - d3[i]);
    }

    // dual updates (scaled form)
    for (std::size_t j = 0; j < n; ++j) d1[j] += w_hat[j] - z[j];
    for (std::size_t i = 0; i < n_eq; ++i) d2[i] += aw_hat[i] - con.eq_rhs[i];
    for (std::size_t i = 0; i < n_ineq; ++i) d3[i] += gw_hat[i] + s[i] - con.ineq_rhs[i];

    // residuals
    double pri_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = w[j] - z[j];
      pri_sq += d * d;
    }
    for (std::size_t i = 0; i < n_eq; ++i) {
      const double d = aw[i] - con.eq_rhs[i];
      pri_sq += d * d;
    }
    for (std::size_t i = 0; i < n_ineq; ++i) {
      const double d = gw[i] + s[i] - con.ineq_rhs[i];
      pri_sq += d * d;
    }
    const double r_pri = std::sqrt(pri_sq);

    Vector dual_vec(n);
    for (std::size_t j = 0; j < n; ++j) dual_vec[j] = -(z[j] - z_prev[j]);
    if (n_ineq > 0) {
      Vector ds(n_ineq);
      for (std::size_t i = 0; i < n_ineq; ++i) ds[i] = s[i] - s_prev[i];
      const Vector gds = matvec_t(con.ineq_matrix, ds);
      for (std::size_t j = 0; j < n; ++j) dual_vec[j] += gds[j];
    }
    const double r_dual = rho * norm2(dual_vec);

    double axnorm_sq = kernels::sumsq(w.data(), n);
    if (n_eq > 0) axnorm_sq += kernels::sumsq(aw.data(), n_eq);
    if (n_ineq > 0) axnorm_sq += kernels::sumsq(gw.data(), n_ineq);
    double bznorm_sq = kernels::sumsq(z.data(), n);
    if (n_ineq > 0) bznorm_sq += kernels::sumsq(s.data(), n_ineq);
    const double eps_pri =
        dim_pri * options.tol +
        options.tol * std::max({std::sqrt(axnorm_sq), std::sqrt(bznorm_sq), cnorm});

    Vector dual_scale_vec = d1;
    if (n_eq > 0) {
      const Vector atd = matvec_t(con.eq_matrix, d2);
      for (std::size_t j = 0; j < n; ++j) dual_scale_vec[j] += atd[j];
    }
    if (n_ineq > 0) {
      const Vector gtd = matvec_t(con.ineq_matrix, d3);
      for (std::size_t j = 0; j < n; ++j) dual_scale_vec[j] += gtd[j];
    }
    const double eps_dual = dim_dual * options.tol + options.tol * rho * norm2(dual_scale_vec);

    if (r_pri <= eps_pri && r_dual <= eps_dual) {
      out.status = SolveStatus::converged;
      ++iter;
      break;
    }

    // residual balancing
    if ((iter + 1) % 10 == 0) {
      if (r_pri > 10.0 * r_dual && rho < rho_ceil) {
        rho *= 2.0;
        kernels::scal(0.5, d1.data(), n);
        if (n_eq > 0) kernels::scal(0.5, d2.data(), n_eq);
        if (n_ineq > 0) kernels::scal(0.5, d3.data(), n_ineq);
        chol = factor(rho);
      } else if (r_dual > 10.0 * r_pri && rho > rho_floor) {
        rho *= 0.5;
        kernels::scal(2.0, d1.data(), n);
        if (n_eq > 0) kernels::scal(2.0, d2.data(), n_eq);
        if (n_ineq > 0) kernels::scal(2.0, d3.data(), n_ineq);
        chol = factor(rho);
      }
    }

    // stalled constraint violation after a long run points at an empty
    // feasible set (inconsistent inequalities are not caught by the
    // equality pre-check)
    if (!con.empty() && iter >= 1000 && (iter + 1) % 250 == 0) {
      const double viol = constraint_violation(con, w);
      if (viol > 1e-6 * con_scale && viol_checkpoint >= 0.0 && viol > 0.9 * viol_checkpoint) {
        out.status = SolveStatus::infeasible;
        ++iter;
        break;
      }
      viol_checkpoint = viol;
    }
  }

  if (con.empty()) {
    out.w = z;  // thresholded iterate carries exact zeros
  } else {
    out.w = w;
    if (out.status != SolveStatus::infeasible) {
      // feasibility polish: project onto the equalities plus any violated
      // inequalities so reported violations sit near machine precision
      for (int pass = 0; pass < 3; ++pass) {
        std::vector<std::size_t> act;
        Vector gw_now;
        if (n_ineq > 0) {
          gw_now = matvec(con.ineq_matrix, out.w);
          for (std::size_t i = 0; i < n_ineq; ++i) {
            if (gw_now[i] - con.ineq_rhs[i] > 0.0) act.push_back(i);
          }
        }
        const std::size_t rows = n_eq + act.size();
        if (rows == 0) break;
        Matrix c(rows, n);
        Vector resid(rows);
        Vector aw_now = n_eq > 0 ? matvec(con.eq_matrix, out.w) : Vector();
        for (std::size_t i = 0; i < n_eq; ++i) {
          for (std::size_t j = 0; j < n; ++j) c(i, j) = con.eq_matrix(i, j);
          resid[i] = con.eq_rhs[i] - aw_now[i];
        }
        for (std::size_t k = 0; k < act.size(); ++k) {
          const std::size_t i = act[k];
          for (std::size_t j = 0; j < n; ++j) c(n_eq + k, j) = con.ineq_matrix(i, j);
          resid[n_eq + k] = con.ineq_rhs[i] - gw_now[i];
        }
        if (norm_inf(resid) <= 1e-12 * con_scale) break;
        const Vector corr = lstsq_minnorm(c, resid);
        for (std::size_t j = 0; j < n; ++j) out.w[j] += corr[j];
      }
    }
  }

  if (out.status == SolveStatus::max_iter && !con.empty()) {
    if (constraint_violation(con, out.w) > 1e-6 * con_scale) {
      out.status = SolveStatus::infeasible;
    }
  }

  out.iterations = iter;
  out.objective = weighted_l1_objective(phi, y, u, lambda, out.w);
  return out;
}

}  // namespace

L1Solution solve_weighted_l1(const Matrix& phi, const Vector& y, const Vector& u, double lambda,
                             const LinearConstraints& constraints, const L1Options& options) {
  validate_inputs(phi, y, u, lambda, constraints, options);

  // with every weight at zero and no constraints this is plain least squares;
  // the minimum-norm solution is the natural representative
  if (constraints.empty() && norm_inf(u) == 0.0) {
    L1Solution out;
    std::size_t rank = 0;
    out.w = lstsq_minnorm(phi, y, -1.0, &rank);
    out.objective = weighted_l1_objective(phi, y, u, lambda, out.w);
    out.status = rank < std::min(phi.rows(), phi.cols()) ? SolveStatus::degenerate
                                                         : SolveStatus::converged;
    out.iterations = 0;
    return out;
  }

  switch (options.method) {
    case L1Method::coordinate_descent:
      return solve_cd(phi, y, u, lambda, options);
    case L1Method::admm:
      return solve_admm(phi, y, u, lambda, constraints, options);
    case L1Method::automatic:
    default:
      return constraints.empty() ? solve_cd(phi, y, u, lambda, options)
                                 : solve_admm(phi, y, u, lambda, constraints, options);
  }
}

}  // namespace sparsedyn
