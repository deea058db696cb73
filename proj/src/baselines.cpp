#include "sparsedyn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sparsedyn/kernels.hpp"

namespace sparsedyn {

namespace {

void check_shapes(const Matrix& phi, const Vector& y) {
  if (phi.rows() == 0 || phi.cols() == 0) throw std::invalid_argument("phi is empty");
  if (y.size() != phi.rows()) throw std::invalid_argument("y size does not match phi rows");
}

L1Solution run_lasso(const Matrix& phi, const Vector& y, const BaselineOptions& options) {
  if (!(options.lambda > 0.0)) throw std::invalid_argument("lasso needs lambda > 0");
  L1Options opts;
  opts.tol = options.tol;
  opts.max_iter = options.max_iter;
  const Vector u(phi.cols(), 1.0);
  return solve_weighted_l1(phi, y, u, options.lambda, {}, opts);
}

L1Solution run_ista(const Matrix& phi, const Vector& y, const BaselineOptions& options) {
  if (!(options.lambda > 0.0)) throw std::invalid_argument("ista needs lambda > 0");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (options.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const double lambda = options.lambda;

  // Lipschitz constant of the smooth part ||y - phi w||^2 is 2 max_eig(phi'phi);
  // a hair of headroom keeps the step valid when the estimate is low.
  const double l_max = 2.0 * power_iteration_max_eig(gram(phi)) * (1.0 + 1e-6);

  L1Solution out;
  out.status = SolveStatus::max_iter;
  if (l_max <= 0.0) {
    // zero operator: the penalty alone drives everything to zero
    out.w.assign(n, 0.0);
    out.objective = kernels::sumsq(y.data(), m);
    out.status = SolveStatus::converged;
    out.iterations = 0;
    return out;
  }

  const double step = 1.0 / l_max;
  const Vector thr(n, 2.0 * lambda * step);

  Vector w(n, 0.0), w_prev(n, 0.0), v(n, 0.0), zin(n);
  double t_acc = 1.0;
  double obj_prev = kernels::sumsq(y.data(), m);  // objective at w = 0
  auto objective = [&](const Vector& ww) {
    Vector r = matvec(phi, ww);
    for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - r[i];
    double pen = 0.0;
    for (double x : ww) pen += std::fabs(x);
    return kernels::sumsq(r.data(), m) + 2.0 * lambda * pen;
  };

  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    // gradient of the smooth part at the extrapolated point
    Vector r = matvec(phi, v);
    for (std::size_t i = 0; i < m; ++i) r[i] -= y[i];
    const Vector grad = matvec_t(phi, r);  // = phi'(phi v - y), full grad is 2x this
    for (std::size_t j = 0; j < n; ++j) zin[j] = v[j] - 2.0 * step * grad[j];
    w_prev = w;
    kernels::soft_threshold(zin.data(), thr.data(), w.data(), n);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
    const double beta = (t_acc - 1.0) / t_next;
    for (std::size_t j = 0; j < n; ++j) v[j] = w[j] + beta * (w[j] - w_prev[j]);
    t_acc = t_next;

    const double obj = objective(w);
    if (std::fabs(obj - obj_prev) <= options.tol * std::max(1.0, std::fabs(obj_prev))) {
      out.status = SolveStatus::converged;
      ++iter;
      break;
    }
    obj_prev = obj;
  }
  out.w = std::move(w);
  out.iterations = iter;
  out.objective = objective(out.w);
  return out;
}

}  // namespace

L1Solution run_omp(const Matrix& phi, const Vector& y, const BaselineOptions& options,
                   OmpTrace* trace) {
  check_shapes(phi, y);
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  const std::size_t cap = options.omp_max_support > 0
                              ? std::min<std::size_t>(options.omp_max_support, std::min(m, n))
                              : std::min(m, n);
  if (options.omp_residual_tol < 0.0) {
    throw std::invalid_argument("omp residual tolerance must be nonnegative");
  }

  const Matrix phit = phi.transposed();
  Vector col_norm(n);
  for (std::size_t j = 0; j < n; ++j) {
    col_norm[j] = std::sqrt(kernels::sumsq(phit.row(j), m));
  }

  L1Solution out;
  out.w.assign(n, 0.0);
  out.status = SolveStatus::converged;

  Vector r = y;
  std::vector<std::size_t> support;
  std::vector<char> in_support(n, 0);
  bool degenerate = false;

  if (trace) {
    trace->selection_order.clear();
    trace->residual_norms.assign(1, norm2(y));
  }

  const double corr_floor = 1e-12 * std::max(1.0, norm2(y));
  Vector w_sup;

  while (support.size() < cap) {
    if (norm2(r) <= options.omp_residual_tol) break;

    // normalized correlation: unnormalized dictionaries would otherwise just
    // hand the pick to the largest column
    std::size_t best = n;
    double best_corr = corr_floor;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_support[j] || col_norm[j] == 0.0) continue;
      const double c = std::fabs(kernels::dot(phit.row(j), r.data(), m)) / col_norm[j];
      if (c > best_corr) {
        best_corr = c;
        best = j;
      }
    }
    if (best == n) break;  // nothing correlates with the residual any more

    support.push_back(best);
    in_support[best] = 1;
    if (trace) trace->selection_order.push_back(best);

    const Matrix phi_s = phi.select_cols(support);
    // least-squares refit on the active set; a rank-deficient set falls back
    // to the minimum-norm solution and flags the run as degenerate
    bool used_minnorm = false;
    try {
      Matrix g = gram(phi_s);
      const Cholesky chol(g);
      if (chol.jitter_used() > 0.0) {
        used_minnorm = true;  // factorization only succeeded with jitter
      } else {
        w_sup = chol.solve(matvec_t(phi_s, y));
      }
    } catch (const LinalgError&) {
      used_minnorm = true;
    }
    if (used_minnorm) {
      std::size_t rank = 0;
      w_sup = lstsq_minnorm(phi_s, y, -1.0, &rank);
      degenerate = true;
    }

    r = y;
    for (std::size_t i = 0; i < support.size(); ++i) {
      if (w_sup[i] != 0.0) kernels::axpy(-w_sup[i], phit.row(support[i]), r.data(), m);
    }
    if (trace) trace->residual_norms.push_back(norm2(r));
  }

  for (std::size_t i = 0; i < support.size(); ++i) out.w[support[i]] = w_sup[i];
  out.iterations = static_cast<int>(support.size());
  out.status = degenerate ? SolveStatus::degenerate : SolveStatus::converged;
  Vector rr = matvec(phi, out.w);
  for (std::size_t i = 0; i < m; ++i) rr[i] = y[i] - rr[i];
  out.objective = kernels::sumsq(rr.data(), m);
  return out;
}

L1Solution run_baseline(BaselineAlgorithm alg, const Matrix& phi, const Vector& y,
                        const BaselineOptions& options) {
  check_shapes(phi, y);
  switch (alg) {
    case BaselineAlgorithm::lasso:
      return run_lasso(phi, y, options);
    case BaselineAlgorithm::ista:
      return run_ista(phi, y, options);
    case BaselineAlgorithm::omp:
      return run_omp(phi, y, options, nullptr);
  }
  throw std::invalid_argument("unknown baseline algorithm");
}

}  // namespace sparsedyn
