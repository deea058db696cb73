#include "sparsedyn/sbl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sparsedyn/kernels.hpp"

namespace sparsedyn {

namespace {
constexpr double kTiny = 1e-300;
}

double Hyperprior::value(double gamma) const {
  switch (kind) {
    case HyperpriorKind::flat:
      return 0.0;
    case HyperpriorKind::log_penalty:
      // a pruned coordinate (gamma = 0) is treated as removed from the model
      return gamma > 0.0 ? c * std::log(gamma) : 0.0;
    case HyperpriorKind::linear_penalty:
      return c * gamma;
  }
  return 0.0;
}

double Hyperprior::derivative(double gamma) const {
  switch (kind) {
    case HyperpriorKind::flat:
      return 0.0;
    case HyperpriorKind::log_penalty:
      return c / std::max(gamma, kTiny);
    case HyperpriorKind::linear_penalty:
      return c;
  }
  return 0.0;
}

void Hyperprior::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("hyperprior constant must be nonnegative and finite");
  }
}

std::string_view to_string(SblStatus s) {
  switch (s) {
    case SblStatus::converged: return "converged";
    case SblStatus::max_iter: return "max_iter";
    case SblStatus::all_pruned: return "all_pruned";
    case SblStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

void SblConfig::validate() const {
  if (lambda && (!(*lambda > 0.0) || !std::isfinite(*lambda))) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  prior.validate();
  if (!(prune_threshold > 0.0) || !(prune_threshold < 1.0)) {
    throw std::invalid_argument("prune_threshold must lie in (0, 1)");
  }
  if (max_outer_iter < 1) throw std::invalid_argument("max_outer_iter must be >= 1");
  if (!(stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");
  if (!(inner_tol > 0.0)) throw std::invalid_argument("inner_tol must be positive");
  if (inner_max_iter < 1) throw std::invalid_argument("inner_max_iter must be >= 1");
}

namespace {

void check_problem(const Matrix& phi, const Vector& y, const Vector& gamma, double lambda) {
  if (phi.rows() == 0 || phi.cols() == 0) throw std::invalid_argument("phi is empty");
  if (y.size() != phi.rows()) throw std::invalid_argument("y size does not match phi rows");
  if (gamma.size() != phi.cols()) throw std::invalid_argument("gamma size does not match phi");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("gamma entries must be nonnegative and finite");
    }
  }
}

std::vector<std::size_t> active_set(const Vector& gamma) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < gamma.size(); ++j) {
    if (gamma[j] > 0.0) idx.push_back(j);
  }
  return idx;
}

}  // namespace

PosteriorMoments posterior_moments(const Matrix& phi, const Vector& y, const Vector& gamma,
                                   double lambda, MomentForm form) {
  check_problem(phi, y, gamma, lambda);
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();

  PosteriorMoments out;
  out.mean.assign(n, 0.0);
  out.cov = Matrix(n, n);

  const auto act = active_set(gamma);
  const std::size_t k = act.size();
  if (k == 0) return out;

  const Matrix phi_a = phi.select_cols(act);
  Vector gamma_a(k);
  for (std::size_t i = 0; i < k; ++i) gamma_a[i] = gamma[act[i]];

  if (form == MomentForm::automatic) form = k <= m ? MomentForm::dual : MomentForm::direct;

  Vector mean_a(k);
  Matrix cov_a(k, k);

  if (form == MomentForm::direct) {
    // S = lambda I + phi_a Gamma phi_a'
    Matrix s = scaled_outer(phi_a, gamma_a);
    for (std::size_t i = 0; i < m; ++i) s(i, i) += lambda;
    const Cholesky chol(s);
    const Vector si_y = chol.solve(y);
    const Vector v = matvec_t(phi_a, si_y);
    for (std::size_t i = 0; i < k; ++i) mean_a[i] = gamma_a[i] * v[i];

    const Matrix x = chol.solve(phi_a);               // m x k
    const Matrix b = matmul(phi_a.transposed(), x);   // k x k
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        cov_a(i, j) = (i == j ? gamma_a[i] : 0.0) - gamma_a[i] * b(i, j) * gamma_a[j];
      }
    }
  } else {
    // Sigma = (Gamma^-1 + phi_a' phi_a / lambda)^-1, mean = Sigma phi_a' y / lambda
    Matrix kmat = gram(phi_a);
    for (std::size_t i = 0; i < k; ++i) {
      kernels::scal(1.0 / lambda, kmat.row(i), k);
      kmat(i, i) += 1.0 / gamma_a[i];
    }
    const Cholesky chol(kmat);
    cov_a = chol.solve(Matrix::identity(k));
    Vector g = matvec_t(phi_a, y);
    kernels::scal(1.0 / lambda, g.data(), k);
    mean_a = matvec(cov_a, g);
  }

  for (std::size_t i = 0; i < k; ++i) {
    out.mean[act[i]] = mean_a[i];
    for (std::size_t j = 0; j < k; ++j) out.cov(act[i], act[j]) = cov_a(i, j);
  }
  return out;
}

double marginal_cost(const Matrix& phi, const Vector& y, const Vector& gamma, double lambda,
                     const Hyperprior& prior, MomentForm form) {
  check_problem(phi, y, gamma, lambda);
  prior.validate();
  const std::size_t m = phi.rows();

  double penalty = 0.0;
  for (double g : gamma) {
    if (g > 0.0) penalty += prior.value(g);
  }

  const auto act = active_set(gamma);
  const std::size_t k = act.size();
  if (k == 0) {
    return static_cast<double>(m) * std::log(lambda) +
           kernels::sumsq(y.data(), m) / lambda + penalty;
  }

  const Matrix phi_a = phi.select_cols(act);
  Vector gamma_a(k);
  for (std::size_t i = 0; i < k; ++i) gamma_a[i] = gamma[act[i]];

  if (form == MomentForm::automatic) form = k <= m ? MomentForm::dual : MomentForm::direct;

  if (form == MomentForm::direct) {
    Matrix s = scaled_outer(phi_a, gamma_a);
    for (std::size_t i = 0; i < m; ++i) s(i, i) += lambda;
    const Cholesky chol(s);
    const Vector si_y = chol.solve(y);
    return chol.log_det() + dot(y, si_y) + penalty;
  }

  // log|S| = m log lambda + sum log gamma + log|K|,
  // y'S^-1 y = (||y||^2 - g'K^-1 g / lambda) / lambda with g = phi_a' y
  Matrix kmat = gram(phi_a);
  for (std::size_t i = 0; i < k; ++i) {
    kernels::scal(1.0 / lambda, kmat.row(i), k);
    kmat(i, i) += 1.0 / gamma_a[i];
  }
  const Cholesky chol(kmat);
  double log_det = static_cast<double>(m) * std::log(lambda) + chol.log_det();
  for (std::size_t i = 0; i < k; ++i) log_det += std::log(gamma_a[i]);
  const Vector g = matvec_t(phi_a, y);
  const Vector kg = chol.solve(g);
  const double quad = (kernels::sumsq(y.data(), m) - dot(g, kg) / lambda) / lambda;
  return log_det + quad + penalty;
}

Vector update_reweights(const Matrix& phi, double lambda, const Vector& u_prev, const Vector& w,
                        const Hyperprior& prior, MomentForm form) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  if (u_prev.size() != n || w.size() != n) {
    throw std::invalid_argument("update_reweights: size mismatch");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be positive and finite");
  }
  for (double uj : u_prev) {
    if (!(uj > 0.0) || !std::isfinite(uj)) {
      throw std::invalid_argument("previous weights must be strictly positive");
    }
  }
  prior.validate();

  Vector gamma(n);
  for (std::size_t j = 0; j < n; ++j) gamma[j] = std::fabs(w[j]) / u_prev[j];

  const auto act = active_set(gamma);
  const std::size_t k = act.size();

  if (form == MomentForm::automatic) form = k < m ? MomentForm::dual : MomentForm::direct;

  Vector t(n);  // t_j = phi_j' S^-1 phi_j
  if (form == MomentForm::direct) {
    Matrix s = scaled_outer(phi, gamma);
    for (std::size_t i = 0; i < m; ++i) s(i, i) += lambda;
    const Cholesky chol(s);
    const Matrix x = chol.solve(phi);  // m x n
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += phi(i, j) * x(i, j);
      t[j] = acc;
    }
  } else {
    // S^-1 = I/lambda - phi_act K^-1 phi_act' / lambda^2
    Vector col_sq(n);
    const Matrix phit = phi.transposed();
    for (std::size_t j = 0; j < n; ++j) col_sq[j] = kernels::sumsq(phit.row(j), m);
    if (k == 0) {
      for (std::size_t j = 0; j < n; ++j) t[j] = col_sq[j] / lambda;
    } else {
      const Matrix phi_a = phi.select_cols(act);
      Matrix kmat = gram(phi_a);
      for (std::size_t i = 0; i < k; ++i) {
        kernels::scal(1.0 / lambda, kmat.row(i), k);
        kmat(i, i) += 1.0 / gamma[act[i]];
      }
      const Cholesky chol(kmat);
      const Matrix g_all = matmul(phi_a.transposed(), phi);  // k x n
      const Matrix x = chol.solve(g_all);                    // k x n
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += g_all(i, j) * x(i, j);
        t[j] = col_sq[j] / lambda - acc / (lambda * lambda);
      }
    }
  }

  Vector u_next(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double v = std::max(t[j], 0.0) + prior.derivative(gamma[j]);
    u_next[j] = std::sqrt(v);
  }
  return u_next;
}

double estimate_lambda(const Matrix& phi, const Vector& y) {
  const std::size_t m = phi.rows();
  const std::size_t n = phi.cols();
  if (m < 2) throw std::invalid_argument("estimate_lambda: need at least 2 rows");
  if (y.size() != m) throw std::invalid_argument("estimate_lambda: y size mismatch");

  Matrix g = gram(phi);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += g(i, i);
  const double ridge = 1e-6 * trace / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) g(i, i) += ridge;

  const Cholesky chol(g);
  const Vector w = chol.solve(matvec_t(phi, y));
  Vector r = matvec(phi, w);
  for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - r[i];
  const double rss = kernels::sumsq(r.data(), m);
  const double y_sq = kernels::sumsq(y.data(), m);
  const double floor = 1e-12 * y_sq / static_cast<double>(m) +
                       std::numeric_limits<double>::min();
  return std::max(rss / static_cast<double>(m), floor);
}

// ---------------------------------------------------------------------------
// the outer loop

namespace {

LinearConstraints restrict_constraints(const LinearConstraints& con,
                                       const std::vector<std::size_t>& active) {
  LinearConstraints out;
  if (con.n_eq() > 0) {
    out.eq_matrix = con.eq_matrix.select_cols(active);
    out.eq_rhs = con.eq_rhs;
  }
  if (con.n_ineq() > 0) {
    out.ineq_matrix = con.ineq_matrix.select_cols(active);
    out.ineq_rhs = con.ineq_rhs;
  }
  return out;
}

}  // namespace

SblResult identify(const RegressionProblem& problem, const SblConfig& config,
                   const LinearConstraints& constraints) {
  config.validate();
  const Matrix& phi = problem.phi;
  const Vector& y = problem.y;
  if (phi.rows() == 0 || phi.cols() == 0) throw std::invalid_argument("identify: empty problem");
  if (y.size() != phi.rows()) throw std::invalid_argument("identify: y size mismatch");
  constraints.validate(phi.cols());
  const std::size_t n = phi.cols();

  SblResult res;
  res.lambda_used = config.lambda ? *config.lambda : estimate_lambda(phi, y);
  res.w_hat.assign(n, 0.0);
  res.gamma.assign(n, 0.0);

  std::vector<std::size_t> active(n);
  for (std::size_t j = 0; j < n; ++j) active[j] = j;
  Matrix phi_a = phi;
  LinearConstraints con_a = constraints;
  Vector u_a(n, 1.0);
  Vector w_prev_full(n, 0.0);
  Vector w_a_prev;  // warm start for the inner solver, in active coordinates

  L1Options inner;
  inner.tol = config.inner_tol;
  inner.max_iter = config.inner_max_iter;
  inner.method = config.inner_method;

  int outer = 0;
  bool done = false;
  for (; outer < config.max_outer_iter && !done; ++outer) {
    inner.warm_start = w_a_prev.empty() ? std::nullopt : std::make_optional(w_a_prev);
    const L1Solution sol = solve_weighted_l1(phi_a, y, u_a, res.lambda_used, con_a, inner);
    if (sol.status == SolveStatus::infeasible) {
      res.status = SblStatus::infeasible;
      res.iterations = outer;
      return res;
    }

    // prior variances implied by this iterate
    Vector gamma_a(active.size());
    for (std::size_t i = 0; i < active.size(); ++i) {
      gamma_a[i] = std::fabs(sol.w[i]) / u_a[i];
    }
    const Vector u_next = update_reweights(phi_a, res.lambda_used, u_a, sol.w, config.prior);

    const double w_sq = kernels::sumsq(sol.w.data(), sol.w.size());
    if (w_sq == 0.0) {
      res.w_hat.assign(n, 0.0);
      res.gamma.assign(n, 0.0);
      res.support.clear();
      res.cost_trace.push_back(
          marginal_cost(phi, y, res.gamma, res.lambda_used, config.prior));
      res.status = SblStatus::all_pruned;
      res.iterations = outer + 1;
      return res;
    }

    std::vector<std::size_t> keep;  // positions within the active set
    for (std::size_t i = 0; i < active.size(); ++i) {
      if (sol.w[i] * sol.w[i] / w_sq >= config.prune_threshold) keep.push_back(i);
    }
    if (keep.empty()) {
      res.w_hat.assign(n, 0.0);
      res.gamma.assign(n, 0.0);
      res.support.clear();
      res.cost_trace.push_back(
          marginal_cost(phi, y, res.gamma, res.lambda_used, config.prior));
      res.status = SblStatus::all_pruned;
      res.iterations = outer + 1;
      return res;
    }

    // masked full-length iterate: pruned coordinates are exactly zero
    Vector w_full(n, 0.0);
    Vector gamma_full(n, 0.0);
    for (std::size_t i : keep) {
      w_full[active[i]] = sol.w[i];
      gamma_full[active[i]] = gamma_a[i];
    }
    res.cost_trace.push_back(
        marginal_cost(phi, y, gamma_full, res.lambda_used, config.prior));

    double diff_sq = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = w_full[j] - w_prev_full[j];
      diff_sq += d * d;
    }
    const double prev_norm = std::sqrt(kernels::sumsq(w_prev_full.data(), n));
    const double rel_change = std::sqrt(diff_sq) / std::max(prev_norm, kTiny);

    // shrink the working set to the survivors
    std::vector<std::size_t> new_active;
    Vector new_u, new_w;
    new_active.reserve(keep.size());
    new_u.reserve(keep.size());
    new_w.reserve(keep.size());
    for (std::size_t i : keep) {
      new_active.push_back(active[i]);
      new_u.push_back(u_next[i]);
      new_w.push_back(sol.w[i]);
    }
    active = std::move(new_active);
    u_a = std::move(new_u);
    w_a_prev = std::move(new_w);
    phi_a = phi.select_cols(active);
    con_a = restrict_constraints(constraints, active);

    res.w_hat = w_full;
    res.gamma = gamma_full;
    w_prev_full = std::move(w_full);

    if (outer >= 1 && rel_change < config.stop_tol) {
      res.status = SblStatus::converged;
      done = true;
    }
  }
  if (!done) res.status = SblStatus::max_iter;
  res.iterations = outer;

  res.support = active;
  Vector gamma_s(active.size());
  for (std::size_t i = 0; i < active.size(); ++i) gamma_s[i] = res.gamma[active[i]];
  const Matrix phi_s = phi.select_cols(active);
  const PosteriorMoments pm = posterior_moments(phi_s, y, gamma_s, res.lambda_used);
  res.posterior_mean = pm.mean;
  res.posterior_cov = pm.cov;
  return res;
}

}  // namespace sparsedyn
