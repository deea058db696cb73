#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/linalg.hpp"
#include "sparsedyn/weighted_l1.hpp"

// Sparse Bayesian identification: a Gaussian likelihood with independent
// zero-mean Gaussian coefficient priors whose variances gamma_j are learned by
// evidence maximization. The nonconvex evidence objective is minimized by an
// iteratively reweighted l1 scheme; coordinates whose relative energy falls
// below a threshold are pruned as the iteration proceeds.
namespace sparsedyn {

enum class HyperpriorKind {
  flat,            // no penalty on gamma
  log_penalty,     // p(gamma) = c log gamma, p'(gamma) = c / gamma
  linear_penalty,  // p(gamma) = c gamma,     p'(gamma) = c
};

struct Hyperprior {
  HyperpriorKind kind = HyperpriorKind::flat;
  double c = 1.0;

  double value(double gamma) const;
  double derivative(double gamma) const;
  void validate() const;
};

// Which algebraic route the moment/cost computations take. Both give the same
// values; "direct" works in the sample dimension, "dual" in the (active)
// coefficient dimension. "automatic" picks by whichever is smaller.
enum class MomentForm { automatic, direct, dual };

struct PosteriorMoments {
  Vector mean;  // full length, zero off the active set
  Matrix cov;   // full size, zero rows/columns off the active set
};

// Posterior mean and covariance of the coefficients for fixed prior variances
// gamma and noise variance lambda.
PosteriorMoments posterior_moments(const Matrix& phi, const Vector& y, const Vector& gamma,
                                   double lambda, MomentForm form = MomentForm::automatic);

// Negative log evidence (up to an additive constant) of gamma, plus the
// hyperprior penalty term.
double marginal_cost(const Matrix& phi, const Vector& y, const Vector& gamma, double lambda,
                     const Hyperprior& prior, MomentForm form = MomentForm::automatic);

// One reweighting step: maps the previous weights u_prev and the current l1
// solution w to the weights for the next iteration. All entries of u_prev
// must be positive.
Vector update_reweights(const Matrix& phi, double lambda, const Vector& u_prev, const Vector& w,
                        const Hyperprior& prior, MomentForm form = MomentForm::automatic);

// Noise-variance estimate from a lightly ridge-regularized least squares fit:
// residual sum of squares over the sample count, floored at a tiny positive
// value. Intended for the overdetermined regime (rows well above the active
// column count).
double estimate_lambda(const Matrix& phi, const Vector& y);

struct SblConfig {
  std::optional<double> lambda;  // noise variance; absent = estimate from data
  Hyperprior prior;
  double prune_threshold = 1e-4;  // on w_j^2 / ||w||^2, must lie in (0, 1)
  int max_outer_iter = 30;
  double stop_tol = 1e-6;     // relative l2 change of w between outer iterations
  double inner_tol = 1e-8;    // passed to the weighted l1 solver
  int inner_max_iter = 10000;
  L1Method inner_method = L1Method::automatic;

  void validate() const;
};

enum class SblStatus { converged, max_iter, all_pruned, infeasible };
std::string_view to_string(SblStatus s);

struct SblResult {
  Vector w_hat;   // final l1 solution, full length, exactly zero off support
  Vector gamma;   // learned prior variances, full length
  std::vector<std::size_t> support;  // ascending column indices
  Vector posterior_mean;  // on the support, same order
  Matrix posterior_cov;   // on the support
  Vector cost_trace;      // marginal cost after each outer iteration
  int iterations = 0;
  SblStatus status = SblStatus::converged;
  double lambda_used = 0.0;
};

// Runs the full reweighted identification loop on a regression problem.
// Constraints, when present, are enforced by the inner solver on the active
// coordinates (pruned coordinates are fixed at zero).
SblResult identify(const RegressionProblem& problem, const SblConfig& config,
                   const LinearConstraints& constraints = {});

}  // namespace sparsedyn
