#pragma once

#include <cstddef>
#include <vector>

#include "sparsedyn/linalg.hpp"
#include "sparsedyn/weighted_l1.hpp"

// Reference sparse regression methods the Bayesian identifier is compared
// against in the benchmark harness.
namespace sparsedyn {

enum class BaselineAlgorithm {
  lasso,  // weighted l1 solver with unit weights
  ista,   // accelerated proximal gradient on the same objective
  omp,    // orthogonal matching pursuit with least-squares refits
};

struct BaselineOptions {
  // lasso / ista
  double lambda = 0.0;  // must be > 0 for lasso and ista
  double tol = 1e-8;
  int max_iter = 10000;

  // omp
  int omp_max_support = 0;       // 0 picks min(rows, cols)
  double omp_residual_tol = 0.0; // stop once ||y - phi w||_2 falls to this
};

// Per-step OMP diagnostics (optional output).
struct OmpTrace {
  std::vector<std::size_t> selection_order;
  std::vector<double> residual_norms;  // after each refit, starting from ||y||
};

L1Solution run_baseline(BaselineAlgorithm alg, const Matrix& phi, const Vector& y,
                        const BaselineOptions& options);

L1Solution run_omp(const Matrix& phi, const Vector& y, const BaselineOptions& options,
                   OmpTrace* trace = nullptr);

}  // namespace sparsedyn
