#pragma once

#include <cstddef>

#include "sparsedyn/linalg.hpp"

namespace sparsedyn {

// Relative l2 coefficient error ||estimate - truth|| / ||truth||.
// Requires matching sizes and a nonzero truth vector.
double rnmse(const Vector& estimate, const Vector& truth);

struct SupportScore {
  double precision = 1.0;  // |est ∩ true| / |est|, 1 for an empty estimate
  double recall = 1.0;     // |est ∩ true| / |true|, 1 for an empty truth
  bool exact = false;      // the two supports coincide
  std::size_t true_positives = 0;
  std::size_t estimated_size = 0;
  std::size_t true_size = 0;
};

// Supports are read off with the relative-energy rule: coordinate j belongs
// to the support of w when w_j^2 / ||w||^2 >= energy_tol.
SupportScore support_metrics(const Vector& estimate, const Vector& truth,
                             double energy_tol = 1e-4);

}  // namespace sparsedyn
