#include "sparsedyn/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sparsedyn/kernels.hpp"

namespace sparsedyn {

double rnmse(const Vector& estimate, const Vector& truth) {
  if (estimate.size() != truth.size()) throw std::invalid_argument("rnmse: size mismatch");
  const double denom_sq = kernels::sumsq(truth.data(), truth.size());
  if (denom_sq == 0.0) throw std::invalid_argument("rnmse: truth vector is zero");
  double num_sq = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double d = estimate[i] - truth[i];
    num_sq += d * d;
  }
  return std::sqrt(num_sq / denom_sq);
}

namespace {

std::vector<bool> energy_support(const Vector& w, double energy_tol) {
  std::vector<bool> s(w.size(), false);
  const double total = kernels::sumsq(w.data(), w.size());
  if (total == 0.0) return s;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (w[j] * w[j] / total >= energy_tol) s[j] = true;
  }
  return s;
}

}  // namespace

SupportScore support_metrics(const Vector& estimate, const Vector& truth, double energy_tol) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("support_metrics: size mismatch");
  }
  if (!(energy_tol > 0.0) || !(energy_tol < 1.0)) {
    throw std::invalid_argument("support_metrics: energy_tol must lie in (0, 1)");
  }
  const auto est = energy_support(estimate, energy_tol);
  const auto tru = energy_support(truth, energy_tol);

  SupportScore out;
  bool identical = true;
  for (std::size_t j = 0; j < est.size(); ++j) {
    if (est[j]) ++out.estimated_size;
    if (tru[j]) ++out.true_size;
    if (est[j] && tru[j]) ++out.true_positives;
    if (est[j] != tru[j]) identical = false;
  }
  out.precision = out.estimated_size == 0
                      ? 1.0
                      : static_cast<double>(out.true_positives) /
                            static_cast<double>(out.estimated_size);
  out.recall = out.true_size == 0 ? 1.0
                                  : static_cast<double>(out.true_positives) /
                                        static_cast<double>(out.true_size);
  out.exact = identical;
  return out;
}

}  // namespace sparsedyn
