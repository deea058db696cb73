#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedyn/linalg.hpp"
#include "sparsedyn/timeseries.hpp"

// Candidate feature libraries ("dictionaries") for regression-based
// identification of discrete-time dynamics, and their evaluation on sampled
// trajectories.
namespace sparsedyn {

struct DictionaryError : std::runtime_error {
  explicit DictionaryError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a feature cannot be evaluated at a concrete sample (non-finite
// result, or a Hill feature hitting a negative state). Carries the offending
// row, column and feature label.
struct EvaluationError : std::runtime_error {
  EvaluationError(std::size_t row_, std::size_t column_, const std::string& label_,
                  const std::string& reason);
  std::size_t row;
  std::size_t column;
  std::string label;
};

enum class FeatureKind { constant, monomial, hill_repress, hill_activate, coupling };

enum class CouplingForm { sin_diff, cos_diff, lin_diff, sin2_diff, cos2_diff };

// One factor of a monomial: variable reference with lag and power.
struct VarPower {
  bool is_input = false;
  int index = 0;  // 0-based variable index
  int lag = 0;    // samples back from the current row
  int power = 1;
};

struct Feature {
  FeatureKind kind = FeatureKind::constant;

  // monomial
  std::vector<VarPower> terms;

  // hill_repress / hill_activate: 1/(1+x^h) resp. x^h/(1+x^h) of one state
  int hill_state = 0;
  int hill_coefficient = 1;

  // coupling: a function of (x_j - x_i), both at lag 0
  CouplingForm form = CouplingForm::sin_diff;
  int pair_j = 0;
  int pair_i = 0;

  static Feature constant();
  static Feature monomial(std::vector<VarPower> terms);
  static Feature hill(bool activating, int state, int h);
  static Feature coupling(CouplingForm form, int j, int i);

  // Human-readable form, e.g. "x1^2*u1[k-1]", "1/(1+x6^3)", "sin(x2-x1)".
  std::string label() const;
};

struct DictionarySpec {
  std::vector<Feature> features;
  int n_states = 0;
  int n_inputs = 0;
  int max_state_lag = 0;
  int max_input_lag = 0;

  std::size_t size() const { return features.size(); }
  std::vector<std::string> labels() const;

  // Structural checks: indices in range, lags within the declared maxima,
  // powers and Hill coefficients >= 1. Throws DictionaryError.
  void validate() const;
};

// How the regression target is formed from consecutive samples.
enum class OutputMode {
  next_state,         // y_k = x_i(t_{k+1})
  finite_difference,  // y_k = (x_i(t_{k+1}) - x_i(t_k)) / (t_{k+1} - t_k)
};

struct RegressionProblem {
  Vector y;
  Matrix phi;                             // rows x features, same row order as y
  std::vector<std::string> column_labels; // one per dictionary feature
  std::string target_label;               // e.g. "x4:finite_difference"
};

// All monomials in the lagged states (total degree <= state_degree) times all
// monomials in the lagged inputs (total degree <= input_degree), constant
// included. Ordering is graded lexicographic within each block, states outer.
DictionarySpec build_narx_spec(int n_states, int n_inputs, int state_degree, int input_degree,
                               int state_lags, int input_lags);

// Linear terms x1..xn followed, for each Hill coefficient h = 1..h_max, by the
// repressing block 1/(1+x_i^h) and the activating block x_i^h/(1+x_i^h).
DictionarySpec build_hill_spec(int n_states, int h_max);

// For target oscillator i: per other oscillator j (ascending), the coupling
// block {sin, cos, identity, sin^2, cos^2} of (x_j - x_i), then one trailing
// constant column.
DictionarySpec build_kuramoto_spec(int n_oscillators, int target);

// Evaluates the dictionary on a trajectory, producing y and phi. Rows cover
// every sample that has both the required history (max lag) and a successor.
RegressionProblem evaluate(const DictionarySpec& spec, const TimeSeries& ts, int target_state,
                           OutputMode mode);

std::string dictionary_spec_to_json(const DictionarySpec& spec);
DictionarySpec dictionary_spec_from_json(const std::string& json_text);

}  // namespace sparsedyn
