#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "sparsedyn/linalg.hpp"

namespace sparsedyn {

struct TimeseriesError : std::runtime_error {
  explicit TimeseriesError(const std::string& what) : std::runtime_error(what) {}
};

// Uniformly typed container for sampled trajectories: a time grid, one state
// column per variable and optionally exogenous input columns.
struct TimeSeries {
  Vector times;    // strictly increasing, at least 2 samples
  Matrix states;   // samples x n_states
  Matrix inputs;   // samples x n_inputs, or empty when there are no inputs

  std::size_t samples() const { return times.size(); }
  std::size_t n_states() const { return states.cols(); }
  std::size_t n_inputs() const { return inputs.empty() ? 0 : inputs.cols(); }

  // Throws TimeseriesError when the invariants above are violated.
  void validate() const;
};

// CSV layout: header "t,x1,...,xn[,u1,...,um]", one sample per row.
// Parse errors carry the 1-based line number.
TimeSeries parse_timeseries_csv(const std::string& text);
std::string timeseries_to_csv(const TimeSeries& ts);

TimeSeries read_timeseries_csv(const std::string& path);
// Writes via a temp file + rename so a failed run cannot leave partial output.
void write_timeseries_csv(const TimeSeries& ts, const std::string& path);

}  // namespace sparsedyn
