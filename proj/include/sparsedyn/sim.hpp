#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/linalg.hpp"
#include "sparsedyn/timeseries.hpp"

// Benchmark systems: a six-state gene regulatory oscillator (three mRNA /
// protein pairs in a repression ring) and a network of phase-coupled
// oscillators. Both evolve as discrete-time maps
//   x(t+dt) = x(t) + dt * (f(x(t)) + noise)
// and the identification target is the bracket f.
namespace sparsedyn {

struct SimulationError : std::runtime_error {
  SimulationError(int step_, const std::string& reason)
      : std::runtime_error("simulation failed at step " + std::to_string(step_) + ": " + reason),
        step(step_) {}
  int step;
};

struct RepressilatorParams {
  std::array<double, 3> alpha{4.0, 3.0, 5.0};    // Hill promoter strengths
  std::array<double, 3> beta{1.4, 1.5, 1.6};     // translation rates
  std::array<double, 6> gamma{0.3, 0.4, 0.5, 0.2, 0.4, 0.6};  // decay rates
  std::array<int, 3> hill_n{3, 3, 3};            // Hill coefficients
  double dt = 1.0;
  int steps = 50;  // produces steps + 1 samples

  void validate() const;
};

struct KuramotoParams {
  int n = 0;
  Vector omega;    // natural frequencies, length n
  Matrix weights;  // coupling matrix, n x n, zero diagonal
  double dt = 0.1;
  int steps = 450;

  void validate() const;
};

// Process noise added inside the bracket. In variance mode each state i gets
// i.i.d. N(0, var_i) draws (a single entry broadcasts to all states). In
// snr_db mode the per-state variances are derived from a noiseless reference
// pass so that the average bracket power over the run sits at the requested
// signal-to-noise ratio; the realized ratio is then approximate.
struct NoiseSpec {
  enum class Mode { variance, snr_db };
  Mode mode = Mode::variance;
  Vector variances;     // variance mode; length n_states or 1
  double snr_db = 0.0;  // snr_db mode
  std::uint64_t seed = 0;
};

TimeSeries simulate_repressilator(const RepressilatorParams& params, const Vector& init,
                                  const std::optional<NoiseSpec>& noise = {});

TimeSeries simulate_kuramoto(const KuramotoParams& params, const Vector& init,
                             const std::optional<NoiseSpec>& noise = {});

// Exact coefficient vectors of the bracket in the matching module dictionary
// (build_hill_spec(6, 4) resp. build_kuramoto_spec(n, i)), one per state.
std::vector<Vector> repressilator_truth(const RepressilatorParams& params);
std::vector<Vector> kuramoto_truth(const KuramotoParams& params);

enum class BenchmarkSystem { repressilator, kuramoto };

// A fully specified benchmark draw: randomized parameters, the noiseless
// trajectory and the exact dictionary coefficients. All randomness comes from
// trial_seed, with a documented draw order, so instances are reproducible
// bit for bit.
struct BenchmarkInstance {
  BenchmarkSystem system = BenchmarkSystem::repressilator;
  RepressilatorParams repressilator;
  KuramotoParams kuramoto;
  TimeSeries series;
  std::vector<Vector> w_true;

  std::size_t n_states() const { return series.n_states(); }
  DictionarySpec dictionary_for_state(int state) const;
};

// Repressilator: nominal parameters with each rate jittered by an independent
// U(0.9, 1.1) factor (draw order: gamma 1..6, beta 1..3, alpha 1..3), then the
// initial state U(0,1)^6. Kuramoto: omega_i ~ N(0, 10) for i = 1..n, then
// round(0.1 n (n-1)) distinct directed edges by partial Fisher-Yates over the
// row-major off-diagonal slots, weights U(-10, 10) in draw order, then the
// initial phases U(0, 2*pi)^n.
BenchmarkInstance sample_benchmark_instance(BenchmarkSystem system, std::uint64_t trial_seed,
                                            int kuramoto_n = 100);

// Additive regression-level noise scaled so that the realized ratio
// 20 log10(||clean|| / ||xi||) equals snr_db exactly. lambda_effective is the
// realized noise variance ||xi||^2 / M.
struct NoiseInjection {
  Vector xi;
  double lambda_effective = 0.0;
};
NoiseInjection inject_noise_at_snr(const Vector& clean, double snr_db, std::uint64_t seed);

}  // namespace sparsedyn
