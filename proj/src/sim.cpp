#include "sparsedyn/sim.hpp"

#include <cmath>
#include <numbers>

#include "sparsedyn/kernels.hpp"
#include "sparsedyn/rng.hpp"

namespace sparsedyn {

namespace {

double int_pow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

void check_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

Vector resolve_variances(const NoiseSpec& spec, std::size_t n_states) {
  if (spec.variances.empty()) throw std::invalid_argument("noise variances missing");
  Vector out(n_states);
  if (spec.variances.size() == 1) {
    out.assign(n_states, spec.variances[0]);
  } else if (spec.variances.size() == n_states) {
    out = spec.variances;
  } else {
    throw std::invalid_argument("noise variance count must be 1 or n_states");
  }
  for (double v : out) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("noise variances must be nonnegative and finite");
    }
  }
  return out;
}

}  // namespace

void RepressilatorParams::validate() const {
  for (double v : alpha) check_finite(v, "alpha");
  for (double v : beta) check_finite(v, "beta");
  for (double v : gamma) check_finite(v, "gamma");
  for (int h : hill_n) {
    if (h < 1) throw std::invalid_argument("Hill coefficients must be >= 1");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
}

void KuramotoParams::validate() const {
  if (n < 2) throw std::invalid_argument("need at least 2 oscillators");
  if (omega.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("omega length must equal n");
  }
  if (weights.rows() != static_cast<std::size_t>(n) ||
      weights.cols() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("weights must be n x n");
  }
  for (int i = 0; i < n; ++i) {
    if (weights(i, i) != 0.0) throw std::invalid_argument("weights diagonal must be zero");
  }
  for (double v : omega) check_finite(v, "omega");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
}

namespace {

// Bracket of the regulatory oscillator: three mRNAs repressed by the proteins
// of the neighbouring gene (x1 <- x6, x2 <- x4, x3 <- x5), three proteins
// translated from their mRNA.
void repressilator_bracket(const RepressilatorParams& p, const double* x, double* f) {
  f[0] = -p.gamma[0] * x[0] + p.alpha[0] / (1.0 + int_pow(x[5], p.hill_n[0]));
  f[1] = -p.gamma[1] * x[1] + p.alpha[1] / (1.0 + int_pow(x[3], p.hill_n[1]));
  f[2] = -p.gamma[2] * x[2] + p.alpha[2] / (1.0 + int_pow(x[4], p.hill_n[2]));
  f[3] = -p.gamma[3] * x[3] + p.beta[0] * x[0];
  f[4] = -p.gamma[4] * x[4] + p.beta[1] * x[1];
  f[5] = -p.gamma[5] * x[5] + p.beta[2] * x[2];
}

void kuramoto_bracket(const KuramotoParams& p, const double* x, double* f) {
  const int n = p.n;
  for (int i = 0; i < n; ++i) {
    double coupling = 0.0;
    const double* wrow = p.weights.row(i);
    for (int j = 0; j < n; ++j) {
      if (wrow[j] != 0.0) coupling += wrow[j] * std::sin(x[j] - x[i]);
    }
    f[i] = p.omega[i] + coupling;
  }
}

template <typename Bracket>
TimeSeries run_map(int n_states, double dt, int steps, const Vector& init,
                   const std::optional<NoiseSpec>& noise, Bracket&& bracket) {
  if (init.size() != static_cast<std::size_t>(n_states)) {
    throw std::invalid_argument("initial state has wrong length");
  }

  TimeSeries ts;
  ts.times.resize(steps + 1);
  ts.states = Matrix(steps + 1, n_states);

  Vector variances;
  std::optional<Rng> rng;
  if (noise) {
    variances = resolve_variances(*noise, n_states);
    rng.emplace(noise->seed);
  }

  Vector x = init;
  Vector f(n_states);
  for (int j = 0; j < n_states; ++j) ts.states(0, j) = x[j];
  ts.times[0] = 0.0;

  for (int k = 0; k < steps; ++k) {
    bracket(x.data(), f.data());
    if (rng) {
      // one draw per state per step, in state order, even at zero variance,
      // so the stream layout does not depend on the variance values
      for (int j = 0; j < n_states; ++j) f[j] += rng->normal() * std::sqrt(variances[j]);
    }
    for (int j = 0; j < n_states; ++j) {
      x[j] += dt * f[j];
      if (!std::isfinite(x[j])) {
        throw SimulationError(k + 1, "state " + std::to_string(j + 1) + " diverged");
      }
      ts.states(k + 1, j) = x[j];
    }
    ts.times[k + 1] = (k + 1) * dt;
  }
  return ts;
}

// For SNR-mode noise: per-state variances from the average bracket power of a
// noiseless reference pass.
template <typename Bracket>
Vector variances_for_snr(int n_states, double dt, int steps, const Vector& init, double snr_db,
                         Bracket&& bracket) {
  TimeSeries ref = run_map(n_states, dt, steps, init, std::nullopt, bracket);
  Vector power(n_states, 0.0);
  Vector f(n_states);
  for (int k = 0; k < steps; ++k) {
    Vector x(n_states);
    for (int j = 0; j < n_states; ++j) x[j] = ref.states(k, j);
    bracket(x.data(), f.data());
    for (int j = 0; j < n_states; ++j) power[j] += f[j] * f[j];
  }
  const double gain = std::pow(10.0, snr_db / 10.0);
  for (int j = 0; j < n_states; ++j) {
    power[j] = power[j] / static_cast<double>(steps) / gain;
  }
  return power;
}

template <typename Bracket>
TimeSeries simulate_generic(int n_states, double dt, int steps, const Vector& init,
                            const std::optional<NoiseSpec>& noise, Bracket&& bracket) {
  if (!noise) return run_map(n_states, dt, steps, init, std::nullopt, bracket);
  if (noise->mode == NoiseSpec::Mode::variance) {
    return run_map(n_states, dt, steps, init, noise, bracket);
  }
  NoiseSpec derived = *noise;
  derived.mode = NoiseSpec::Mode::variance;
  derived.variances = variances_for_snr(n_states, dt, steps, init, noise->snr_db, bracket);
  return run_map(n_states, dt, steps, init, std::make_optional(derived), bracket);
}

}  // namespace

TimeSeries simulate_repressilator(const RepressilatorParams& params, const Vector& init,
                                  const std::optional<NoiseSpec>& noise) {
  params.validate();
  return simulate_generic(6, params.dt, params.steps, init, noise,
                          [&](const double* x, double* f) { repressilator_bracket(params, x, f); });
}

TimeSeries simulate_kuramoto(const KuramotoParams& params, const Vector& init,
                             const std::optional<NoiseSpec>& noise) {
  params.validate();
  return simulate_generic(params.n, params.dt, params.steps, init, noise,
                          [&](const double* x, double* f) { kuramoto_bracket(params, x, f); });
}

// ---------------------------------------------------------------------------
// exact dictionary coefficients

std::vector<Vector> repressilator_truth(const RepressilatorParams& params) {
  params.validate();
  // layout of build_hill_spec(6, 4): 6 linear columns, then per Hill
  // coefficient h a repressing block and an activating block of 6 each
  const auto repress_col = [](int state, int h) { return 6 + (h - 1) * 12 + state; };
  const int repressor_of[3] = {5, 3, 4};  // x6, x4, x5 repress genes 1..3

  std::vector<Vector> w(6, Vector(54, 0.0));
  for (int i = 0; i < 3; ++i) {
    w[i][i] = -params.gamma[i];
    w[i][repress_col(repressor_of[i], params.hill_n[i])] = params.alpha[i];
  }
  for (int i = 3; i < 6; ++i) {
    w[i][i] = -params.gamma[i];
    w[i][i - 3] = params.beta[i - 3];
  }
  return w;
}

std::vector<Vector> kuramoto_truth(const KuramotoParams& params) {
  params.validate();
  const int n = params.n;
  const std::size_t width = 5 * static_cast<std::size_t>(n - 1) + 1;
  std::vector<Vector> w(n, Vector(width, 0.0));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const int pos = j < i ? j : j - 1;
      w[i][5 * pos] = params.weights(i, j);  // sin(x_j - x_i) column
    }
    w[i][width - 1] = params.omega[i];
  }
  return w;
}

DictionarySpec BenchmarkInstance::dictionary_for_state(int state) const {
  if (system == BenchmarkSystem::repressilator) return build_hill_spec(6, 4);
  return build_kuramoto_spec(kuramoto.n, state);
}

BenchmarkInstance sample_benchmark_instance(BenchmarkSystem system, std::uint64_t trial_seed,
                                            int kuramoto_n) {
  BenchmarkInstance inst;
  inst.system = system;
  Rng rng(seed_combine(trial_seed, 0xd1c7));

  if (system == BenchmarkSystem::repressilator) {
    RepressilatorParams p;
    for (auto& g : p.gamma) g *= rng.uniform(0.9, 1.1);
    for (auto& b : p.beta) b *= rng.uniform(0.9, 1.1);
    for (auto& a : p.alpha) a *= rng.uniform(0.9, 1.1);
    Vector init(6);
    for (auto& v : init) v = rng.uniform01();
    inst.repressilator = p;
    inst.series = simulate_repressilator(p, init);
    inst.w_true = repressilator_truth(p);
    return inst;
  }

  KuramotoParams p;
  p.n = kuramoto_n;
  p.omega.resize(kuramoto_n);
  const double sd = std::sqrt(10.0);
  for (auto& w : p.omega) w = rng.normal() * sd;

  p.weights = Matrix(kuramoto_n, kuramoto_n);
  const std::size_t n_slots = static_cast<std::size_t>(kuramoto_n) * (kuramoto_n - 1);
  const std::size_t n_edges =
      static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n_slots)));
  std::vector<std::pair<int, int>> slots;
  slots.reserve(n_slots);
  for (int i = 0; i < kuramoto_n; ++i) {
    for (int j = 0; j < kuramoto_n; ++j) {
      if (i != j) slots.emplace_back(i, j);
    }
  }
  for (std::size_t t = 0; t < n_edges; ++t) {
    const std::size_t pick = t + rng.next_u64() % (n_slots - t);
    std::swap(slots[t], slots[pick]);
    p.weights(slots[t].first, slots[t].second) = rng.uniform(-10.0, 10.0);
  }

  Vector init(kuramoto_n);
  for (auto& v : init) v = rng.uniform(0.0, 2.0 * std::numbers::pi);
  inst.kuramoto = p;
  inst.series = simulate_kuramoto(p, init);
  inst.w_true = kuramoto_truth(p);
  return inst;
}

NoiseInjection inject_noise_at_snr(const Vector& clean, double snr_db, std::uint64_t seed) {
  if (clean.size() < 2) throw std::invalid_argument("need at least 2 samples to inject noise");
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  const double clean_norm = norm2(clean);
  if (clean_norm == 0.0) {
    throw std::invalid_argument("signal is identically zero, SNR is undefined");
  }

  Rng rng(seed);
  NoiseInjection out;
  out.xi.resize(clean.size());
  for (auto& v : out.xi) v = rng.normal();
  const double raw_norm = norm2(out.xi);
  if (raw_norm == 0.0) throw std::runtime_error("degenerate noise draw");

  // exact rescaling: ||xi|| = ||clean|| / 10^(snr/20)
  const double target_norm = clean_norm / std::pow(10.0, snr_db / 20.0);
  kernels::scal(target_norm / raw_norm, out.xi.data(), out.xi.size());
  out.lambda_effective = target_norm * target_norm / static_cast<double>(clean.size());
  return out;
}

}  // namespace sparsedyn
