#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sparsedyn/sim.hpp"

namespace sparsedyn {

// Monte Carlo experiment over one benchmark system: draw `trials` random
// instances, corrupt the regression targets at each SNR level, run every
// requested algorithm on every state, and collect per-run error metrics.
struct ExperimentPlan {
  BenchmarkSystem system = BenchmarkSystem::repressilator;
  int kuramoto_n = 20;
  std::vector<double> snr_grid_db = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0};
  int trials = 20;
  std::vector<std::string> algorithms = {"sbl", "lasso", "ista", "omp"};
  std::uint64_t root_seed = 1;
  int workers = 1;
  int omp_max_support = 20;

  void validate() const;  // throws std::invalid_argument
};

// One (trial, snr, algorithm, state) cell. Metrics are NaN when status is
// not "ok"; wall_ms covers the solver call only, not dictionary evaluation.
struct TrialRow {
  int trial = 0;
  double snr_db = 0.0;
  std::string algorithm;
  int state = 0;
  double rnmse = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  bool exact = false;
  std::string status;  // "ok" or "failed"
  double wall_ms = 0.0;
};

struct AggregateCell {
  double mean_rnmse = 0.0;
  double std_rnmse = 0.0;  // sample standard deviation (N-1)
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double exact_rate = 0.0;
  double mean_wall_ms = 0.0;
  int count = 0;   // rows with status "ok"
  int failed = 0;  // rows excluded from the means
};

struct BenchmarkReport {
  ExperimentPlan plan;
  std::vector<TrialRow> rows;
  // keyed by (snr_db, algorithm), averaged over trials and states
  std::map<std::pair<double, std::string>, AggregateCell> aggregates;
  std::string version;
  std::uint64_t raw_hash = 0;  // fnv1a64 of raw_rows_csv(rows)
};

BenchmarkReport run_experiment(const ExperimentPlan& plan);

// Deterministic per-row CSV. Wall time is deliberately excluded so the text
// (and its hash) is identical across reruns and worker counts.
std::string raw_rows_csv(const std::vector<TrialRow>& rows);
std::string timings_csv(const std::vector<TrialRow>& rows);
std::string report_json(const BenchmarkReport& report);

std::vector<TrialRow> parse_raw_rows_csv(const std::string& text);
std::map<std::pair<double, std::string>, AggregateCell> aggregate_rows(
    const std::vector<TrialRow>& rows);

// Writes report.json, raw_rows.csv, timings.csv, rnmse_vs_snr.svg and
// runtime_vs_snr.svg into `out_dir` (which must already exist).
void write_report_files(const BenchmarkReport& report, const std::string& out_dir);

}  // namespace sparsedyn
