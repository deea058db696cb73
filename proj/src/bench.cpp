#include "sparsedyn/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "sparsedyn/baselines.hpp"
#include "sparsedyn/metrics.hpp"
#include "sparsedyn/rng.hpp"
#include "sparsedyn/sbl.hpp"
#include "sparsedyn/serialize.hpp"
#include "sparsedyn/svg.hpp"

namespace sparsedyn {

namespace {

// Salts for deriving independent seed streams from the root seed. Fixed
// forever: changing them changes every published benchmark number.
constexpr std::uint64_t kTagInstance = 0x5d1e6b2f0c93a417ULL;
constexpr std::uint64_t kTagNoise = 0xa27b83c4f15e9d60ULL;

const char* system_name(BenchmarkSystem s) {
  return s == BenchmarkSystem::repressilator ? "repressilator" : "kuramoto";
}

std::size_t states_for(const ExperimentPlan& plan) {
  return plan.system == BenchmarkSystem::repressilator ? 6u
                                                       : static_cast<std::size_t>(plan.kuramoto_n);
}

struct StateProblem {
  RegressionProblem prob;  // y is overwritten with the noisy target per run
  Vector clean;            // phi * w_true, the noiseless regression target
};

Vector run_algorithm(const std::string& alg, StateProblem& sp, const Vector& y_noisy,
                     double lambda_eff, const ExperimentPlan& plan) {
  const Matrix& phi = sp.prob.phi;
  if (alg == "sbl") {
    sp.prob.y = y_noisy;
    SblConfig cfg;
    cfg.lambda = lambda_eff;
    return identify(sp.prob, cfg).w_hat;
  }
  BaselineOptions opts;
  if (alg == "omp") {
    opts.omp_max_support = plan.omp_max_support;
    opts.omp_residual_tol = std::sqrt(static_cast<double>(y_noisy.size()) * lambda_eff);
    return run_omp(phi, y_noisy, opts).w;
  }
  // lasso / ista share the usual data-driven level: a tenth of the value at
  // which the all-zero vector becomes optimal
  opts.lambda = 0.1 * norm_inf(matvec_t(phi, y_noisy));
  if (opts.lambda <= 0.0) opts.lambda = 1e-12;
  const BaselineAlgorithm a =
      alg == "lasso" ? BaselineAlgorithm::lasso : BaselineAlgorithm::ista;
  return run_baseline(a, phi, y_noisy, opts).w;
}

// Writes the skeleton for one trial in final row order, everything marked
// failed. The solver loop overwrites rows as results come in, so a throw at
// any point leaves well-formed failure rows behind.
void prefill_trial(const ExperimentPlan& plan, int trial, std::size_t n_states, TrialRow* out) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::size_t k = 0;
  for (double snr : plan.snr_grid_db) {
    for (const std::string& alg : plan.algorithms) {
      for (std::size_t s = 0; s < n_states; ++s) {
        TrialRow& r = out[k++];
        r.trial = trial;
        r.snr_db = snr;
        r.algorithm = alg;
        r.state = static_cast<int>(s) + 1;
        r.rnmse = nan;
        r.precision = nan;
        r.recall = nan;
        r.exact = false;
        r.status = "failed";
        r.wall_ms = 0.0;
      }
    }
  }
}

void run_trial(const ExperimentPlan& plan, int trial, std::size_t n_states, TrialRow* out) {
  prefill_trial(plan, trial, n_states, out);

  BenchmarkInstance inst;
  std::vector<StateProblem> sp(n_states);
  try {
    const std::uint64_t instance_seed =
        seed_combine(plan.root_seed, static_cast<std::uint64_t>(trial), kTagInstance);
    inst = sample_benchmark_instance(plan.system, instance_seed, plan.kuramoto_n);
    for (std::size_t s = 0; s < n_states; ++s) {
      sp[s].prob = evaluate(inst.dictionary_for_state(static_cast<int>(s)), inst.series,
                            static_cast<int>(s), OutputMode::finite_difference);
      sp[s].clean = matvec(sp[s].prob.phi, inst.w_true[s]);
    }
  } catch (const std::exception&) {
    return;  // every row of the trial stays "failed"
  }

  std::size_t k = 0;
  for (double snr : plan.snr_grid_db) {
    // draw the noise once per (snr, state) so all algorithms see the same data
    std::vector<Vector> y_noisy(n_states);
    std::vector<double> lambda_eff(n_states, 0.0);
    std::vector<bool> have_noise(n_states, false);
    for (std::size_t s = 0; s < n_states; ++s) {
      try {
        const std::uint64_t noise_seed = seed_combine(
            seed_combine(plan.root_seed, static_cast<std::uint64_t>(trial), seed_bits(snr),
                         kTagNoise),
            static_cast<std::uint64_t>(s));
        NoiseInjection inj = inject_noise_at_snr(sp[s].clean, snr, noise_seed);
        Vector yn = sp[s].clean;
        for (std::size_t i = 0; i < yn.size(); ++i) yn[i] += inj.xi[i];
        y_noisy[s] = std::move(yn);
        lambda_eff[s] = inj.lambda_effective;
        have_noise[s] = true;
      } catch (const std::exception&) {
        // leave have_noise false; the rows below stay failed
      }
    }
    for (const std::string& alg : plan.algorithms) {
      for (std::size_t s = 0; s < n_states; ++s) {
        TrialRow& row = out[k++];
        if (!have_noise[s]) continue;
        try {
          const auto t0 = std::chrono::steady_clock::now();
          const Vector w = run_algorithm(alg, sp[s], y_noisy[s], lambda_eff[s], plan);
          const auto t1 = std::chrono::steady_clock::now();
          row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          row.rnmse = rnmse(w, inst.w_true[s]);
          const SupportScore score = support_metrics(w, inst.w_true[s]);
          row.precision = score.precision;
          row.recall = score.recall;
          row.exact = score.exact;
          row.status = "ok";
        } catch (const std::exception&) {
          // row keeps its failure skeleton
        }
      }
    }
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(field);
  return out;
}

double parse_field_double(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("raw rows csv: bad numeric field \"" + s + "\" on line " +
                             std::to_string(line_no));
  return v;
}

long parse_field_int(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const long v = std::strtol(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw std::runtime_error("raw rows csv: bad integer field \"" + s + "\" on line " +
                             std::to_string(line_no));
  return v;
}

constexpr const char* kRawHeader = "trial,snr_db,algorithm,state,rnmse,precision,recall,exact,status";

}  // namespace

void ExperimentPlan::validate() const {
  if (trials < 1) throw std::invalid_argument("experiment plan: trials must be >= 1");
  if (workers < 1) throw std::invalid_argument("experiment plan: workers must be >= 1");
  if (omp_max_support < 0)
    throw std::invalid_argument("experiment plan: omp_max_support must be >= 0");
  if (system == BenchmarkSystem::kuramoto && kuramoto_n < 2)
    throw std::invalid_argument("experiment plan: kuramoto_n must be >= 2");
  if (snr_grid_db.empty()) throw std::invalid_argument("experiment plan: empty snr grid");
  for (double s : snr_grid_db)
    if (!std::isfinite(s)) throw std::invalid_argument("experiment plan: non-finite snr level");
  if (algorithms.empty()) throw std::invalid_argument("experiment plan: no algorithms selected");
  std::set<std::string> seen;
  for (const std::string& a : algorithms) {
    if (a != "sbl" && a != "lasso" && a != "ista" && a != "omp")
      throw std::invalid_argument("experiment plan: unknown algorithm \"" + a + "\"");
    if (!seen.insert(a).second)
      throw std::invalid_argument("experiment plan: duplicate algorithm \"" + a + "\"");
  }
}

BenchmarkReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t n_states = states_for(plan);
  const std::size_t per_trial = plan.snr_grid_db.size() * plan.algorithms.size() * n_states;
  std::vector<TrialRow> rows(per_trial * static_cast<std::size_t>(plan.trials));

  // Trials are independent; workers pull trial indices from a shared counter
  // and write into disjoint, preallocated row ranges. The output is therefore
  // identical for any worker count.
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= plan.trials) return;
      run_trial(plan, t, n_states, rows.data() + per_trial * static_cast<std::size_t>(t));
    }
  };
  const int n_threads = std::min(plan.workers, plan.trials);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  BenchmarkReport report;
  report.plan = plan;
  report.rows = std::move(rows);
  report.aggregates = aggregate_rows(report.rows);
  report.version = "0.1.0";
  report.raw_hash = fnv1a64(raw_rows_csv(report.rows));
  return report;
}

std::string raw_rows_csv(const std::vector<TrialRow>& rows) {
  std::string out = kRawHeader;
  out.push_back('\n');
  for (const TrialRow& r : rows) {
    out += std::to_string(r.trial);
    out.push_back(',');
    out += format_double(r.snr_db);
    out.push_back(',');
    out += r.algorithm;
    out.push_back(',');
    out += std::to_string(r.state);
    out.push_back(',');
    out += format_double(r.rnmse);
    out.push_back(',');
    out += format_double(r.precision);
    out.push_back(',');
    out += format_double(r.recall);
    out.push_back(',');
    out += r.exact ? "1" : "0";
    out.push_back(',');
    out += r.status;
    out.push_back('\n');
  }
  return out;
}

std::string timings_csv(const std::vector<TrialRow>& rows) {
  std::string out = "trial,snr_db,algorithm,state,wall_ms\n";
  for (const TrialRow& r : rows) {
    out += std::to_string(r.trial);
    out.push_back(',');
    out += format_double(r.snr_db);
    out.push_back(',');
    out += r.algorithm;
    out.push_back(',');
    out += std::to_string(r.state);
    out.push_back(',');
    out += format_double(r.wall_ms);
    out.push_back('\n');
  }
  return out;
}

std::vector<TrialRow> parse_raw_rows_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<TrialRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != kRawHeader)
        throw std::runtime_error("raw rows csv: unexpected header \"" + line + "\"");
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 9)
      throw std::runtime_error("raw rows csv: expected 9 fields on line " +
                               std::to_string(line_no) + ", got " + std::to_string(f.size()));
    TrialRow r;
    r.trial = static_cast<int>(parse_field_int(f[0], line_no));
    r.snr_db = parse_field_double(f[1], line_no);
    r.algorithm = f[2];
    r.state = static_cast<int>(parse_field_int(f[3], line_no));
    r.rnmse = parse_field_double(f[4], line_no);
    r.precision = parse_field_double(f[5], line_no);
    r.recall = parse_field_double(f[6], line_no);
    if (f[7] != "0" && f[7] != "1")
      throw std::runtime_error("raw rows csv: bad exact flag on line " + std::to_string(line_no));
    r.exact = f[7] == "1";
    if (f[8] != "ok" && f[8] != "failed")
      throw std::runtime_error("raw rows csv: bad status on line " + std::to_string(line_no));
    r.status = f[8];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::map<std::pair<double, std::string>, AggregateCell> aggregate_rows(
    const std::vector<TrialRow>& rows) {
  std::map<std::pair<double, std::string>, AggregateCell> cells;
  for (const TrialRow& r : rows) {
    AggregateCell& c = cells[{r.snr_db, r.algorithm}];
    if (r.status != "ok") {
      ++c.failed;
      continue;
    }
    ++c.count;
    c.mean_rnmse += r.rnmse;
    c.mean_precision += r.precision;
    c.mean_recall += r.recall;
    c.exact_rate += r.exact ? 1.0 : 0.0;
    c.mean_wall_ms += r.wall_ms;
  }
  for (auto& [key, c] : cells) {
    if (c.count == 0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      c.mean_rnmse = c.std_rnmse = c.mean_precision = c.mean_recall = nan;
      c.exact_rate = nan;
      c.mean_wall_ms = nan;
      continue;
    }
    const double n = static_cast<double>(c.count);
    c.mean_rnmse /= n;
    c.mean_precision /= n;
    c.mean_recall /= n;
    c.exact_rate /= n;
    c.mean_wall_ms /= n;
  }
  // second pass for the sample standard deviation of the rnmse
  std::map<std::pair<double, std::string>, double> ss;
  for (const TrialRow& r : rows) {
    if (r.status != "ok") continue;
    const double d = r.rnmse - cells[{r.snr_db, r.algorithm}].mean_rnmse;
    ss[{r.snr_db, r.algorithm}] += d * d;
  }
  for (auto& [key, c] : cells) {
    if (c.count >= 2)
      c.std_rnmse = std::sqrt(ss[key] / static_cast<double>(c.count - 1));
    else if (c.count == 1)
      c.std_rnmse = 0.0;
  }
  return cells;
}

std::string report_json(const BenchmarkReport& report) {
  nlohmann::json j;
  j["version"] = report.version;
  nlohmann::json plan;
  plan["system"] = system_name(report.plan.system);
  plan["kuramoto_n"] = report.plan.kuramoto_n;
  plan["snr_grid_db"] = report.plan.snr_grid_db;
  plan["trials"] = report.plan.trials;
  plan["algorithms"] = report.plan.algorithms;
  plan["root_seed"] = report.plan.root_seed;
  plan["workers"] = report.plan.workers;
  plan["omp_max_support"] = report.plan.omp_max_support;
  j["plan"] = plan;
  char hash_hex[17];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(report.raw_hash));
  j["raw_hash"] = hash_hex;
  j["n_rows"] = report.rows.size();
  nlohmann::json aggs = nlohmann::json::array();
  for (const auto& [key, c] : report.aggregates) {
    nlohmann::json a;
    a["snr_db"] = key.first;
    a["algorithm"] = key.second;
    a["mean_rnmse"] = c.mean_rnmse;
    a["std_rnmse"] = c.std_rnmse;
    a["mean_precision"] = c.mean_precision;
    a["mean_recall"] = c.mean_recall;
    a["exact_rate"] = c.exact_rate;
    a["mean_wall_ms"] = c.mean_wall_ms;
    a["count"] = c.count;
    a["failed"] = c.failed;
    aggs.push_back(std::move(a));
  }
  j["aggregates"] = aggs;
  return j.dump(2) + "\n";
}

void write_report_files(const BenchmarkReport& report, const std::string& out_dir) {
  report.plan.validate();

  std::string aggregates_csv =
      "snr_db,algorithm,mean_rnmse,std_rnmse,mean_precision,mean_recall,exact_rate,"
      "mean_wall_ms,count,failed\n";
  for (const auto& [key, c] : report.aggregates) {
    aggregates_csv += format_double(key.first) + "," + key.second + "," +
                      format_double(c.mean_rnmse) + "," + format_double(c.std_rnmse) + "," +
                      format_double(c.mean_precision) + "," + format_double(c.mean_recall) + "," +
                      format_double(c.exact_rate) + "," + format_double(c.mean_wall_ms) + "," +
                      std::to_string(c.count) + "," + std::to_string(c.failed) + "\n";
  }

  auto curve = [&](double AggregateCell::* field) {
    std::vector<SvgSeries> series;
    for (const std::string& alg : report.plan.algorithms) {
      SvgSeries s;
      s.label = alg;
      for (double snr : report.plan.snr_grid_db) {
        const auto it = report.aggregates.find({snr, alg});
        const double v = it == report.aggregates.end()
                             ? std::numeric_limits<double>::quiet_NaN()
                             : it->second.*field;
        s.points.emplace_back(snr, v);
      }
      series.push_back(std::move(s));
    }
    return series;
  };
  const std::string title = std::string(system_name(report.plan.system)) + " benchmark";
  const std::string rnmse_svg = line_chart_svg(title, "SNR (dB)", "mean RNMSE",
                                               curve(&AggregateCell::mean_rnmse), true);
  const std::string runtime_svg = line_chart_svg(title, "SNR (dB)", "mean solve time (ms)",
                                                 curve(&AggregateCell::mean_wall_ms), true);

  // everything is rendered before the first write, so a failure above leaves
  // the output directory untouched
  write_file_atomic(out_dir + "/report.json", report_json(report));
  write_file_atomic(out_dir + "/raw_rows.csv", raw_rows_csv(report.rows));
  write_file_atomic(out_dir + "/timings.csv", timings_csv(report.rows));
  write_file_atomic(out_dir + "/aggregates.csv", aggregates_csv);
  write_file_atomic(out_dir + "/rnmse_vs_snr.svg", rnmse_svg);
  write_file_atomic(out_dir + "/runtime_vs_snr.svg", runtime_svg);
}

}  // namespace sparsedyn
