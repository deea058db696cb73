// Command line front end: simulate benchmark systems, build dictionaries,
// run the sparse identification pipeline, score estimates against known
// coefficients and drive the Monte Carlo benchmark.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sparsedyn/bench.hpp"
#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/metrics.hpp"
#include "sparsedyn/rng.hpp"
#include "sparsedyn/sbl.hpp"
#include "sparsedyn/serialize.hpp"
#include "sparsedyn/sim.hpp"
#include "sparsedyn/timeseries.hpp"

namespace {

using nlohmann::json;
using namespace sparsedyn;

constexpr std::uint64_t kCliNoiseSalt = 0x51b7a9e3ULL;

struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

BenchmarkSystem parse_system(const std::string& name) {
  if (name == "repressilator") return BenchmarkSystem::repressilator;
  if (name == "kuramoto") return BenchmarkSystem::kuramoto;
  throw UsageError("unknown system \"" + name + "\" (expected repressilator or kuramoto)");
}

double parse_double_or_throw(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
    throw UsageError("bad value for " + what + ": \"" + text + "\"");
  return v;
}

json truth_to_json(const BenchmarkInstance& inst) {
  json out;
  out["system"] = inst.system == BenchmarkSystem::repressilator ? "repressilator" : "kuramoto";
  out["n_states"] = inst.n_states();
  json states = json::array();
  for (std::size_t s = 0; s < inst.n_states(); ++s) {
    json entry;
    entry["state"] = s + 1;
    entry["labels"] = inst.dictionary_for_state(static_cast<int>(s)).labels();
    entry["w"] = inst.w_true[s];
    states.push_back(std::move(entry));
  }
  out["states"] = states;
  return out;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string system = "repressilator";
  int kuramoto_n = 100;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string truth_path;
  std::string noise_var;  // per-state variance, broadcast
  std::string noise_snr;  // trajectory-level snr target in dB
};

int run_simulate(const SimulateArgs& args) {
  const BenchmarkSystem system = parse_system(args.system);
  const BenchmarkInstance inst = sample_benchmark_instance(system, args.seed, args.kuramoto_n);

  TimeSeries ts = inst.series;
  if (!args.noise_var.empty() || !args.noise_snr.empty()) {
    if (!args.noise_var.empty() && !args.noise_snr.empty())
      throw UsageError("--noise-var and --noise-snr are mutually exclusive");
    NoiseSpec noise;
    noise.seed = seed_combine(args.seed, kCliNoiseSalt);
    if (!args.noise_var.empty()) {
      noise.mode = NoiseSpec::Mode::variance;
      noise.variances = {parse_double_or_throw(args.noise_var, "--noise-var")};
    } else {
      noise.mode = NoiseSpec::Mode::snr_db;
      noise.snr_db = parse_double_or_throw(args.noise_snr, "--noise-snr");
    }
    const Vector init = [&] {
      Vector v(inst.series.n_states());
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = inst.series.states(0, j);
      return v;
    }();
    ts = system == BenchmarkSystem::repressilator
             ? simulate_repressilator(inst.repressilator, init, noise)
             : simulate_kuramoto(inst.kuramoto, init, noise);
  }

  write_timeseries_csv(ts, args.out_path);
  std::cout << "wrote " << ts.samples() << " samples x " << ts.n_states() << " states to "
            << args.out_path << "\n";
  if (!args.truth_path.empty()) {
    write_file_atomic(args.truth_path, truth_to_json(inst).dump(2) + "\n");
    std::cout << "wrote coefficient truth to " << args.truth_path << "\n";
  }
  return 0;
}

// -------------------------------------------------------------------- dict

struct DictArgs {
  std::string kind;
  int states = 0;
  int inputs = 0;
  int state_degree = 2;
  int input_degree = 0;
  int state_lags = 1;
  int input_lags = 1;
  int hmax = 4;
  int target = 1;
  std::string out_path;
  bool print_labels = false;
};

int run_dict(const DictArgs& args) {
  if (args.states < 1) throw UsageError("--states must be >= 1");
  DictionarySpec spec;
  if (args.kind == "narx") {
    spec = build_narx_spec(args.states, args.inputs, args.state_degree, args.input_degree,
                           args.state_lags, args.input_lags);
  } else if (args.kind == "hill") {
    spec = build_hill_spec(args.states, args.hmax);
  } else if (args.kind == "kuramoto") {
    if (args.target < 1 || args.target > args.states)
      throw UsageError("--target out of range 1.." + std::to_string(args.states));
    spec = build_kuramoto_spec(args.states, args.target - 1);
  } else {
    throw UsageError("unknown dictionary kind \"" + args.kind +
                     "\" (expected narx, hill or kuramoto)");
  }
  std::cout << spec.size() << " features\n";
  if (args.print_labels)
    for (const std::string& label : spec.labels()) std::cout << label << "\n";
  if (!args.out_path.empty()) {
    write_file_atomic(args.out_path, dictionary_spec_to_json(spec));
    std::cout << "wrote dictionary spec to " << args.out_path << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------- identify

struct IdentifyArgs {
  std::string data_path;
  int state = 1;
  std::string dict;
  std::string dict_file;
  std::string mode = "fd";
  std::string lambda = "auto";
  std::string prior = "flat";
  double prune_threshold = 1e-4;
  int max_iter = 30;
  std::string constraints_path;
  std::string out_path;
};

DictionarySpec spec_from_shorthand(const std::string& text, const TimeSeries& ts,
                                   int target_state) {
  const int n = static_cast<int>(ts.n_states());
  const int m = static_cast<int>(ts.n_inputs());
  if (text == "kuramoto") return build_kuramoto_spec(n, target_state);
  if (text.rfind("hill:", 0) == 0) {
    char* end = nullptr;
    const long h = std::strtol(text.c_str() + 5, &end, 10);
    if (*end != '\0' || h < 1) throw UsageError("bad --dict value \"" + text + "\"");
    return build_hill_spec(n, static_cast<int>(h));
  }
  if (text.rfind("narx:", 0) == 0) {
    std::vector<int> v;
    std::string field;
    for (const char* p = text.c_str() + 5;; ++p) {
      if (*p == ',' || *p == '\0') {
        char* end = nullptr;
        const long x = std::strtol(field.c_str(), &end, 10);
        if (field.empty() || *end != '\0') throw UsageError("bad --dict value \"" + text + "\"");
        v.push_back(static_cast<int>(x));
        field.clear();
        if (*p == '\0') break;
      } else {
        field.push_back(*p);
      }
    }
    if (v.size() != 4)
      throw UsageError("--dict narx wants narx:state_degree,input_degree,state_lags,input_lags");
    return build_narx_spec(n, m, v[0], v[1], v[2], v[3]);
  }
  throw UsageError("bad --dict value \"" + text +
                   "\" (expected hill:H, narx:SD,ID,SL,IL or kuramoto)");
}

Matrix matrix_from_json(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty())
    throw std::runtime_error("constraints: " + what + " must be a non-empty array of rows");
  const std::size_t cols = rows[0].size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols)
      throw std::runtime_error("constraints: ragged rows in " + what);
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

LinearConstraints constraints_from_json(const std::string& text) {
  const json j = json::parse(text);
  LinearConstraints c;
  if (j.contains("eq_matrix")) {
    c.eq_matrix = matrix_from_json(j.at("eq_matrix"), "eq_matrix");
    c.eq_rhs = j.at("eq_rhs").get<Vector>();
  }
  if (j.contains("ineq_matrix")) {
    c.ineq_matrix = matrix_from_json(j.at("ineq_matrix"), "ineq_matrix");
    c.ineq_rhs = j.at("ineq_rhs").get<Vector>();
  }
  return c;
}

Hyperprior prior_from_string(const std::string& text) {
  Hyperprior p;
  if (text == "flat") return p;
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "log")
    p.kind = HyperpriorKind::log_penalty;
  else if (kind == "linear")
    p.kind = HyperpriorKind::linear_penalty;
  else
    throw UsageError("bad --prior value \"" + text + "\" (expected flat, log[:c] or linear[:c])");
  if (colon != std::string::npos)
    p.c = parse_double_or_throw(text.substr(colon + 1), "--prior scale");
  return p;
}

int run_identify(const IdentifyArgs& args) {
  const TimeSeries ts = read_timeseries_csv(args.data_path);
  if (args.state < 1 || args.state > static_cast<int>(ts.n_states()))
    throw UsageError("--state out of range 1.." + std::to_string(ts.n_states()));
  const int target = args.state - 1;

  if (args.dict.empty() == args.dict_file.empty())
    throw UsageError("exactly one of --dict and --dict-file is required");
  const DictionarySpec spec = args.dict.empty()
                                  ? dictionary_spec_from_json(read_file(args.dict_file))
                                  : spec_from_shorthand(args.dict, ts, target);

  OutputMode mode;
  if (args.mode == "fd")
    mode = OutputMode::finite_difference;
  else if (args.mode == "next")
    mode = OutputMode::next_state;
  else
    throw UsageError("bad --mode value \"" + args.mode + "\" (expected fd or next)");

  SblConfig cfg;
  if (args.lambda != "auto") {
    const double lv = parse_double_or_throw(args.lambda, "--lambda");
    if (lv <= 0.0) throw UsageError("--lambda must be positive");
    cfg.lambda = lv;
  }
  cfg.prior = prior_from_string(args.prior);
  cfg.prune_threshold = args.prune_threshold;
  cfg.max_outer_iter = args.max_iter;
  cfg.validate();

  LinearConstraints constraints;
  if (!args.constraints_path.empty())
    constraints = constraints_from_json(read_file(args.constraints_path));

  const RegressionProblem problem = evaluate(spec, ts, target, mode);
  const SblResult result = identify(problem, cfg, constraints);

  std::cout << "target " << problem.target_label << ", " << problem.phi.rows() << " rows x "
            << problem.phi.cols() << " features\n";
  std::cout << "status " << to_string(result.status) << " after " << result.iterations
            << " iterations, lambda " << result.lambda_used << "\n";
  std::cout << "support (" << result.support.size() << " of " << problem.phi.cols()
            << " features):\n";
  for (std::size_t i = 0; i < result.support.size(); ++i) {
    const std::size_t col = result.support[i];
    std::printf("  %4zu  %-24s  w = %+.6g  gamma = %.6g\n", col + 1,
                problem.column_labels[col].c_str(), result.w_hat[col], result.gamma[col]);
  }

  if (!args.out_path.empty()) {
    json out;
    out["target_state"] = args.state;
    out["target_label"] = problem.target_label;
    out["mode"] = args.mode;
    out["lambda"] = result.lambda_used;
    out["status"] = std::string(to_string(result.status));
    out["iterations"] = result.iterations;
    json support = json::array();
    for (std::size_t col : result.support) support.push_back(col + 1);
    out["support"] = support;
    out["labels"] = problem.column_labels;
    out["w_hat"] = result.w_hat;
    out["gamma"] = result.gamma;
    out["posterior_mean"] = result.posterior_mean;
    json cov = json::array();
    for (std::size_t i = 0; i < result.posterior_cov.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < result.posterior_cov.cols(); ++j)
        row.push_back(result.posterior_cov(i, j));
      cov.push_back(std::move(row));
    }
    out["posterior_cov"] = cov;
    json trace = json::array();
    for (double c : result.cost_trace) trace.push_back(c);
    out["cost_trace"] = trace;
    write_file_atomic(args.out_path, out.dump(2) + "\n");
    std::cout << "wrote estimate to " << args.out_path << "\n";
  }
  return 0;
}

// ------------------------------------------------------------------- score

struct ScoreArgs {
  std::string estimate_path;
  std::string truth_path;
  int state = 0;  // 0: take the estimate's target state
  std::string out_path;
};

int run_score(const ScoreArgs& args) {
  const json est = json::parse(read_file(args.estimate_path));
  const json truth = json::parse(read_file(args.truth_path));

  const int state = args.state > 0 ? args.state : est.at("target_state").get<int>();
  const json* entry = nullptr;
  for (const json& e : truth.at("states"))
    if (e.at("state").get<int>() == state) entry = &e;
  if (entry == nullptr)
    throw std::runtime_error("truth file has no entry for state " + std::to_string(state));

  const auto est_labels = est.at("labels").get<std::vector<std::string>>();
  const auto truth_labels = entry->at("labels").get<std::vector<std::string>>();
  if (est_labels != truth_labels)
    throw std::runtime_error("estimate and truth use different dictionaries (" +
                             std::to_string(est_labels.size()) + " vs " +
                             std::to_string(truth_labels.size()) + " features)");

  const Vector w_hat = est.at("w_hat").get<Vector>();
  const Vector w_true = entry->at("w").get<Vector>();
  const double err = rnmse(w_hat, w_true);
  const SupportScore score = support_metrics(w_hat, w_true);

  std::printf("state %d: rnmse %.6g, precision %.4g, recall %.4g, exact %s\n", state, err,
              score.precision, score.recall, score.exact ? "yes" : "no");
  if (!args.out_path.empty()) {
    json out;
    out["state"] = state;
    out["rnmse"] = err;
    out["precision"] = score.precision;
    out["recall"] = score.recall;
    out["exact"] = score.exact;
    out["true_positives"] = score.true_positives;
    out["estimated_size"] = score.estimated_size;
    out["true_size"] = score.true_size;
    write_file_atomic(args.out_path, out.dump(2) + "\n");
  }
  return 0;
}

// ------------------------------------------------------------------- bench

struct BenchArgs {
  std::string system = "repressilator";
  int kuramoto_n = 20;
  std::vector<double> snr_grid = {0, 5, 10, 15, 20, 25};
  int trials = 20;
  std::vector<std::string> algorithms = {"sbl", "lasso", "ista", "omp"};
  std::uint64_t seed = 1;
  int workers = 1;
  int omp_max_support = 20;
  std::string out_dir;
};

int run_bench(const BenchArgs& args) {
  ExperimentPlan plan;
  plan.system = parse_system(args.system);
  plan.kuramoto_n = args.kuramoto_n;
  plan.snr_grid_db = args.snr_grid;
  plan.trials = args.trials;
  plan.algorithms = args.algorithms;
  plan.root_seed = args.seed;
  plan.workers = args.workers;
  plan.omp_max_support = args.omp_max_support;
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const BenchmarkReport report = run_experiment(plan);
  write_report_files(report, args.out_dir);

  std::printf("%8s  %-6s  %12s  %10s  %10s  %6s\n", "snr_db", "alg", "mean_rnmse", "exact_rate",
              "wall_ms", "failed");
  for (const auto& [key, cell] : report.aggregates)
    std::printf("%8g  %-6s  %12.4g  %10.3g  %10.3g  %6d\n", key.first, key.second.c_str(),
                cell.mean_rnmse, cell.exact_rate, cell.mean_wall_ms, cell.failed);
  std::printf("%zu rows, raw hash %016llx, report in %s\n", report.rows.size(),
              static_cast<unsigned long long>(report.raw_hash), args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse identification of nonlinear dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "simulate a benchmark system to CSV");
  sim->add_option("--system", sim_args.system, "repressilator or kuramoto");
  sim->add_option("--kuramoto-n", sim_args.kuramoto_n, "oscillator count for kuramoto");
  sim->add_option("--seed", sim_args.seed, "instance seed");
  sim->add_option("--out", sim_args.out_path, "output trajectory CSV")->required();
  sim->add_option("--truth", sim_args.truth_path, "also write exact coefficients as JSON");
  sim->add_option("--noise-var", sim_args.noise_var, "process noise variance");
  sim->add_option("--noise-snr", sim_args.noise_snr, "process noise level as SNR in dB");

  DictArgs dict_args;
  CLI::App* dict = app.add_subcommand("dict", "build a dictionary specification");
  dict->add_option("--kind", dict_args.kind, "narx, hill or kuramoto")->required();
  dict->add_option("--states", dict_args.states, "number of state variables")->required();
  dict->add_option("--inputs", dict_args.inputs, "number of input variables");
  dict->add_option("--state-degree", dict_args.state_degree, "max total degree in states");
  dict->add_option("--input-degree", dict_args.input_degree, "max total degree in inputs");
  dict->add_option("--state-lags", dict_args.state_lags, "state lags (narx)");
  dict->add_option("--input-lags", dict_args.input_lags, "input lags (narx)");
  dict->add_option("--hmax", dict_args.hmax, "max Hill coefficient (hill)");
  dict->add_option("--target", dict_args.target, "target oscillator, 1-based (kuramoto)");
  dict->add_option("--out", dict_args.out_path, "write the spec as JSON");
  dict->add_flag("--print-labels", dict_args.print_labels, "list feature labels");

  IdentifyArgs id_args;
  CLI::App* ident = app.add_subcommand("identify", "sparse Bayesian identification from CSV");
  ident->add_option("--data", id_args.data_path, "trajectory CSV")->required();
  ident->add_option("--state", id_args.state, "target state, 1-based")->required();
  ident->add_option("--dict", id_args.dict, "hill:H, narx:SD,ID,SL,IL or kuramoto");
  ident->add_option("--dict-file", id_args.dict_file, "dictionary spec JSON");
  ident->add_option("--mode", id_args.mode, "target mode: fd or next");
  ident->add_option("--lambda", id_args.lambda, "noise variance, or auto");
  ident->add_option("--prior", id_args.prior, "flat, log[:c] or linear[:c]");
  ident->add_option("--prune", id_args.prune_threshold, "relative energy pruning threshold");
  ident->add_option("--max-iter", id_args.max_iter, "outer iteration cap");
  ident->add_option("--constraints", id_args.constraints_path, "affine constraints JSON");
  ident->add_option("--out", id_args.out_path, "write the estimate as JSON");

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand("score", "score an estimate against known coefficients");
  score->add_option("--estimate", score_args.estimate_path, "estimate JSON")->required();
  score->add_option("--truth", score_args.truth_path, "truth JSON")->required();
  score->add_option("--state", score_args.state, "state override, 1-based");
  score->add_option("--out", score_args.out_path, "write the metrics as JSON");

  BenchArgs bench_args;
  CLI::App* bench = app.add_subcommand("bench", "Monte Carlo benchmark over snr levels");
  bench->add_option("--system", bench_args.system, "repressilator or kuramoto");
  bench->add_option("--kuramoto-n", bench_args.kuramoto_n, "oscillator count for kuramoto");
  bench->add_option("--snr", bench_args.snr_grid, "snr grid in dB")->delimiter(',');
  bench->add_option("--trials", bench_args.trials, "Monte Carlo trials");
  bench->add_option("--algorithms", bench_args.algorithms, "subset of sbl,lasso,ista,omp")
      ->delimiter(',');
  bench->add_option("--seed", bench_args.seed, "root seed");
  bench->add_option("--workers", bench_args.workers, "worker threads");
  bench->add_option("--omp-max-support", bench_args.omp_max_support, "omp support cap");
  bench->add_option("--out-dir", bench_args.out_dir, "report directory (must exist)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*sim) return run_simulate(sim_args);
    if (*dict) return run_dict(dict_args);
    if (*ident) return run_identify(id_args);
    if (*score) return run_score(score_args);
    if (*bench) return run_bench(bench_args);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
