#include "sparsedyn/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <nlohmann/json.hpp>

namespace sparsedyn {

using nlohmann::json;

EvaluationError::EvaluationError(std::size_t row_, std::size_t column_, const std::string& label_,
                                 const std::string& reason)
    : std::runtime_error("feature '" + label_ + "' at row " + std::to_string(row_) +
                         ", column " + std::to_string(column_) + ": " + reason),
      row(row_),
      column(column_),
      label(label_) {}

namespace {

double int_pow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

std::string var_name(bool is_input, int index) {
  return (is_input ? "u" : "x") + std::to_string(index + 1);
}

std::string power_suffix(int p) { return p > 1 ? "^" + std::to_string(p) : ""; }

}  // namespace

Feature Feature::constant() { return Feature{}; }

Feature Feature::monomial(std::vector<VarPower> terms) {
  Feature f;
  f.kind = FeatureKind::monomial;
  f.terms = std::move(terms);
  return f;
}

Feature Feature::hill(bool activating, int state, int h) {
  Feature f;
  f.kind = activating ? FeatureKind::hill_activate : FeatureKind::hill_repress;
  f.hill_state = state;
  f.hill_coefficient = h;
  return f;
}

Feature Feature::coupling(CouplingForm form, int j, int i) {
  Feature f;
  f.kind = FeatureKind::coupling;
  f.form = form;
  f.pair_j = j;
  f.pair_i = i;
  return f;
}

std::string Feature::label() const {
  switch (kind) {
    case FeatureKind::constant:
      return "1";
    case FeatureKind::monomial: {
      if (terms.empty()) return "1";
      std::string out;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        const VarPower& t = terms[k];
        if (k > 0) out += "*";
        out += var_name(t.is_input, t.index);
        if (t.lag > 0) out += "[k-" + std::to_string(t.lag) + "]";
        out += power_suffix(t.power);
      }
      return out;
    }
    case FeatureKind::hill_repress: {
      const std::string x = var_name(false, hill_state) + power_suffix(hill_coefficient);
      return "1/(1+" + x + ")";
    }
    case FeatureKind::hill_activate: {
      const std::string x = var_name(false, hill_state) + power_suffix(hill_coefficient);
      return x + "/(1+" + x + ")";
    }
    case FeatureKind::coupling: {
      const std::string d = var_name(false, pair_j) + "-" + var_name(false, pair_i);
      switch (form) {
        case CouplingForm::sin_diff: return "sin(" + d + ")";
        case CouplingForm::cos_diff: return "cos(" + d + ")";
        case CouplingForm::lin_diff: return "(" + d + ")";
        case CouplingForm::sin2_diff: return "sin^2(" + d + ")";
        case CouplingForm::cos2_diff: return "cos^2(" + d + ")";
      }
      return "?";
    }
  }
  return "?";
}

std::vector<std::string> DictionarySpec::labels() const {
  std::vector<std::string> out;
  out.reserve(features.size());
  for (const Feature& f : features) out.push_back(f.label());
  return out;
}

void DictionarySpec::validate() const {
  if (n_states < 1) throw DictionaryError("dictionary needs at least one state variable");
  if (n_inputs < 0 || max_state_lag < 0 || max_input_lag < 0) {
    throw DictionaryError("negative dimension in dictionary spec");
  }
  if (n_inputs == 0 && max_input_lag != 0) {
    throw DictionaryError("input lag declared without input variables");
  }
  if (features.empty()) throw DictionaryError("dictionary has no features");
  for (std::size_t c = 0; c < features.size(); ++c) {
    const Feature& f = features[c];
    const std::string where = " (feature " + std::to_string(c) + ")";
    switch (f.kind) {
      case FeatureKind::constant:
        break;
      case FeatureKind::monomial:
        for (const VarPower& t : f.terms) {
          const int limit = t.is_input ? n_inputs : n_states;
          const int max_lag = t.is_input ? max_input_lag : max_state_lag;
          if (t.index < 0 || t.index >= limit) {
            throw DictionaryError("variable index out of range" + where);
          }
          if (t.lag < 0 || t.lag > max_lag) throw DictionaryError("lag out of range" + where);
          if (t.power < 1) throw DictionaryError("monomial power must be >= 1" + where);
        }
        break;
      case FeatureKind::hill_repress:
      case FeatureKind::hill_activate:
        if (f.hill_state < 0 || f.hill_state >= n_states) {
          throw DictionaryError("Hill state index out of range" + where);
        }
        if (f.hill_coefficient < 1) {
          throw DictionaryError("Hill coefficient must be >= 1" + where);
        }
        break;
      case FeatureKind::coupling:
        if (f.pair_i < 0 || f.pair_i >= n_states || f.pair_j < 0 || f.pair_j >= n_states) {
          throw DictionaryError("coupling index out of range" + where);
        }
        if (f.pair_i == f.pair_j) throw DictionaryError("coupling needs two distinct states" + where);
        break;
    }
  }
}

// ---------------------------------------------------------------------------
// builders

namespace {

// All exponent vectors over `nvars` variables with total degree <= max_degree,
// graded lexicographic: degree ascending, and within a degree the first
// variable takes the highest power first.
void enumerate_exponents(int nvars, int max_degree, std::vector<std::vector<int>>& out) {
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  for (int deg = 0; deg <= max_degree; ++deg) {
    // recursive descent without recursion: odometer over positions
    std::function<void(int, int)> gen = [&](int pos, int remaining) {
      if (pos == nvars - 1) {
        e[pos] = remaining;
        out.push_back(e);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        e[pos] = v;
        gen(pos + 1, remaining - v);
      }
    };
    if (nvars == 0) {
      if (deg == 0) out.emplace_back();
      continue;
    }
    gen(0, deg);
  }
}

// Maps an exponent vector over lag-major variables into monomial terms.
std::vector<VarPower> exponents_to_terms(const std::vector<int>& e, bool is_input, int nvars_per_lag) {
  std::vector<VarPower> terms;
  for (std::size_t v = 0; v < e.size(); ++v) {
    if (e[v] == 0) continue;
    VarPower t;
    t.is_input = is_input;
    t.lag = static_cast<int>(v) / nvars_per_lag;
    t.index = static_cast<int>(v) % nvars_per_lag;
    t.power = e[v];
    terms.push_back(t);
  }
  return terms;
}

}  // namespace

DictionarySpec build_narx_spec(int n_states, int n_inputs, int state_degree, int input_degree,
                               int state_lags, int input_lags) {
  if (n_states < 1) throw DictionaryError("build_narx_spec: need at least one state");
  if (n_inputs < 0) throw DictionaryError("build_narx_spec: negative input count");
  if (state_degree < 0 || input_degree < 0) throw DictionaryError("build_narx_spec: negative degree");
  if (state_lags < 0 || input_lags < 0) throw DictionaryError("build_narx_spec: negative lag");

  DictionarySpec spec;
  spec.n_states = n_states;
  spec.n_inputs = n_inputs;
  spec.max_state_lag = state_lags;
  spec.max_input_lag = n_inputs > 0 ? input_lags : 0;

  std::vector<std::vector<int>> state_exps;
  enumerate_exponents(n_states * (state_lags + 1), state_degree, state_exps);
  std::vector<std::vector<int>> input_exps;
  if (n_inputs > 0) {
    enumerate_exponents(n_inputs * (input_lags + 1), input_degree, input_exps);
  } else {
    input_exps.emplace_back();  // just the empty product
  }

  for (const auto& se : state_exps) {
    const auto sterms = exponents_to_terms(se, false, n_states);
    for (const auto& ie : input_exps) {
      auto terms = sterms;
      const auto iterms = exponents_to_terms(ie, true, std::max(n_inputs, 1));
      terms.insert(terms.end(), iterms.begin(), iterms.end());
      spec.features.push_back(terms.empty() ? Feature::constant()
                                            : Feature::monomial(std::move(terms)));
    }
  }
  spec.validate();
  return spec;
}

DictionarySpec build_hill_spec(int n_states, int h_max) {
  if (n_states < 1) throw DictionaryError("build_hill_spec: need at least one state");
  if (h_max < 1) throw DictionaryError("build_hill_spec: need h_max >= 1");

  DictionarySpec spec;
  spec.n_states = n_states;
  for (int i = 0; i < n_states; ++i) {
    spec.features.push_back(Feature::monomial({VarPower{false, i, 0, 1}}));
  }
  for (int h = 1; h <= h_max; ++h) {
    for (int i = 0; i < n_states; ++i) spec.features.push_back(Feature::hill(false, i, h));
    for (int i = 0; i < n_states; ++i) spec.features.push_back(Feature::hill(true, i, h));
  }
  spec.validate();
  return spec;
}

DictionarySpec build_kuramoto_spec(int n_oscillators, int target) {
  if (n_oscillators < 2) throw DictionaryError("build_kuramoto_spec: need at least 2 oscillators");
  if (target < 0 || target >= n_oscillators) {
    throw DictionaryError("build_kuramoto_spec: target out of range");
  }

  DictionarySpec spec;
  spec.n_states = n_oscillators;
  for (int j = 0; j < n_oscillators; ++j) {
    if (j == target) continue;
    for (CouplingForm form : {CouplingForm::sin_diff, CouplingForm::cos_diff,
                              CouplingForm::lin_diff, CouplingForm::sin2_diff,
                              CouplingForm::cos2_diff}) {
      spec.features.push_back(Feature::coupling(form, j, target));
    }
  }
  spec.features.push_back(Feature::constant());
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

struct RowView {
  const TimeSeries& ts;
  std::size_t base;  // sample index of "now"

  double state(int idx, int lag) const { return ts.states(base - lag, idx); }
  double input(int idx, int lag) const { return ts.inputs(base - lag, idx); }
};

double eval_feature(const Feature& f, const RowView& rv, std::size_t row, std::size_t col) {
  switch (f.kind) {
    case FeatureKind::constant:
      return 1.0;
    case FeatureKind::monomial: {
      double v = 1.0;
      for (const VarPower& t : f.terms) {
        const double x = t.is_input ? rv.input(t.index, t.lag) : rv.state(t.index, t.lag);
        v *= int_pow(x, t.power);
      }
      return v;
    }
    case FeatureKind::hill_repress:
    case FeatureKind::hill_activate: {
      const double x = rv.state(f.hill_state, 0);
      if (x < 0.0) {
        throw EvaluationError(row, col, f.label(), "Hill feature evaluated at negative state");
      }
      const double xh = int_pow(x, f.hill_coefficient);
      return f.kind == FeatureKind::hill_repress ? 1.0 / (1.0 + xh) : xh / (1.0 + xh);
    }
    case FeatureKind::coupling: {
      const double d = rv.state(f.pair_j, 0) - rv.state(f.pair_i, 0);
      switch (f.form) {
        case CouplingForm::sin_diff: return std::sin(d);
        case CouplingForm::cos_diff: return std::cos(d);
        case CouplingForm::lin_diff: return d;
        case CouplingForm::sin2_diff: {
          const double s = std::sin(d);
          return s * s;
        }
        case CouplingForm::cos2_diff: {
          const double c = std::cos(d);
          return c * c;
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

}  // namespace

RegressionProblem evaluate(const DictionarySpec& spec, const TimeSeries& ts, int target_state,
                           OutputMode mode) {
  spec.validate();
  ts.validate();
  if (spec.n_states != static_cast<int>(ts.n_states())) {
    throw DictionaryError("dictionary expects " + std::to_string(spec.n_states) +
                          " states, series has " + std::to_string(ts.n_states()));
  }
  if (spec.n_inputs != static_cast<int>(ts.n_inputs())) {
    throw DictionaryError("dictionary expects " + std::to_string(spec.n_inputs) +
                          " inputs, series has " + std::to_string(ts.n_inputs()));
  }
  if (target_state < 0 || target_state >= spec.n_states) {
    throw DictionaryError("target state out of range");
  }
  const std::size_t lag = static_cast<std::size_t>(std::max(spec.max_state_lag, spec.max_input_lag));
  if (ts.samples() < lag + 2) {
    throw DictionaryError("series too short: need at least " + std::to_string(lag + 2) +
                          " samples for the declared lags");
  }

  const std::size_t rows = ts.samples() - 1 - lag;
  const std::size_t cols = spec.size();
  RegressionProblem out;
  out.phi = Matrix(rows, cols);
  out.y.resize(rows);
  out.column_labels = spec.labels();
  out.target_label = "x" + std::to_string(target_state + 1) +
                     (mode == OutputMode::next_state ? ":next_state" : ":finite_difference");

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r + lag;
    const RowView rv{ts, base};
    double* prow = out.phi.row(r);
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = eval_feature(spec.features[c], rv, r, c);
      if (!std::isfinite(v)) {
        throw EvaluationError(r, c, spec.features[c].label(), "non-finite feature value");
      }
      prow[c] = v;
    }
    if (mode == OutputMode::next_state) {
      out.y[r] = ts.states(base + 1, target_state);
    } else {
      out.y[r] = (ts.states(base + 1, target_state) - ts.states(base, target_state)) /
                 (ts.times[base + 1] - ts.times[base]);
    }
    if (!std::isfinite(out.y[r])) {
      throw EvaluationError(r, cols, "y", "non-finite regression target");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON round trip

namespace {

json feature_to_json(const Feature& f) {
  switch (f.kind) {
    case FeatureKind::constant:
      return json{{"kind", "constant"}};
    case FeatureKind::monomial: {
      json terms = json::array();
      for (const VarPower& t : f.terms) {
        terms.push_back(json{{"var", t.is_input ? "u" : "x"},
                             {"index", t.index + 1},
                             {"lag", t.lag},
                             {"power", t.power}});
      }
      return json{{"kind", "monomial"}, {"terms", terms}};
    }
    case FeatureKind::hill_repress:
    case FeatureKind::hill_activate:
      return json{{"kind", f.kind == FeatureKind::hill_repress ? "hill_repress" : "hill_activate"},
                  {"index", f.hill_state + 1},
                  {"h", f.hill_coefficient}};
    case FeatureKind::coupling: {
      const char* form = "";
      switch (f.form) {
        case CouplingForm::sin_diff: form = "sin"; break;
        case CouplingForm::cos_diff: form = "cos"; break;
        case CouplingForm::lin_diff: form = "lin"; break;
        case CouplingForm::sin2_diff: form = "sin2"; break;
        case CouplingForm::cos2_diff: form = "cos2"; break;
      }
      return json{{"kind", "coupling"}, {"form", form}, {"j", f.pair_j + 1}, {"i", f.pair_i + 1}};
    }
  }
  return json{};
}

Feature feature_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Feature::constant();
  if (kind == "monomial") {
    std::vector<VarPower> terms;
    for (const auto& t : j.at("terms")) {
      VarPower vp;
      vp.is_input = t.at("var").get<std::string>() == "u";
      vp.index = t.at("index").get<int>() - 1;
      vp.lag = t.value("lag", 0);
      vp.power = t.value("power", 1);
      terms.push_back(vp);
    }
    return Feature::monomial(std::move(terms));
  }
  if (kind == "hill_repress" || kind == "hill_activate") {
    return Feature::hill(kind == "hill_activate", j.at("index").get<int>() - 1,
                         j.at("h").get<int>());
  }
  if (kind == "coupling") {
    const std::string form = j.at("form").get<std::string>();
    CouplingForm cf;
    if (form == "sin") cf = CouplingForm::sin_diff;
    else if (form == "cos") cf = CouplingForm::cos_diff;
    else if (form == "lin") cf = CouplingForm::lin_diff;
    else if (form == "sin2") cf = CouplingForm::sin2_diff;
    else if (form == "cos2") cf = CouplingForm::cos2_diff;
    else throw DictionaryError("unknown coupling form: " + form);
    return Feature::coupling(cf, j.at("j").get<int>() - 1, j.at("i").get<int>() - 1);
  }
  throw DictionaryError("unknown feature kind: " + kind);
}

}  // namespace

std::string dictionary_spec_to_json(const DictionarySpec& spec) {
  json j;
  j["n_states"] = spec.n_states;
  j["n_inputs"] = spec.n_inputs;
  j["max_state_lag"] = spec.max_state_lag;
  j["max_input_lag"] = spec.max_input_lag;
  json feats = json::array();
  for (const Feature& f : spec.features) feats.push_back(feature_to_json(f));
  j["features"] = feats;
  return j.dump(2);
}

DictionarySpec dictionary_spec_from_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DictionaryError(std::string("bad dictionary JSON: ") + e.what());
  }
  DictionarySpec spec;
  try {
    spec.n_states = j.at("n_states").get<int>();
    spec.n_inputs = j.value("n_inputs", 0);
    spec.max_state_lag = j.value("max_state_lag", 0);
    spec.max_input_lag = j.value("max_input_lag", 0);
    for (const auto& fj : j.at("features")) spec.features.push_back(feature_from_json(fj));
  } catch (const json::exception& e) {
    throw DictionaryError(std::string("bad dictionary JSON: ") + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace sparsedyn
