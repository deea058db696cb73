#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include "sparsedyn/dictionary.hpp"
#include "sparsedyn/sim.hpp"

using namespace sparsedyn;

namespace {

long long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Expected library size: monomials of total degree <= d over v variables
// number C(v + d, d), states and inputs independently, lags 0..m included.
long long narx_count(int n_states, int n_inputs, int sd, int id, int sl, int il) {
  const long long s = binom(n_states * (sl + 1) + sd, sd);
  const long long u = n_inputs > 0 ? binom(n_inputs * (il + 1) + id, id) : 1;
  return s * u;
}

// Canonical key of a monomial feature: exponents over (block, lag, index).
std::string feature_key(const Feature& f) {
  if (f.kind == FeatureKind::constant) return "";
  REQUIRE(f.kind == FeatureKind::monomial);
  std::vector<std::string> parts;
  for (const VarPower& t : f.terms)
    parts.push_back((t.is_input ? "u" : "x") + std::to_string(t.index) + "L" +
                    std::to_string(t.lag) + "P" + std::to_string(t.power));
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) key += p + ";";
  return key;
}

TimeSeries ramp_series(std::size_t samples, std::size_t n_states) {
  TimeSeries ts;
  ts.times.resize(samples);
  ts.states = Matrix(samples, n_states);
  for (std::size_t i = 0; i < samples; ++i) {
    ts.times[i] = static_cast<double>(i);
    for (std::size_t j = 0; j < n_states; ++j)
      ts.states(i, j) = static_cast<double>(i * 10 + j);
  }
  return ts;
}

}  // namespace

TEST_SUITE("dictionary") {

TEST_CASE("polynomial library is ordered degree first") {
  const DictionarySpec spec = build_narx_spec(2, 0, 2, 0, 0, 0);
  const std::vector<std::string> want = {"1", "x1", "x2", "x1^2", "x1*x2", "x2^2"};
  CHECK(spec.labels() == want);
}

TEST_CASE("polynomial library sizes match the closed form") {
  CHECK(build_narx_spec(2, 0, 2, 0, 0, 0).size() == narx_count(2, 0, 2, 0, 0, 0));
  CHECK(build_narx_spec(2, 1, 2, 1, 1, 1).size() == 45);
  CHECK(build_narx_spec(3, 0, 3, 0, 0, 0).size() == narx_count(3, 0, 3, 0, 0, 0));
  CHECK(build_narx_spec(2, 2, 3, 2, 1, 0).size() ==
        static_cast<std::size_t>(narx_count(2, 2, 3, 2, 1, 0)));
  // the documented worked example
  CHECK(narx_count(1, 1, 5, 4, 2, 2) == 56 * 35);
  CHECK(build_narx_spec(1, 1, 5, 4, 2, 2).size() == 1960);
}

TEST_CASE("polynomial library is exactly the brute-force enumeration") {
  // odometer over every exponent vector, filtered by the degree caps
  const int n_states = 2, n_inputs = 1, sd = 2, id = 1, sl = 1, il = 1;
  const int nvx = n_states * (sl + 1), nvu = n_inputs * (il + 1);

  std::set<std::string> expected;
  std::vector<int> ex(nvx, 0), eu(nvu, 0);
  auto key_of = [&] {
    std::vector<std::string> parts;
    for (int v = 0; v < nvx; ++v)
      if (ex[v] > 0)
        parts.push_back("x" + std::to_string(v % n_states) + "L" + std::to_string(v / n_states) +
                        "P" + std::to_string(ex[v]));
    for (int v = 0; v < nvu; ++v)
      if (eu[v] > 0)
        parts.push_back("u" + std::to_string(v % n_inputs) + "L" + std::to_string(v / n_inputs) +
                        "P" + std::to_string(eu[v]));
    std::sort(parts.begin(), parts.end());
    std::string key;
    for (const auto& p : parts) key += p + ";";
    return key;
  };
  std::function<void(int)> spin_u = [&](int pos) {
    if (pos == nvu) {
      int du = 0;
      for (int v : eu) du += v;
      if (du <= id) expected.insert(key_of());
      return;
    }
    for (eu[pos] = 0; eu[pos] <= id; ++eu[pos]) spin_u(pos + 1);
    eu[pos] = 0;
  };
  std::function<void(int)> spin_x = [&](int pos) {
    if (pos == nvx) {
      int dx = 0;
      for (int v : ex) dx += v;
      if (dx <= sd) spin_u(0);
      return;
    }
    for (ex[pos] = 0; ex[pos] <= sd; ++ex[pos]) spin_x(pos + 1);
    ex[pos] = 0;
  };
  spin_x(0);

  const DictionarySpec spec = build_narx_spec(n_states, n_inputs, sd, id, sl, il);
  REQUIRE(spec.size() <= 500);
  std::set<std::string> got;
  for (const Feature& f : spec.features) {
    const auto [it, inserted] = got.insert(feature_key(f));
    CHECK(inserted);  // no duplicate monomials
  }
  CHECK(got == expected);
}

TEST_CASE("hill library layout") {
  const DictionarySpec spec = build_hill_spec(6, 4);
  REQUIRE(spec.size() == 54);  // 6 linear + 4 coefficients x 12 Hill features
  CHECK(spec.labels()[0] == "x1");
  CHECK(spec.labels()[5] == "x6");
  CHECK(spec.labels()[6] == "1/(1+x1)");
  CHECK(spec.labels()[12] == "x1/(1+x1)");
  CHECK(spec.labels()[35] == "1/(1+x6^3)");
  CHECK(spec.labels()[53] == "x6^4/(1+x6^4)");
}

TEST_CASE("hill features evaluate to their closed form") {
  TimeSeries ts;
  ts.times = {0.0, 1.0};
  ts.states = Matrix(2, 1);
  ts.states(0, 0) = 2.0;
  ts.states(1, 0) = 0.5;
  const DictionarySpec spec = build_hill_spec(1, 3);
  const RegressionProblem p = evaluate(spec, ts, 0, OutputMode::next_state);
  REQUIRE(p.phi.rows() == 1);
  REQUIRE(p.phi.cols() == 7);
  CHECK(p.phi(0, 0) == 2.0);                                     // x1
  CHECK(p.phi(0, 1) == doctest::Approx(1.0 / 3.0));              // 1/(1+x)
  CHECK(p.phi(0, 2) == doctest::Approx(2.0 / 3.0));              // x/(1+x)
  CHECK(p.phi(0, 3) == doctest::Approx(1.0 / 5.0));              // 1/(1+x^2)
  CHECK(p.phi(0, 5) == doctest::Approx(1.0 / 9.0));              // 1/(1+x^3)
  CHECK(p.phi(0, 6) == doctest::Approx(8.0 / 9.0));              // x^3/(1+x^3)
  CHECK(p.y[0] == 0.5);
}

TEST_CASE("coupling library layout and values") {
  CHECK(build_kuramoto_spec(100, 0).size() == 496);
  const DictionarySpec spec = build_kuramoto_spec(3, 1);
  const std::vector<std::string> want = {
      "sin(x1-x2)", "cos(x1-x2)", "(x1-x2)", "sin^2(x1-x2)", "cos^2(x1-x2)",
      "sin(x3-x2)", "cos(x3-x2)", "(x3-x2)", "sin^2(x3-x2)", "cos^2(x3-x2)", "1"};
  CHECK(spec.labels() == want);

  TimeSeries ts;
  ts.times = {0.0, 1.0};
  ts.states = Matrix(2, 3);
  ts.states(0, 0) = 0.9;
  ts.states(0, 1) = 0.2;
  ts.states(0, 2) = -0.4;
  ts.states(1, 0) = ts.states(1, 1) = ts.states(1, 2) = 0.0;
  const RegressionProblem p = evaluate(spec, ts, 1, OutputMode::next_state);
  CHECK(p.phi(0, 0) == doctest::Approx(std::sin(0.7)));
  CHECK(p.phi(0, 1) == doctest::Approx(std::cos(0.7)));
  CHECK(p.phi(0, 2) == doctest::Approx(0.7));
  CHECK(p.phi(0, 3) == doctest::Approx(std::sin(0.7) * std::sin(0.7)));
  CHECK(p.phi(0, 7) == doctest::Approx(-0.6));
  CHECK(p.phi(0, 10) == 1.0);
}

TEST_CASE("evaluation on the oscillator benchmark closes the loop") {
  // on a noiseless trajectory the finite-difference target is reproduced by
  // the exact coefficients without error (the map is the bracket itself)
  const RepressilatorParams params;
  const TimeSeries ts = simulate_repressilator(params, Vector(6, 0.0));
  REQUIRE(ts.samples() == 51);
  const std::vector<Vector> w = repressilator_truth(params);
  const DictionarySpec spec = build_hill_spec(6, 4);
  for (int s = 0; s < 6; ++s) {
    const RegressionProblem p = evaluate(spec, ts, s, OutputMode::finite_difference);
    REQUIRE(p.phi.rows() == 50);
    REQUIRE(p.phi.cols() == 54);
    const Vector yhat = matvec(p.phi, w[s]);
    for (std::size_t r = 0; r < p.y.size(); ++r)
      CHECK(std::fabs(yhat[r] - p.y[r]) <= 1e-10);
  }
}

TEST_CASE("lagged features read the right samples") {
  const TimeSeries ts = ramp_series(6, 2);
  DictionarySpec spec;
  spec.n_states = 2;
  spec.max_state_lag = 2;
  spec.features.push_back(Feature::monomial({VarPower{false, 1, 2, 1}}));  // x2[k-2]
  spec.features.push_back(Feature::monomial({VarPower{false, 0, 0, 2}}));  // x1^2
  const RegressionProblem p = evaluate(spec, ts, 0, OutputMode::next_state);
  // max lag 2: rows start at sample 2 and stop one short of the end
  REQUIRE(p.phi.rows() == 3);
  CHECK(p.phi(0, 0) == 1.0);   // x2 at sample 0
  CHECK(p.phi(1, 0) == 11.0);  // x2 at sample 1
  CHECK(p.phi(0, 1) == 400.0); // x1^2 at sample 2
  CHECK(p.y[0] == 30.0);       // x1 at sample 3
  CHECK(p.y[2] == 50.0);
}

TEST_CASE("finite difference uses the actual time step") {
  TimeSeries ts;
  ts.times = {0.0, 0.25, 0.75};
  ts.states = Matrix(3, 1);
  ts.states(0, 0) = 1.0;
  ts.states(1, 0) = 2.0;
  ts.states(2, 0) = 4.0;
  const DictionarySpec spec = build_narx_spec(1, 0, 1, 0, 0, 0);
  const RegressionProblem p = evaluate(spec, ts, 0, OutputMode::finite_difference);
  CHECK(p.y[0] == doctest::Approx(4.0));  // (2-1)/0.25
  CHECK(p.y[1] == doctest::Approx(4.0));  // (4-2)/0.5
  CHECK(p.target_label == "x1:finite_difference");
}

TEST_CASE("hill feature at a negative state names the offender") {
  TimeSeries ts;
  ts.times = {0.0, 1.0, 2.0};
  ts.states = Matrix(3, 1);
  ts.states(0, 0) = 1.0;
  ts.states(1, 0) = -0.5;
  ts.states(2, 0) = 1.0;
  const DictionarySpec spec = build_hill_spec(1, 1);
  try {
    evaluate(spec, ts, 0, OutputMode::next_state);
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    CHECK(e.row == 1);
    CHECK(e.column == 1);
    CHECK(e.label == "1/(1+x1)");
  }
}

TEST_CASE("dimension and range checks") {
  const TimeSeries ts = ramp_series(4, 2);
  CHECK_THROWS_AS(evaluate(build_hill_spec(3, 1), ts, 0, OutputMode::next_state),
                  DictionaryError);
  CHECK_THROWS_AS(evaluate(build_hill_spec(2, 1), ts, 2, OutputMode::next_state),
                  DictionaryError);
  // series shorter than the lag window
  DictionarySpec lagged = build_narx_spec(2, 0, 1, 0, 4, 0);
  CHECK_THROWS_AS(evaluate(lagged, ramp_series(5, 2), 0, OutputMode::next_state),
                  DictionaryError);
  CHECK_THROWS_AS(build_kuramoto_spec(1, 0), DictionaryError);
  CHECK_THROWS_AS(build_kuramoto_spec(3, 3), DictionaryError);
}

TEST_CASE("evaluation is bit-for-bit deterministic") {
  const RepressilatorParams params;
  const TimeSeries ts = simulate_repressilator(params, Vector(6, 0.0));
  const DictionarySpec spec = build_hill_spec(6, 2);
  const RegressionProblem a = evaluate(spec, ts, 3, OutputMode::finite_difference);
  const RegressionProblem b = evaluate(spec, ts, 3, OutputMode::finite_difference);
  CHECK(a.phi == b.phi);
  CHECK(a.y == b.y);
}

TEST_CASE("json round trip") {
  for (const DictionarySpec& spec :
       {build_narx_spec(2, 1, 2, 1, 1, 1), build_hill_spec(3, 2), build_kuramoto_spec(4, 2)}) {
    const std::string text = dictionary_spec_to_json(spec);
    const DictionarySpec back = dictionary_spec_from_json(text);
    CHECK(back.labels() == spec.labels());
    CHECK(back.n_states == spec.n_states);
    CHECK(back.n_inputs == spec.n_inputs);
    CHECK(back.max_state_lag == spec.max_state_lag);
    // canonical output: serializing again gives the same bytes
    CHECK(dictionary_spec_to_json(back) == text);
  }
}

}  // TEST_SUITE
