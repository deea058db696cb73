#include <limits>
#include <string>

#include <doctest.h>

#include "sparsedyn/timeseries.hpp"

using namespace sparsedyn;

namespace {

TimeSeries small_series() {
  TimeSeries ts;
  ts.times = {0.0, 0.5, 1.25};
  ts.states = Matrix(3, 2);
  ts.states(0, 0) = 1.0;
  ts.states(0, 1) = -2.0;
  ts.states(1, 0) = 0.125;
  ts.states(1, 1) = 3.5;
  ts.states(2, 0) = 1e-7;
  ts.states(2, 1) = 123456.789;
  ts.inputs = Matrix(3, 1);
  ts.inputs(0, 0) = 0.1;
  ts.inputs(1, 0) = 0.2;
  ts.inputs(2, 0) = 0.3;
  return ts;
}

}  // namespace

TEST_SUITE("timeseries") {

TEST_CASE("csv round trip preserves every value exactly") {
  const TimeSeries ts = small_series();
  const std::string csv = timeseries_to_csv(ts);
  const TimeSeries back = parse_timeseries_csv(csv);
  REQUIRE(back.samples() == 3);
  REQUIRE(back.n_states() == 2);
  REQUIRE(back.n_inputs() == 1);
  CHECK(back.times == ts.times);
  CHECK(back.states == ts.states);
  CHECK(back.inputs == ts.inputs);
  // serialization is canonical, so a second round trip is byte-identical
  CHECK(timeseries_to_csv(back) == csv);
}

TEST_CASE("header without inputs") {
  const TimeSeries ts = parse_timeseries_csv("t,x1\n0,1\n1,2\n");
  CHECK(ts.n_states() == 1);
  CHECK(ts.n_inputs() == 0);
  CHECK(ts.states(1, 0) == 2.0);
}

TEST_CASE("parse errors carry the line number") {
  CHECK_THROWS_WITH_AS(parse_timeseries_csv(""), "empty CSV", TimeseriesError);
  CHECK_THROWS_WITH_AS(parse_timeseries_csv("time,x1\n0,1\n"),
                       "line 1: header must start with 't'", TimeseriesError);
  CHECK_THROWS_WITH_AS(parse_timeseries_csv("t,y1\n0,1\n"),
                       "line 1: expected state columns x1,x2,...", TimeseriesError);
  CHECK_THROWS_WITH_AS(parse_timeseries_csv("t,x1,q\n0,1,2\n"),
                       "line 1: unexpected column 'q'", TimeseriesError);
  CHECK_THROWS_WITH_AS(parse_timeseries_csv("t,x1\n0,1\n1\n"),
                       "line 3: expected 2 fields, got 1", TimeseriesError);
  CHECK_THROWS_WITH_AS(parse_timeseries_csv("t,x1\n0,1\n1,abc\n"), "line 3: bad number 'abc'",
                       TimeseriesError);
  // trailing garbage after a valid prefix is not a number
  CHECK_THROWS_AS(parse_timeseries_csv("t,x1\n0,1\n1,2.5x\n"), TimeseriesError);
}

TEST_CASE("validate rejects broken series") {
  TimeSeries ts = small_series();
  ts.times[2] = 0.5;  // not strictly increasing
  CHECK_THROWS_AS(ts.validate(), TimeseriesError);

  ts = small_series();
  ts.states(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ts.validate(), TimeseriesError);

  ts = small_series();
  ts.times = {0.0};
  ts.states = Matrix(1, 2);
  CHECK_THROWS_AS(ts.validate(), TimeseriesError);

  CHECK_NOTHROW(small_series().validate());
}

TEST_CASE("blank lines and CRLF are tolerated") {
  const TimeSeries ts = parse_timeseries_csv("t,x1\r\n0,1\r\n\r\n1,2\r\n");
  CHECK(ts.samples() == 2);
  CHECK(ts.states(1, 0) == 2.0);
}

}  // TEST_SUITE
