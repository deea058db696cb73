#include "sparsedyn/timeseries.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include "sparsedyn/serialize.hpp"

namespace sparsedyn {

void TimeSeries::validate() const {
  if (times.size() < 2) throw TimeseriesError("time series needs at least 2 samples");
  if (states.rows() != times.size()) {
    throw TimeseriesError("state row count does not match time grid");
  }
  if (states.cols() == 0) throw TimeseriesError("time series has no state columns");
  if (!inputs.empty() && inputs.rows() != times.size()) {
    throw TimeseriesError("input row count does not match time grid");
  }
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i + 1] > times[i])) {
      throw TimeseriesError("time grid must be strictly increasing (sample " +
                            std::to_string(i + 1) + ")");
    }
  }
  auto check_finite = [](const Matrix& m, const char* what) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (!std::isfinite(m(i, j))) {
          throw TimeseriesError(std::string("non-finite ") + what + " value at sample " +
                                std::to_string(i));
        }
      }
    }
  };
  check_finite(states, "state");
  if (!inputs.empty()) check_finite(inputs, "input");
  for (double t : times) {
    if (!std::isfinite(t)) throw TimeseriesError("non-finite time value");
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    throw TimeseriesError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

TimeSeries parse_timeseries_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TimeseriesError("empty CSV");

  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "t") {
    throw TimeseriesError("line 1: header must start with 't'");
  }
  std::size_t n_states = 0;
  std::size_t col = 1;
  while (col < header.size() && header[col] == "x" + std::to_string(n_states + 1)) {
    ++n_states;
    ++col;
  }
  if (n_states == 0) throw TimeseriesError("line 1: expected state columns x1,x2,...");
  std::size_t n_inputs = 0;
  while (col < header.size() && header[col] == "u" + std::to_string(n_inputs + 1)) {
    ++n_inputs;
    ++col;
  }
  if (col != header.size()) {
    throw TimeseriesError("line 1: unexpected column '" + header[col] + "'");
  }

  std::vector<Vector> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw TimeseriesError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    Vector row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) row[j] = parse_number(fields[j], line_no);
    rows.push_back(std::move(row));
  }

  TimeSeries ts;
  ts.times.resize(rows.size());
  ts.states = Matrix(rows.size(), n_states);
  if (n_inputs > 0) ts.inputs = Matrix(rows.size(), n_inputs);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ts.times[i] = rows[i][0];
    for (std::size_t j = 0; j < n_states; ++j) ts.states(i, j) = rows[i][1 + j];
    for (std::size_t j = 0; j < n_inputs; ++j) ts.inputs(i, j) = rows[i][1 + n_states + j];
  }
  ts.validate();
  return ts;
}

std::string timeseries_to_csv(const TimeSeries& ts) {
  std::ostringstream out;
  out << "t";
  for (std::size_t j = 0; j < ts.n_states(); ++j) out << ",x" << (j + 1);
  for (std::size_t j = 0; j < ts.n_inputs(); ++j) out << ",u" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i < ts.samples(); ++i) {
    out << format_double(ts.times[i]);
    for (std::size_t j = 0; j < ts.n_states(); ++j) out << "," << format_double(ts.states(i, j));
    for (std::size_t j = 0; j < ts.n_inputs(); ++j) out << "," << format_double(ts.inputs(i, j));
    out << "\n";
  }
  return out.str();
}

TimeSeries read_timeseries_csv(const std::string& path) {
  return parse_timeseries_csv(read_file(path));
}

void write_timeseries_csv(const TimeSeries& ts, const std::string& path) {
  write_file_atomic(path, timeseries_to_csv(ts));
}

}  // namespace sparsedyn
