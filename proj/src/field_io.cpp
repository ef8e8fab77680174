#include <charconv>
#include <fstream>
#include <sstream>

#include "phasecap/error.hpp"
#include "phasecap/field.hpp"

namespace phasecap {

std::string format_shortest(double value) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

namespace {

double parse_double(const std::string& token) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc() || result.ptr != last) {
    fail(ErrorCode::Format, "field file: bad number '" + token + "'");
  }
  return value;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

std::string format_field(const ScalarField& field) {
  const Grid& grid = field.grid();
  std::string out = "PHASEFIELD v1\n";
  out += std::to_string(grid.ndim()) + "\n";
  auto join = [&](auto&& get) {
    for (std::size_t axis = 0; axis < grid.ndim(); ++axis) {
      if (axis) out += ' ';
      out += get(axis);
    }
    out += '\n';
  };
  join([&](std::size_t a) { return std::to_string(grid.dim(a)); });
  join([&](std::size_t a) { return format_shortest(grid.h(a)); });
  join([&](std::size_t a) { return format_shortest(grid.lo(a)); });
  for (double v : field.values()) {
    out += format_shortest(v);
    out += '\n';
  }
  return out;
}

ScalarField parse_field(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  auto next_line = [&]() -> std::string {
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    fail(ErrorCode::Format, "field file: unexpected end of input");
  };

  if (next_line() != "PHASEFIELD v1") fail(ErrorCode::Format, "field file: missing PHASEFIELD v1 header");
  const auto ndim_tokens = split_tokens(next_line());
  if (ndim_tokens.size() != 1) fail(ErrorCode::Format, "field file: bad dimension line");
  const double ndim_value = parse_double(ndim_tokens[0]);
  if (ndim_value != 2.0 && ndim_value != 3.0) fail(ErrorCode::Format, "field file: dimension must be 2 or 3");
  const auto ndim = static_cast<std::size_t>(ndim_value);

  auto read_axis_line = [&]() {
    const auto tokens = split_tokens(next_line());
    if (tokens.size() != ndim) fail(ErrorCode::Format, "field file: axis line has wrong length");
    std::vector<double> values;
    for (const auto& t : tokens) values.push_back(parse_double(t));
    return values;
  };

  std::vector<std::size_t> dims;
  for (double d : read_axis_line()) {
    if (d < 2.0 || d != static_cast<double>(static_cast<std::size_t>(d))) {
      fail(ErrorCode::Format, "field file: dims must be integers >= 2");
    }
    dims.push_back(static_cast<std::size_t>(d));
  }
  auto spacing = read_axis_line();
  auto origin = read_axis_line();
  Grid grid(std::move(dims), std::move(spacing), std::move(origin));

  std::vector<double> values;
  values.reserve(grid.node_count());
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    for (const auto& tok : split_tokens(line)) values.push_back(parse_double(tok));
  }
  if (values.size() != grid.node_count()) {
    fail(ErrorCode::Format, "field file: expected " + std::to_string(grid.node_count()) +
                                " values, found " + std::to_string(values.size()));
  }
  return ScalarField(std::move(grid), std::move(values), "theta");
}

void write_field(const ScalarField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out << format_field(field);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read field file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_field(buf.str());
}

}  // namespace phasecap
