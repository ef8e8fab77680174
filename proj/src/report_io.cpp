#include "phasecap/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "phasecap/error.hpp"

namespace phasecap {

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return format_shortest(x);
}

double parse_num(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorCode::Format, "cannot parse number '" + std::string(s) + "'");
  }
  return x;
}

std::vector<std::vector<double>> parse_csv(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Format, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) fail(ErrorCode::Format, "expected CSV header '" + header + "'");
  const std::size_t cols = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(parse_num(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (row.size() != cols) fail(ErrorCode::Format, "CSV row has wrong column count: " + line);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_weight_csv(const WeightTable& table) {
  std::string out = "t,S,A,w\n";
  for (const auto& r : table.rows()) {
    out += num(r.t) + ',' + num(r.S) + ',' + num(r.A) + ',' + num(r.w) + '\n';
  }
  return out;
}

WeightTable parse_weight_csv(const std::string& text, double p) {
  std::vector<WeightRow> rows;
  for (const auto& r : parse_csv(text, "t,S,A,w")) rows.push_back({r[0], r[1], r[2], r[3]});
  return WeightTable(p, std::move(rows));
}

std::string format_profile_csv(const Profile& profile) {
  std::string out = "t,v\n";
  for (std::size_t i = 0; i < profile.knots().size(); ++i) {
    out += num(profile.knots()[i]) + ',' + num(profile.values()[i]) + '\n';
  }
  return out;
}

Profile parse_profile_csv(const std::string& text) {
  std::vector<double> t, v;
  for (const auto& r : parse_csv(text, "t,v")) {
    t.push_back(r[0]);
    v.push_back(r[1]);
  }
  return Profile(std::move(t), std::move(v));
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return num(x);
}

double json_to_double(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_num(s);
  }
  fail(ErrorCode::Format, "expected a number in JSON");
}

nlohmann::json to_json(const ReducedReport& r) {
  return {{"p", r.p},
          {"a", r.a},
          {"b", r.b},
          {"resistance", json_number(r.resistance)},
          {"capacity", json_number(r.capacity)},
          {"branch", r.branch == CapacityBranch::Finite ? "finite" : "divergent"},
          {"levels", r.levels}};
}

nlohmann::json to_json(const CapacityReport& r, const Grid& grid) {
  return {{"p", r.p},
          {"capacity_full", json_number(r.capacity)},
          {"capacity_reduced", json_number(r.reduced_capacity)},
          {"gap", json_number(r.gap)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"final_rel_decrease", json_number(r.final_rel_decrease)},
          {"tol", json_number(r.tol_compare)},
          {"bound_ok", r.bound_ok},
          {"fibered_competitor_energy", json_number(r.fibered_competitor_energy)},
          {"free_nodes", r.free_nodes},
          {"grid", {{"dims", grid.dims()}, {"lo", grid.origin()}, {"spacing", grid.spacing()}}}};
}

nlohmann::json to_json(const RegimeReport& r) {
  nlohmann::json j = {{"t0", r.t0},
                      {"delta", r.delta},
                      {"alpha", r.alpha},
                      {"nu", r.nu},
                      {"p", r.p},
                      {"criterion", json_number(r.criterion)},
                      {"verdict", to_string(r.verdict)}};
  j["local_resistance"] = r.local_resistance ? json_number(*r.local_resistance) : nlohmann::json(nullptr);
  return j;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace phasecap
