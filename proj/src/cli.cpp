#include "phasecap/cli.hpp"

#include <cmath>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "phasecap/critical.hpp"
#include "phasecap/error.hpp"
#include "phasecap/fiber.hpp"
#include "phasecap/field.hpp"
#include "phasecap/fullcap.hpp"
#include "phasecap/oracles.hpp"
#include "phasecap/reduced.hpp"
#include "phasecap/report_io.hpp"

namespace phasecap::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::string model = "planar";
  std::string input;
  std::string table;
  double p = 2.0;
  double a = 0.0;
  double b = 1.0;
  std::size_t levels = 512;
  std::string grid;
  std::string extent;
  double gamma = 2.0;
  std::string center;
  std::string out;
  double tol = 1e-10;
  std::size_t max_iter = 20000;
  std::string region;
  std::string emit_profile;
  std::string reparam;
  bool strict = false;
  double outer_width = 0.2;
  std::string plate_e;
  std::string plate_f;
  std::string minimizer_out;
  double t0 = 0.0;
  double delta = 0.25;
  std::size_t octaves = 8;
  double alpha = 0.0;
  double nu = 0.0;
  double section = 1.0;
  std::size_t dim = 2;
  double t = 0.25;

  // Whether the value came from a flag or the config file.
  bool has_a = false, has_b = false, has_grid = false, has_extent = false, has_center = false;
  bool has_outer_width = false, has_alpha = false, has_nu = false, has_dim = false;
};

std::vector<double> parse_doubles(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad number in ") + what + ": '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

// "lo..hi,lo..hi[,lo..hi]"
std::pair<std::vector<double>, std::vector<double>> parse_ranges(const std::string& text, const char* what) {
  std::vector<double> lo, hi;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) throw UsageError(std::string(what) + " entries must look like lo..hi");
    const auto l = parse_doubles(item.substr(0, dots), what);
    const auto h = parse_doubles(item.substr(dots + 2), what);
    lo.push_back(l[0]);
    hi.push_back(h[0]);
  }
  if (lo.size() < 2 || lo.size() > 3) throw UsageError(std::string(what) + " needs 2 or 3 axes");
  return {lo, hi};
}

std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  for (double d : parse_doubles(text, "--grid")) {
    if (!(d >= 2.0) || d != std::floor(d)) throw UsageError("--grid entries must be integers >= 2");
    dims.push_back(static_cast<std::size_t>(d));
  }
  if (dims.size() < 2 || dims.size() > 3) throw UsageError("--grid needs 2 or 3 axes");
  return dims;
}

PhaseModel phase_model(const RunConfig& c, std::size_t ndim) {
  if (c.model == "planar") return PhaseModel::planar(0);
  if (c.model == "monomial") return PhaseModel::monomial(c.gamma, 0);
  if (c.model == "radial") {
    auto center = c.has_center ? parse_doubles(c.center, "--center") : std::vector<double>(ndim, 0.0);
    if (center.size() != ndim) throw UsageError("--center length must match the grid");
    return PhaseModel::radial(center);
  }
  if (c.model == "file") {
    if (c.input.empty()) throw UsageError("--model file needs --input PATH");
    return PhaseModel::file(c.input);
  }
  throw UsageError("unknown model '" + c.model + "'");
}

void apply_model_defaults(RunConfig& c) {
  if (c.model == "radial") {
    if (!c.has_a) c.a = 1.0;
    if (!c.has_b) c.b = std::exp(1.0);
  } else if (c.model == "monomial") {
    if (!c.has_a) c.a = 0.05;
    if (!c.has_b) c.b = 0.5;
  }
}

ScalarField build_field(const RunConfig& c) {
  if (c.model == "file") {
    if (c.input.empty()) throw UsageError("--model file needs --input PATH");
    return read_field(c.input);
  }
  std::vector<std::size_t> dims;
  if (c.has_grid) {
    dims = parse_dims(c.grid);
  } else if (c.model == "radial") {
    dims = {129, 129};
  } else {
    dims = {129, 65};
  }
  const std::size_t n = dims.size();
  std::vector<double> lo, hi;
  if (c.has_extent) {
    std::tie(lo, hi) = parse_ranges(c.extent, "--extent");
    if (lo.size() != n) throw UsageError("--extent and --grid disagree on the number of axes");
  } else if (c.model == "radial") {
    lo.assign(n, -3.2);
    hi.assign(n, 3.2);
  } else {
    lo.assign(n, 0.0);
    hi.assign(n, 1.0);
    lo[0] = c.model == "planar" ? -0.25 : -1.0;
    hi[0] = c.model == "planar" ? 1.25 : 1.0;
  }
  const Grid grid = Grid::box(dims, lo, hi);
  return sample_phase(phase_model(c, n), grid);
}

std::optional<Region> build_region(const RunConfig& c) {
  if (c.region.empty()) return std::nullopt;
  auto [lo, hi] = parse_ranges(c.region, "--region");
  return Region(lo, hi);
}

WeightTable build_table(const RunConfig& c, const std::vector<double>& levels) {
  if (!c.table.empty()) return parse_weight_csv(read_text(c.table), c.p);
  return weight_table(build_field(c), c.p, levels, build_region(c));
}

std::vector<std::uint8_t> ball_mask(const Grid& grid, const std::string& spec, const char* what) {
  const auto v = parse_doubles(spec, what);
  if (v.size() != grid.ndim() + 1) throw UsageError(std::string(what) + " needs center coordinates then radius");
  std::vector<std::uint8_t> mask(grid.node_count(), 0);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const auto x = grid.position(i);
    double d2 = 0.0;
    for (std::size_t k = 0; k < grid.ndim(); ++k) d2 += (x[k] - v[k]) * (x[k] - v[k]);
    mask[i] = d2 <= v.back() * v.back();
  }
  return mask;
}

CompareOptions compare_options(const RunConfig& c, const ScalarField& theta) {
  CompareOptions co;
  co.mode = c.strict ? PlateMode::Strict : PlateMode::Truncated;
  co.level_count = c.levels;
  if (c.has_outer_width || c.model == "radial") co.outer_plate_width = c.outer_width;
  if (!c.plate_e.empty() || !c.plate_f.empty()) {
    if (c.plate_e.empty() || c.plate_f.empty()) throw UsageError("--plate-e and --plate-f go together");
    co.plates = ConstraintSet(ball_mask(theta.grid(), c.plate_e, "--plate-e"),
                              ball_mask(theta.grid(), c.plate_f, "--plate-f"));
  }
  return co;
}

MinimizeOptions minimize_options(const RunConfig& c) {
  MinimizeOptions o = MinimizeOptions::defaults(c.p);
  o.tol_rel = c.tol;
  o.max_iter = c.max_iter;
  return o;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
  } else {
    write_text(c.out, text);
  }
}

int cmd_weight(const RunConfig& c, std::ostream& out) {
  const WeightTable table = build_table(c, uniform_levels(c.a, c.b, c.levels));
  emit(c, format_weight_csv(table), out);
  return kExitOk;
}

int cmd_reduce(const RunConfig& c, std::ostream& out) {
  WeightTable table = build_table(c, uniform_levels(c.a, c.b, c.levels));
  LevelPair levels(c.a, c.b);
  if (!c.reparam.empty()) {
    if (c.reparam != "cubic") throw UsageError("--reparam supports only 'cubic'");
    std::vector<double> phi;
    for (double t : table.levels()) phi.push_back(t * t * t + t);
    table = reparametrize_table(table, phi);
    levels = LevelPair(c.a * c.a * c.a + c.a, c.b * c.b * c.b + c.b);
  }
  const ReducedReport report = reduced_capacity(table, levels);
  if (!c.emit_profile.empty()) {
    if (!report.profile) fail(ErrorCode::NoMinimizer, "capacity is 0; there is no optimal profile to emit");
    write_text(c.emit_profile, format_profile_csv(*report.profile));
  }
  emit(c, to_json(report).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_fullcap(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const ScalarField theta = build_field(c);
  const LevelPair levels(c.a, c.b);
  if (c.strict) {
    const auto adm = check_admissible_levels(theta, levels);
    if (!adm.admissible) {
      err << adm.summary() << "\n";
      return kExitAdmissibility;
    }
  }
  const CapacityReport report = compare_bound(theta, levels, c.p, minimize_options(c), compare_options(c, theta));
  if (!c.minimizer_out.empty()) write_field(report.minimizer, c.minimizer_out);
  emit(c, to_json(report, theta.grid()).dump(2) + "\n", out);
  if (!report.converged) {
    err << "warning: solver stopped after " << report.iterations << " iterations without converging\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_classify(const RunConfig& c, std::ostream& out) {
  if (c.has_alpha && !(c.alpha >= 0.0 && c.alpha < 1.0)) throw UsageError("--alpha must lie in [0,1)");
  RegimeReport report;
  std::optional<double> resistance;
  double alpha = c.alpha, nu = c.nu;
  const bool need_table = !c.table.empty() || !c.has_alpha;
  if (need_table) {
    const double t0 = c.t0;
    const WeightTable table = build_table(c, geometric_levels(t0, c.delta, c.octaves * 4 + 1, 4));
    const LocalProfileFit fit = fit_exponent(table, t0, c.delta);
    const LocalProfileFit size = fit_size_exponent(table, t0, c.delta);
    if (!c.has_nu) nu = std::max(0.0, size.slope);
    if (!c.has_alpha) alpha = std::max(0.0, (fit.slope - nu) / (c.p - 1.0));
    if (!(alpha < 1.0)) throw UsageError("fitted alpha " + format_shortest(alpha) + " lies outside [0,1)");
    resistance = local_resistance(table, t0, c.delta);
    report = classify(alpha, nu, c.p);
    report.t0 = t0;
  } else {
    report = classify(alpha, nu, c.p);
    report.t0 = c.t0;
  }
  report.delta = c.delta;
  report.local_resistance = resistance;
  emit(c, to_json(report).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_defect(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.p != 2.0) throw UsageError("defect is defined only for p = 2");
  const ScalarField theta = build_field(c);
  const LevelPair levels(c.a, c.b);
  const CompareOptions co = compare_options(c, theta);
  const CapacityReport report = compare_bound(theta, levels, 2.0, minimize_options(c), co);

  const WeightTable table = weight_table(theta, 2.0, uniform_levels(c.a, c.b, std::max<std::size_t>(c.levels, 2)));
  const Profile profile = optimal_profile(table, levels);
  std::vector<double> uf(theta.grid().node_count());
  for (std::size_t i = 0; i < uf.size(); ++i) uf[i] = profile(theta[i]);
  const ConstraintSet constraints =
      co.plates ? *co.plates : ConstraintSet::from_plates(plate_masks(theta, levels));
  ConstraintSet used = constraints;
  if (co.outer_plate_width) {
    for (std::size_t i = 0; i < uf.size(); ++i) {
      if (used.one[i] && theta[i] > levels.b + *co.outer_plate_width) used.one[i] = 0;
    }
  }
  const TangentialSplit split = tangential_decompose(report.minimizer, theta);
  const PolarizationGap pol = polarization_gap(ScalarField(theta.grid(), uf, "u_f"), report.minimizer, used);
  const double total = split.normal + split.tangential;

  nlohmann::json j = {{"p", 2.0},
                      {"capacity_full", json_number(report.capacity)},
                      {"capacity_reduced", json_number(report.reduced_capacity)},
                      {"gap", json_number(report.gap)},
                      {"fibered_energy_gap", json_number(pol.energy_difference)},
                      {"difference_energy", json_number(pol.difference_energy)},
                      {"polarization_residual", json_number(pol.residual)},
                      {"normal_energy", json_number(split.normal)},
                      {"tangential_energy", json_number(split.tangential)},
                      {"tangential_fraction", json_number(total > 0.0 ? split.tangential / total : 0.0)},
                      {"excluded_measure", json_number(split.excluded_measure)},
                      {"converged", report.converged}};
  emit(c, j.dump(2) + "\n", out);
  if (!report.converged) {
    err << "warning: solver did not converge\n";
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_model(const RunConfig& c, std::ostream& out) {
  nlohmann::json j;
  j["model"] = c.model;
  j["p"] = c.p;
  if (c.model == "planar") {
    const auto spec = oracles::ModelSpec::planar(c.section, c.a, c.b, c.p);
    j["section"] = c.section;
    j["a"] = c.a;
    j["b"] = c.b;
    j["capacity"] = json_number(oracles::planar_capacity(spec));
  } else if (c.model == "radial") {
    const std::size_t n = c.has_dim ? c.dim : 2;
    const auto spec = oracles::ModelSpec::radial(n, c.a, c.b, c.p);
    j["n"] = n;
    j["r_e"] = c.a;
    j["r_f"] = c.b;
    j["capacity"] = json_number(oracles::radial_capacity(spec));
  } else if (c.model == "monomial") {
    const auto spec = oracles::ModelSpec::monomial(c.gamma, c.section, c.p);
    j["gamma"] = c.gamma;
    j["section"] = c.section;
    j["t"] = c.t;
    j["weight"] = json_number(oracles::monomial_weight(spec, c.t));
    j["exponent"] = oracles::monomial_exponent(spec);
    j["alpha"] = oracles::monomial_alpha(spec);
  } else {
    throw UsageError("model subcommand covers planar, radial and monomial");
  }
  emit(c, j.dump(2) + "\n", out);
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Admissibility:
      return kExitAdmissibility;
    case ErrorCode::NonConvergence:
      return kExitNonConvergence;
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::Io:
    case ErrorCode::Format:
    case ErrorCode::OutOfSpan:
    case ErrorCode::NonMonotone:
    case ErrorCode::EmptyRegion:
    case ErrorCode::TooFewRows:
      return kExitUsage;
    default:
      return kExitFailure;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Phase-induced reduction of p-capacity: weights, reduced and full capacities", "phasecap"};
  app.set_config("--config", "", "Flat key = value file; flags take precedence");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--p", c.p, "Exponent p > 1");
  auto* opt_a = app.add_option("--a", c.a, "Lower level a");
  auto* opt_b = app.add_option("--b", c.b, "Upper level b");
  app.add_option("--levels", c.levels, "Number of levels");
  auto* opt_grid = app.add_option("--grid", c.grid, "Node counts NX,NY[,NZ]");
  auto* opt_extent = app.add_option("--extent", c.extent, "Box lo..hi,lo..hi[,lo..hi]");
  app.add_option("--model", c.model, "Phase model")
      ->check(CLI::IsMember({"planar", "radial", "monomial", "file"}));
  app.add_option("--input", c.input, "Field file for --model file");
  app.add_option("--table", c.table, "Weight table CSV used instead of a field");
  app.add_option("--gamma", c.gamma, "Monomial exponent");
  auto* opt_center = app.add_option("--center", c.center, "Radial center x,y[,z]");
  app.add_option("--out", c.out, "Output path (stdout if absent)");
  app.add_option("--tol", c.tol, "Relative energy-decrease stop")->check(CLI::PositiveNumber);
  app.add_option("--max-iter", c.max_iter, "Solver iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--region", c.region, "Restrict fibers to lo..hi,lo..hi[,lo..hi]");
  app.add_option("--emit-profile", c.emit_profile, "Write the optimal profile CSV here");
  app.add_option("--reparam", c.reparam, "Reparametrize levels (cubic: t^3 + t)");
  app.add_flag("--strict-admissible", c.strict, "Require plates strictly inside the box");
  auto* opt_outer = app.add_option("--outer-width", c.outer_width, "Keep theta in [b, b + width] in the outer plate");
  app.add_option("--plate-e", c.plate_e, "Ball plate held at 0: center coordinates, radius");
  app.add_option("--plate-f", c.plate_f, "Ball plate held at 1: center coordinates, radius");
  app.add_option("--minimizer-out", c.minimizer_out, "Write the minimizer field here");
  app.add_option("--t0", c.t0, "Critical level");
  app.add_option("--delta", c.delta, "One-sided window length")->check(CLI::PositiveNumber);
  app.add_option("--octaves", c.octaves, "Octaves of geometric levels in the window");
  auto* opt_alpha = app.add_option("--alpha", c.alpha, "Gradient degeneracy exponent");
  auto* opt_nu = app.add_option("--nu", c.nu, "Fiber size exponent");
  app.add_option("--section", c.section, "Cross-section measure |D|");
  auto* opt_dim = app.add_option("--dim", c.dim, "Ambient dimension n for the radial oracle");
  app.add_option("--t", c.t, "Level for the monomial weight");

  const std::pair<const char*, const char*> commands[] = {
      {"weight", "Tabulate t,S,A,w over uniform levels in [a,b]"},
      {"reduce", "Reduced capacity and optimal profile from a weight table"},
      {"fullcap", "Full capacity by energy minimization, compared with the reduced bound"},
      {"classify", "Local regime near t0 from fitted exponents or given alpha, nu"},
      {"defect", "Tangential energy and polarization gap of the minimizer (p = 2)"},
      {"model", "Closed-form capacity or weight for the planar, radial and monomial models"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }
  c.command = app.get_subcommands().front()->get_name();
  c.has_a = opt_a->count() > 0;
  c.has_b = opt_b->count() > 0;
  c.has_grid = opt_grid->count() > 0;
  c.has_extent = opt_extent->count() > 0;
  c.has_center = opt_center->count() > 0;
  c.has_outer_width = opt_outer->count() > 0;
  c.has_alpha = opt_alpha->count() > 0;
  c.has_nu = opt_nu->count() > 0;
  c.has_dim = opt_dim->count() > 0;
  apply_model_defaults(c);

  try {
    if (!(c.p > 1.0)) throw UsageError("--p must exceed 1");
    if (c.command == "weight") return cmd_weight(c, out);
    if (c.command == "reduce") return cmd_reduce(c, out);
    if (c.command == "fullcap") return cmd_fullcap(c, out, err);
    if (c.command == "classify") return cmd_classify(c, out);
    if (c.command == "defect") return cmd_defect(c, out, err);
    return cmd_model(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
}

}  // namespace phasecap::cli
