#include "phasecap/fullcap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phasecap/error.hpp"
#include "phasecap/fiber.hpp"
#include "phasecap/oracles.hpp"

namespace phasecap {

namespace {

constexpr double kArmijo = 1e-4;
constexpr std::size_t kMaxHalvings = 60;
constexpr std::size_t kQuietIterations = 3;

double dot(const std::vector<double>& x, const std::vector<double>& y,
           const std::vector<std::size_t>& idx) {
  double s = 0.0;
  for (std::size_t i : idx) s += x[i] * y[i];
  return s;
}

std::vector<double> clamped(std::vector<double> u) {
  for (double& x : u) x = std::clamp(x, 0.0, 1.0);
  return u;
}

}  // namespace

ConstraintSet::ConstraintSet(std::vector<std::uint8_t> zero_mask, std::vector<std::uint8_t> one_mask)
    : zero(std::move(zero_mask)), one(std::move(one_mask)) {
  if (zero.size() != one.size()) fail(ErrorCode::DimensionMismatch, "constraint masks differ in size");
  for (std::size_t i = 0; i < zero.size(); ++i) {
    if (zero[i] && one[i]) fail(ErrorCode::InvalidArgument, "constraint masks overlap");
  }
  if (zero_count() == 0 || one_count() == 0) {
    fail(ErrorCode::Admissibility, "both constraint masks must be nonempty");
  }
}

ConstraintSet ConstraintSet::from_plates(const PlateMasks& masks) {
  return ConstraintSet(masks.e, masks.f);
}

std::size_t ConstraintSet::zero_count() const {
  return static_cast<std::size_t>(std::count_if(zero.begin(), zero.end(), [](auto m) { return m != 0; }));
}

std::size_t ConstraintSet::one_count() const {
  return static_cast<std::size_t>(std::count_if(one.begin(), one.end(), [](auto m) { return m != 0; }));
}

MinimizeOptions MinimizeOptions::defaults(double p) {
  MinimizeOptions o;
  o.p = p;
  o.eps_reg = p < 2.0 ? 1e-8 : 0.0;
  return o;
}

CapacityReport p_capacity(const Grid& grid, const ConstraintSet& constraints,
                          const MinimizeOptions& opts,
                          const std::optional<std::vector<double>>& initial) {
  if (!(opts.p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  if (!(opts.tol_rel > 0.0)) fail(ErrorCode::InvalidArgument, "tol_rel must be positive");
  if (!(opts.eps_reg >= 0.0)) fail(ErrorCode::InvalidArgument, "eps_reg must be nonnegative");
  if (opts.max_iter == 0) fail(ErrorCode::InvalidArgument, "max_iter must be positive");
  const std::size_t n = grid.node_count();
  if (constraints.zero.size() != n || constraints.one.size() != n) {
    fail(ErrorCode::DimensionMismatch, "constraint masks do not match the grid");
  }
  if (constraints.zero_count() == 0 || constraints.one_count() == 0) {
    fail(ErrorCode::Admissibility, "both constraint masks must be nonempty");
  }
  if (initial && initial->size() != n) fail(ErrorCode::DimensionMismatch, "initial guess size differs from grid");

  const DirichletEnergy energy(grid, opts.p, opts.eps_reg);
  const DirichletEnergy plain(grid, opts.p, 0.0);

  std::vector<double> u = initial ? *initial : std::vector<double>(n, 0.5);
  std::vector<std::size_t> free_idx;
  for (std::size_t i = 0; i < n; ++i) {
    if (constraints.zero[i]) {
      u[i] = 0.0;
    } else if (constraints.one[i]) {
      u[i] = 1.0;
    } else {
      free_idx.push_back(i);
    }
  }

  CapacityReport report;
  report.p = opts.p;
  report.free_nodes = free_idx.size();

  std::vector<double> g(n, 0.0), g_old(n, 0.0), d(n, 0.0), trial(n, 0.0), g_trial(n, 0.0);
  auto mask_fixed = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < n; ++i) {
      if (constraints.zero[i] || constraints.one[i]) v[i] = 0.0;
    }
  };
  auto step_to = [&](double alpha) {
    trial = u;
    for (std::size_t i : free_idx) trial[i] = u[i] + alpha * d[i];
    return energy.value(trial);
  };

  double E = energy.value_and_gradient(u, g);
  mask_fixed(g);
  report.energy_history.push_back(E);

  if (free_idx.empty()) {
    report.converged = true;
  } else {
    const std::size_t restart = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(free_idx.size())))));
    for (std::size_t i : free_idx) d[i] = -g[i];
    double alpha_prev = 0.0;
    std::size_t since_restart = 0, quiet = 0;

    for (std::size_t it = 0; it < opts.max_iter; ++it) {
      const double gg = dot(g, g, free_idx);
      if (gg == 0.0) {
        report.converged = true;
        break;
      }
      double slope = dot(g, d, free_idx);
      if (!(slope < 0.0)) {
        for (std::size_t i : free_idx) d[i] = -g[i];
        slope = -gg;
        since_restart = 0;
      }

      // Quadratic-interpolation trial step, then Armijo halving.
      double alpha0 = alpha_prev > 0.0 ? 2.0 * alpha_prev : 1.0 / std::sqrt(gg);
      const double e0 = step_to(alpha0);
      double alpha = alpha0;
      const double curv = e0 - E - slope * alpha0;
      if (curv > 0.0) {
        const double q = -slope * alpha0 * alpha0 / (2.0 * curv);
        if (std::isfinite(q) && q > 0.0) alpha = q;
      }
      double E_new = alpha == alpha0 ? e0 : step_to(alpha);
      std::size_t halvings = 0;
      while (!(E_new <= E + kArmijo * alpha * slope) && halvings < kMaxHalvings) {
        alpha *= 0.5;
        E_new = step_to(alpha);
        ++halvings;
      }
      if (!(E_new <= E + kArmijo * alpha * slope)) {
        if (since_restart == 0) {
          // Steepest descent made no progress: machine-precision stationarity.
          report.converged = true;
          break;
        }
        for (std::size_t i : free_idx) d[i] = -g[i];
        since_restart = 0;
        continue;
      }

      u.swap(trial);
      g_old.swap(g);
      E_new = energy.value_and_gradient(u, g);
      mask_fixed(g);
      const double rel = (E - E_new) / std::max(std::abs(E), std::numeric_limits<double>::min());
      E = E_new;
      alpha_prev = alpha;
      report.iterations = it + 1;
      report.final_rel_decrease = rel;
      report.energy_history.push_back(E);

      if (opts.check_truncation) {
        const double Ec = energy.value(clamped(u));
        if (Ec > E * (1.0 + 1e-12) + 1e-300) ++report.truncation_violations;
      }

      quiet = rel < opts.tol_rel ? quiet + 1 : 0;
      if (quiet >= kQuietIterations) {
        report.converged = true;
        break;
      }

      ++since_restart;
      double beta = 0.0;
      if (since_restart < restart) {
        double num = 0.0, den = 0.0;
        for (std::size_t i : free_idx) {
          num += g[i] * (g[i] - g_old[i]);
          den += g_old[i] * g_old[i];
        }
        beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
      } else {
        since_restart = 0;
      }
      for (std::size_t i : free_idx) d[i] = -g[i] + beta * d[i];
    }
  }

  u = clamped(std::move(u));
  report.capacity = plain.value(u);
  report.minimizer = ScalarField(grid, std::move(u), "u");
  return report;
}

FiberedEnergy fibered_energy(const ScalarField& theta, const Profile& profile, double p,
                             std::size_t level_count) {
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  const Grid& grid = theta.grid();
  std::vector<double> u(grid.node_count());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = profile(theta[i]);

  std::vector<double> levels = profile.knots();
  if (level_count >= 2) {
    const auto extra = uniform_levels(profile.a(), profile.b(), level_count);
    levels.insert(levels.end(), extra.begin(), extra.end());
  }
  std::sort(levels.begin(), levels.end());
  const double tol = 1e-12 * std::max(1.0, profile.b() - profile.a());
  std::vector<double> unique;
  for (double t : levels) {
    if (unique.empty() || t - unique.back() > tol) unique.push_back(t);
  }

  FiberedEnergy r;
  r.grid_energy = DirichletEnergy(grid, p, 0.0).value(u);
  r.reduced_energy = reduced_energy(profile, weight_table(theta, p, unique));
  const double scale = std::max(std::abs(r.grid_energy), std::abs(r.reduced_energy));
  r.residual = scale > 0.0 ? std::abs(r.grid_energy - r.reduced_energy) / scale : 0.0;
  return r;
}

CapacityReport compare_bound(const ScalarField& theta, const LevelPair& levels, double p,
                             const MinimizeOptions& opts, const CompareOptions& copts) {
  const Grid& grid = theta.grid();
  const std::size_t n = grid.node_count();

  if (copts.mode == PlateMode::Strict) {
    const auto adm = check_admissible_levels(theta, levels);
    if (!adm.admissible) fail(ErrorCode::Admissibility, adm.summary());
  }

  std::vector<std::uint8_t> zero, one;
  if (copts.plates) {
    zero = copts.plates->zero;
    one = copts.plates->one;
    if (zero.size() != n || one.size() != n) fail(ErrorCode::DimensionMismatch, "plate masks do not match the grid");
    for (std::size_t i = 0; i < n; ++i) {
      if ((zero[i] && theta[i] > levels.a) || (one[i] && theta[i] < levels.b)) {
        fail(ErrorCode::Admissibility, "supplied plates must lie inside {theta <= a} and {theta >= b}");
      }
    }
  } else {
    const PlateMasks masks = plate_masks(theta, levels);
    zero = masks.e;
    one = masks.f;
  }
  if (copts.outer_plate_width) {
    const double top = levels.b + *copts.outer_plate_width;
    for (std::size_t i = 0; i < n; ++i) {
      if (one[i] && theta[i] > top) one[i] = 0;
    }
  }
  const bool empty_zero = std::none_of(zero.begin(), zero.end(), [](auto m) { return m != 0; });
  const bool empty_one = std::none_of(one.begin(), one.end(), [](auto m) { return m != 0; });
  if (empty_zero || empty_one) fail(ErrorCode::Admissibility, "a plate contains no grid nodes");
  const ConstraintSet constraints(std::move(zero), std::move(one));

  std::vector<double> init(n);
  for (std::size_t i = 0; i < n; ++i) {
    init[i] = std::clamp((theta[i] - levels.a) / (levels.b - levels.a), 0.0, 1.0);
  }

  MinimizeOptions o = opts;
  o.p = p;
  CapacityReport report = p_capacity(grid, constraints, o, init);

  const std::size_t count = std::max<std::size_t>(copts.level_count, 2);
  const WeightTable table = weight_table(theta, p, uniform_levels(levels.a, levels.b, count));
  const ReducedReport reduced = reduced_capacity(table, levels);
  report.reduced_capacity = reduced.capacity;
  report.gap = reduced.capacity - report.capacity;
  report.tol_compare = reduced.capacity * (1e-6 + 2.0 * o.tol_rel);
  if (reduced.profile) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (*reduced.profile)(theta[i]);
    report.fibered_competitor_energy = DirichletEnergy(grid, p, 0.0).value(v);
  }
  report.bound_ok = report.capacity <= report.reduced_capacity + report.tol_compare;
  if (!report.bound_ok) {
    std::ostringstream msg;
    msg << "full capacity " << format_shortest(report.capacity) << " exceeds reduced capacity "
        << format_shortest(report.reduced_capacity) << " + " << format_shortest(report.tol_compare);
    fail(ErrorCode::ComparisonViolation, msg.str());
  }
  return report;
}

AxisAverage transverse_average(const ScalarField& u, std::size_t axis) {
  const Grid& grid = u.grid();
  if (axis >= grid.ndim()) fail(ErrorCode::InvalidArgument, "axis out of range");
  const std::size_t m = grid.dim(axis);
  AxisAverage out;
  out.coords.resize(m);
  out.values.assign(m, 0.0);
  std::vector<double> weight(m, 0.0);
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto ijk = grid.multi_index(node);
    double w = 1.0;
    for (std::size_t k = 0; k < grid.ndim(); ++k) {
      if (k == axis) continue;
      if (ijk[k] == 0 || ijk[k] + 1 == grid.dim(k)) w *= 0.5;
    }
    out.values[ijk[axis]] += w * u[node];
    weight[ijk[axis]] += w;
  }
  for (std::size_t i = 0; i < m; ++i) {
    out.values[i] /= weight[i];
    out.coords[i] = grid.lo(axis) + grid.h(axis) * static_cast<double>(i);
  }
  return out;
}

std::vector<double> spherical_average(const ScalarField& u, const std::vector<double>& center,
                                      const std::vector<double>& radii) {
  const Grid& grid = u.grid();
  if (center.size() != grid.ndim()) fail(ErrorCode::DimensionMismatch, "center dimension differs from grid");
  for (double r : radii) {
    bool inside = r > 0.0;
    for (std::size_t k = 0; k < grid.ndim(); ++k) {
      inside = inside && center[k] - r > grid.lo(k) && center[k] + r < grid.hi(k);
    }
    if (!inside) fail(ErrorCode::OutOfSpan, "radius " + format_shortest(r) + " leaves the grid box");
  }
  const FiberExtractor extractor(sample_phase(PhaseModel::radial(center), grid));
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    const FiberMesh mesh = extractor.extract(r);
    double num = 0.0, den = 0.0;
    for (const auto& e : mesh.elements) {
      num += e.measure * u.interpolate(e.centroid);
      den += e.measure;
    }
    out.push_back(den > 0.0 ? num / den : 0.0);
  }
  return out;
}

double radial_profile_energy(const std::vector<double>& radii, const std::vector<double>& values,
                             double p, std::size_t n) {
  if (radii.size() != values.size() || radii.size() < 2) {
    fail(ErrorCode::DimensionMismatch, "profile needs matching radii and values, at least two");
  }
  const double omega = oracles::sphere_measure(n);
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    const double dr = radii[i + 1] - radii[i];
    if (!(dr > 0.0)) fail(ErrorCode::NonMonotone, "radii must be strictly increasing");
    const double rm = 0.5 * (radii[i] + radii[i + 1]);
    e += std::pow(std::abs((values[i + 1] - values[i]) / dr), p) * omega *
         std::pow(rm, static_cast<double>(n) - 1.0) * dr;
  }
  return e;
}

double axial_profile_energy(const std::vector<double>& coords, const std::vector<double>& values,
                            double p, double section) {
  if (coords.size() != values.size() || coords.size() < 2) {
    fail(ErrorCode::DimensionMismatch, "profile needs matching coords and values, at least two");
  }
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < coords.size(); ++i) {
    const double dx = coords[i + 1] - coords[i];
    if (!(dx > 0.0)) fail(ErrorCode::NonMonotone, "coords must be strictly increasing");
    e += std::pow(std::abs((values[i + 1] - values[i]) / dx), p) * section * dx;
  }
  return e;
}

TangentialSplit tangential_decompose(const ScalarField& u_star, const ScalarField& theta,
                                     double floor_grad) {
  if (!(u_star.grid() == theta.grid())) fail(ErrorCode::DimensionMismatch, "fields live on different grids");
  const Grid& grid = theta.grid();
  const DirichletEnergy op(grid, 2.0);
  const std::size_t cells = grid.cell_count();
  std::vector<std::array<double, 3>> gt(cells);
  double gmax = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    gt[c] = op.cell_gradient(theta.values(), c);
    gmax = std::max(gmax, std::hypot(gt[c][0], gt[c][1], gt[c][2]));
  }
  const double floor = floor_grad > 0.0 ? floor_grad : 1e-12 * gmax;
  const double vol = grid.cell_volume();
  TangentialSplit r;
  for (std::size_t c = 0; c < cells; ++c) {
    const double norm = std::hypot(gt[c][0], gt[c][1], gt[c][2]);
    if (!(norm > floor)) {
      r.excluded_measure += vol;
      continue;
    }
    const auto gu = op.cell_gradient(u_star.values(), c);
    const double along = (gu[0] * gt[c][0] + gu[1] * gt[c][1] + gu[2] * gt[c][2]) / norm;
    const double total = gu[0] * gu[0] + gu[1] * gu[1] + gu[2] * gu[2];
    r.normal += along * along * vol;
    r.tangential += std::max(0.0, total - along * along) * vol;
  }
  return r;
}

PolarizationGap polarization_gap(const ScalarField& u_f, const ScalarField& u_star,
                                 const ConstraintSet& constraints) {
  if (!(u_f.grid() == u_star.grid())) fail(ErrorCode::DimensionMismatch, "fields live on different grids");
  const Grid& grid = u_f.grid();
  const std::size_t n = grid.node_count();
  if (constraints.zero.size() != n || constraints.one.size() != n) {
    fail(ErrorCode::DimensionMismatch, "constraint masks do not match the grid");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (const ScalarField* f : {&u_f, &u_star}) {
      const double x = (*f)[i];
      if ((constraints.zero[i] && std::abs(x) > 1e-12) || (constraints.one[i] && std::abs(x - 1.0) > 1e-12)) {
        fail(ErrorCode::Admissibility, "field " + f->name() + " violates the plate constraints");
      }
    }
  }
  const DirichletEnergy energy(grid, 2.0);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = u_f[i] - u_star[i];
  const double ef = energy.value(u_f.values());
  PolarizationGap r;
  r.energy_difference = ef - energy.value(u_star.values());
  r.difference_energy = energy.value(diff);
  const double scale = std::max({std::abs(r.energy_difference), r.difference_energy, 1e-14 * ef});
  r.residual = scale > 0.0 ? std::abs(r.energy_difference - r.difference_energy) / scale : 0.0;
  return r;
}

}  // namespace phasecap
