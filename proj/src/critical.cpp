#include "phasecap/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phasecap/error.hpp"
#include "phasecap/reduced.hpp"

namespace phasecap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Select>
LocalProfileFit fit_window(const WeightTable& table, double t0, double delta, Select select) {
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "fit window needs delta > 0");
  std::vector<double> xs, ys;
  for (const auto& r : table.rows()) {
    const double offset = r.t - t0;
    if (!(offset > 0.0) || r.t > t0 + delta) continue;
    const double y = select(r);
    if (!(y > kFloorA)) continue;
    xs.push_back(std::log(offset));
    ys.push_back(std::log(y));
  }
  if (xs.size() < kMinFitRows) {
    fail(ErrorCode::TooFewRows, "power-law fit needs at least " + std::to_string(kMinFitRows) +
                                    " usable rows, found " + std::to_string(xs.size()));
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::InvalidArgument, "fit window has no spread in log(t - t0)");
  LocalProfileFit fit;
  fit.t0 = t0;
  fit.delta = delta;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  fit.rows = xs.size();
  return fit;
}

}  // namespace

std::string to_string(Regime regime) {
  return regime == Regime::Transmissive ? "Transmissive" : "Supercritical";
}

LocalProfileFit fit_exponent(const WeightTable& table, double t0, double delta) {
  return fit_window(table, t0, delta, [](const WeightRow& r) { return r.A; });
}

LocalProfileFit fit_size_exponent(const WeightTable& table, double t0, double delta) {
  return fit_window(table, t0, delta, [](const WeightRow& r) { return r.S; });
}

RegimeReport classify(double alpha, double nu, double p) {
  if (!(alpha >= 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in [0,1)");
  if (!(nu >= 0.0)) fail(ErrorCode::InvalidArgument, "nu must be nonnegative");
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  RegimeReport r;
  r.alpha = alpha;
  r.nu = nu;
  r.p = p;
  r.criterion = alpha + nu / (p - 1.0);
  r.verdict = r.criterion < 1.0 ? Regime::Transmissive : Regime::Supercritical;
  return r;
}

double local_resistance(const WeightTable& table, double t0, double delta) {
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "local window needs delta > 0");
  const double p = table.p();
  const double end = t0 + delta;
  const double tol = 1e-12 * std::max(1.0, table.t_max() - table.t_min());
  if (end > table.t_max() + tol || end <= table.t_min() || t0 < table.t_min() - delta) {
    fail(ErrorCode::OutOfSpan, "local window lies outside the weight table span");
  }

  // Rows strictly inside the window with vanishing weight force divergence.
  std::optional<std::size_t> first_inside;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table[i];
    if (r.t > t0 + tol && r.t <= end + tol) {
      if (!first_inside) first_inside = i;
      if (r.A <= kFloorA) return kInf;
    }
  }
  if (!first_inside) fail(ErrorCode::OutOfSpan, "local window contains no table rows");

  const auto knot = table.find_knot(t0);
  const bool regular_start = (knot && table[*knot].A > kFloorA) || (!knot && t0 > table.t_min());
  if (regular_start) return resistance(table, LevelPair(t0, end));

  // Singular endpoint: power-law tail on (t0, t1], trapezoid on [t1, end].
  const double t1 = table[*first_inside].t;
  const auto fit = fit_exponent(table, t0, delta);
  const double kappa = fit.slope / (p - 1.0);
  if (kappa >= 1.0 - kCriterionSlack) return kInf;
  const double c = std::exp(fit.intercept);
  const double tail = std::pow(c, -1.0 / (p - 1.0)) * std::pow(t1 - t0, 1.0 - kappa) / (1.0 - kappa);
  if (t1 >= end - tol) return tail;
  return tail + resistance(table, LevelPair(t1, end));
}

LojasiewiczResult lojasiewicz_check(const ScalarField& field, const Region& region, double t0,
                                    double alpha, double c0) {
  if (!(alpha >= 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in [0,1)");
  if (!(c0 > 0.0)) fail(ErrorCode::InvalidArgument, "c0 must be positive");
  const Grid& grid = field.grid();
  if (region.lo.size() != grid.ndim()) fail(ErrorCode::DimensionMismatch, "region dimension differs from grid");
  const VectorField grad = gradient(field);
  const double tol = 1e-12 * std::max(grad.max_norm(), 1.0);

  LojasiewiczResult r;
  r.worst_margin = kInf;
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.position(node);
    if (!region.contains(x, grid.ndim())) continue;
    ++r.nodes_checked;
    const double margin = grad.norm_at(node) - c0 * std::pow(std::abs(field[node] - t0), alpha);
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.witness = node;
      r.witness_position = x;
    }
  }
  if (r.nodes_checked == 0) fail(ErrorCode::EmptyRegion, "no grid nodes inside the region");
  r.holds = r.worst_margin >= -tol;
  return r;
}

std::vector<double> supercritical_vanishing(const WeightTable& table, double t0,
                                            const std::vector<double>& deltas) {
  std::vector<double> caps;
  caps.reserve(deltas.size());
  for (double d : deltas) {
    caps.push_back(capacity_from_resistance(local_resistance(table, t0, d), table.p()));
  }
  return caps;
}

}  // namespace phasecap
