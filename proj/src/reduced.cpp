#include "phasecap/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phasecap/error.hpp"
#include "phasecap/exact_sum.hpp"

namespace phasecap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One trapezoid piece [t0,t1] with resistance densities at both ends.
struct Piece {
  double t0, t1;
  double B0, B1;
};

double span_tolerance(const WeightTable& table) {
  return 1e-12 * std::max(1.0, table.t_max() - table.t_min());
}

// Density at t by linear interpolation between knots; exact knot value when
// t coincides with a knot.
double density_at(const WeightTable& table, double t) {
  const double p = table.p();
  if (auto k = table.find_knot(t)) return resistance_density(table[*k].A, p);
  const auto& rows = table.rows();
  auto it = std::upper_bound(rows.begin(), rows.end(), t,
                             [](double x, const WeightRow& r) { return x < r.t; });
  const std::size_t hi = static_cast<std::size_t>(it - rows.begin());
  const std::size_t lo = hi - 1;
  const double B0 = resistance_density(rows[lo].A, p);
  const double B1 = resistance_density(rows[hi].A, p);
  if (std::isinf(B0) || std::isinf(B1)) return kInf;
  const double s = (t - rows[lo].t) / (rows[hi].t - rows[lo].t);
  return B0 + s * (B1 - B0);
}

void require_inside(const WeightTable& table, double a, double b) {
  const double tol = span_tolerance(table);
  if (!(a < b)) fail(ErrorCode::InvalidArgument, "levels need a < b");
  if (a < table.t_min() - tol || b > table.t_max() + tol) {
    fail(ErrorCode::OutOfSpan, "level interval lies outside the weight table span");
  }
}

// Breakpoints a, interior knots, b (knots snapped when within tolerance).
std::vector<double> breakpoints(const WeightTable& table, double a, double b) {
  require_inside(table, a, b);
  const double tol = span_tolerance(table);
  std::vector<double> pts{a};
  for (const auto& r : table.rows()) {
    if (r.t > a + tol && r.t < b - tol) pts.push_back(r.t);
  }
  pts.push_back(b);
  if (auto k = table.find_knot(a)) pts.front() = table[*k].t;
  if (auto k = table.find_knot(b)) pts.back() = table[*k].t;
  return pts;
}

std::vector<Piece> pieces(const WeightTable& table, double a, double b) {
  const auto pts = breakpoints(table, a, b);
  std::vector<Piece> out;
  out.reserve(pts.size() - 1);
  double B_prev = density_at(table, pts.front());
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double B_next = density_at(table, pts[i]);
    out.push_back({pts[i - 1], pts[i], B_prev, B_next});
    B_prev = B_next;
  }
  return out;
}

double piece_resistance(const Piece& piece) {
  return (piece.t1 - piece.t0) * 0.5 * (piece.B0 + piece.B1);
}

double mid_weight(double B0, double B1, double p) {
  const double mean = 0.5 * (B0 + B1);
  if (std::isinf(mean)) return 0.0;
  return std::pow(mean, 1.0 - p);
}

Profile cumulative_profile(const std::vector<Piece>& ps, const std::vector<double>& increments) {
  std::vector<double> knots{ps.front().t0};
  std::vector<double> values{0.0};
  ExactSum total;
  for (double inc : increments) total += inc;
  const double denom = total.result();
  ExactSum running;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    running += increments[i];
    knots.push_back(ps[i].t1);
    values.push_back(std::min(1.0, running.result() / denom));
  }
  values.back() = 1.0;
  for (std::size_t i = 1; i < values.size(); ++i) values[i] = std::max(values[i], values[i - 1]);
  return Profile(std::move(knots), std::move(values));
}

}  // namespace

// ---------------------------------------------------------------------------

Profile::Profile(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() < 2 || knots_.size() != values_.size()) {
    fail(ErrorCode::InvalidArgument, "profile needs >= 2 knots and one value per knot");
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (!(knots_[i] > knots_[i - 1])) fail(ErrorCode::NonMonotone, "profile knots must increase");
    if (values_[i] < values_[i - 1]) fail(ErrorCode::NonMonotone, "profile values must be nondecreasing");
  }
  if (values_.front() != 0.0 || values_.back() != 1.0) {
    fail(ErrorCode::InvalidArgument, "profile must run from 0 to 1");
  }
}

Profile Profile::linear(double a, double b, std::size_t knot_count) {
  if (knot_count < 2) knot_count = 2;
  std::vector<double> knots = uniform_levels(a, b, knot_count);
  std::vector<double> values(knot_count);
  for (std::size_t i = 0; i < knot_count; ++i) {
    values[i] = static_cast<double>(i) / static_cast<double>(knot_count - 1);
  }
  return Profile(std::move(knots), std::move(values));
}

double Profile::operator()(double t) const {
  if (t <= knots_.front()) return 0.0;
  if (t >= knots_.back()) return 1.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
  const std::size_t lo = hi - 1;
  const double s = (t - knots_[lo]) / (knots_[hi] - knots_[lo]);
  return values_[lo] + s * (values_[hi] - values_[lo]);
}

double Profile::lipschitz() const {
  double L = 0.0;
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    L = std::max(L, (values_[i] - values_[i - 1]) / (knots_[i] - knots_[i - 1]));
  }
  return L;
}

std::string to_string(CapacityBranch branch) {
  return branch == CapacityBranch::Finite ? "finite" : "divergent";
}

double resistance_density(double A, double p) {
  if (A <= kFloorA) return kInf;
  return std::pow(A, -1.0 / (p - 1.0));
}

double capacity_from_resistance(double R, double p) {
  if (std::isinf(R)) return 0.0;
  if (!(R > 0.0)) return kInf;
  return std::pow(R, 1.0 - p);
}

double resistance(const WeightTable& table, const LevelPair& levels) {
  ExactSum sum;
  for (const auto& piece : pieces(table, levels.a, levels.b)) {
    if (std::isinf(piece.B0) || std::isinf(piece.B1)) return kInf;
    sum += piece_resistance(piece);
  }
  return sum.result();
}

ReducedReport reduced_capacity(const WeightTable& table, const LevelPair& levels) {
  ReducedReport r;
  r.p = table.p();
  r.a = levels.a;
  r.b = levels.b;
  r.resistance = resistance(table, levels);
  r.capacity = capacity_from_resistance(r.resistance, r.p);
  r.branch = std::isinf(r.resistance) ? CapacityBranch::Divergent : CapacityBranch::Finite;
  r.levels = breakpoints(table, levels.a, levels.b).size();
  if (r.branch == CapacityBranch::Finite && r.resistance > 0.0) r.profile = optimal_profile(table, levels);
  return r;
}

Profile optimal_profile(const WeightTable& table, const LevelPair& levels) {
  const auto ps = pieces(table, levels.a, levels.b);
  std::vector<double> increments;
  increments.reserve(ps.size());
  for (const auto& piece : ps) {
    if (std::isinf(piece.B0) || std::isinf(piece.B1)) {
      fail(ErrorCode::NoMinimizer, "reduced resistance is infinite; capacity is 0 and no minimizer exists");
    }
    increments.push_back(piece_resistance(piece));
  }
  return cumulative_profile(ps, increments);
}

double reduced_energy(const Profile& profile, const WeightTable& table) {
  const double p = table.p();
  const auto& knots = profile.knots();
  const auto& values = profile.values();
  const auto ps = pieces(table, profile.a(), profile.b());

  // Merge the table pieces with the profile knots.
  ExactSum energy;
  std::size_t j = 0;
  for (const auto& piece : ps) {
    double s0 = piece.t0;
    double B_s0 = piece.B0;
    while (s0 < piece.t1) {
      while (j + 2 < knots.size() && knots[j + 1] <= s0) ++j;
      const double s1 = std::min(piece.t1, knots[j + 1]);
      if (!(s1 > s0)) break;
      const double frac = (s1 - piece.t0) / (piece.t1 - piece.t0);
      const double B_s1 = s1 == piece.t1 ? piece.B1
                          : (std::isinf(piece.B0) || std::isinf(piece.B1))
                              ? kInf
                              : piece.B0 + frac * (piece.B1 - piece.B0);
      const double slope = (values[j + 1] - values[j]) / (knots[j + 1] - knots[j]);
      if (slope != 0.0) {
        energy += (s1 - s0) * std::pow(std::abs(slope), p) * mid_weight(B_s0, B_s1, p);
      }
      s0 = s1;
      B_s0 = B_s1;
    }
  }
  return energy.result();
}

Profile truncated_profile(const WeightTable& table, const LevelPair& levels, double k) {
  if (!(k > 0.0)) fail(ErrorCode::InvalidArgument, "truncation level k must be positive");
  const auto ps = pieces(table, levels.a, levels.b);
  std::vector<double> increments;
  increments.reserve(ps.size());
  ExactSum ck;
  for (const auto& piece : ps) {
    const double inc = (piece.t1 - piece.t0) * 0.5 * (std::min(piece.B0, k) + std::min(piece.B1, k));
    increments.push_back(inc);
    ck += inc;
  }
  if (!(ck.result() > 0.0)) fail(ErrorCode::InvalidArgument, "truncated resistance c_k vanishes");
  return cumulative_profile(ps, increments);
}

LinearComparison linear_profile_comparison(const WeightTable& table, const LevelPair& levels) {
  LinearComparison c;
  c.linear_energy = reduced_energy(Profile::linear(levels.a, levels.b), table);
  c.capacity = reduced_capacity(table, levels).capacity;
  c.excess = c.linear_energy - c.capacity;
  c.equality = std::abs(c.excess) <= kTolEq * std::max(c.capacity, c.linear_energy);
  return c;
}

double series_residual(const WeightTable& table, double a, double c, double b) {
  if (!(a < c && c < b)) fail(ErrorCode::InvalidArgument, "series law needs a < c < b");
  if (!table.find_knot(c)) fail(ErrorCode::KnotAlignment, "series split level is not a table knot");
  const auto whole = pieces(table, a, b);
  const auto left = pieces(table, a, c);
  const auto right = pieces(table, c, b);
  auto infinite = [](const std::vector<Piece>& ps) {
    return std::any_of(ps.begin(), ps.end(), [](const Piece& q) {
      return std::isinf(q.B0) || std::isinf(q.B1);
    });
  };
  if (infinite(whole)) {
    // Both sides are +inf; the law holds in the extended sense.
    return (infinite(left) || infinite(right)) ? 0.0 : kInf;
  }
  ExactSum residual;
  for (const auto& q : whole) residual += piece_resistance(q);
  for (const auto& q : left) residual -= piece_resistance(q);
  for (const auto& q : right) residual -= piece_resistance(q);
  return std::abs(residual.result());
}

WeightTable reparametrize_table(const WeightTable& table, const std::vector<double>& phi) {
  const std::size_t n = table.size();
  if (phi.size() != n) fail(ErrorCode::DimensionMismatch, "phi needs one sample per table level");
  if (n < 2) fail(ErrorCode::InvalidArgument, "reparametrization needs at least two levels");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(phi[i] > phi[i - 1])) fail(ErrorCode::NonMonotone, "phi samples must be strictly increasing");
  }
  const double p = table.p();
  std::vector<WeightRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    const double dphi = (phi[hi] - phi[lo]) / (table[hi].t - table[lo].t);
    const WeightRow& r = table[i];
    rows[i].t = phi[i];
    rows[i].S = r.S;
    rows[i].A = std::pow(dphi, p - 1.0) * r.A;
    rows[i].w = std::isinf(r.w) ? r.w : r.w / dphi;
  }
  return WeightTable(p, std::move(rows));
}

TwoSidedBounds two_sided_bounds(const std::vector<double>& knots, const std::vector<double>& gamma_lo,
                                const std::vector<double>& gamma_hi, const std::vector<double>& m,
                                const std::vector<double>& M, const LevelPair& levels, double p) {
  const std::size_t n = knots.size();
  if (gamma_lo.size() != n || gamma_hi.size() != n || m.size() != n || M.size() != n) {
    fail(ErrorCode::DimensionMismatch, "envelope samples must match the knot count");
  }
  std::vector<double> lower(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(0.0 <= gamma_lo[i] && gamma_lo[i] <= gamma_hi[i]) || !(0.0 <= m[i] && m[i] <= M[i])) {
      fail(ErrorCode::InvalidArgument, "envelopes must satisfy 0 <= gamma_lo <= gamma_hi and 0 <= m <= M");
    }
    lower[i] = std::pow(gamma_lo[i], p - 1.0) * m[i];
    upper[i] = std::pow(gamma_hi[i], p - 1.0) * M[i];
  }
  TwoSidedBounds out;
  out.lower = reduced_capacity(WeightTable::synthetic(p, knots, lower), levels).capacity;
  out.upper = reduced_capacity(WeightTable::synthetic(p, knots, upper), levels).capacity;
  return out;
}

double eikonal_check(const WeightTable& table, const std::vector<double>& gamma) {
  if (gamma.size() != table.size()) fail(ErrorCode::DimensionMismatch, "gamma needs one sample per row");
  double worst = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (gamma[i] < 0.0) fail(ErrorCode::InvalidArgument, "gamma must be nonnegative");
    const auto& r = table[i];
    const double predicted = std::pow(gamma[i], table.p() - 1.0) * r.S;
    worst = std::max(worst, std::abs(r.A - predicted) / std::max(r.A, kFloorA));
  }
  return worst;
}

}  // namespace phasecap
