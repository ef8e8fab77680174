#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phasecap/fiber.hpp"
#include "phasecap/field.hpp"

namespace phasecap {

/// Weights at or below this value are treated as vanishing: the resistance
/// density is +inf there.
inline constexpr double kFloorA = 1e-30;

/// Relative tolerance for the constant-weight equality flag.
inline constexpr double kTolEq = 1e-10;

/// Nondecreasing piecewise-linear map on [knots.front(), knots.back()] from 0
/// to 1.
class Profile {
 public:
  Profile() = default;
  Profile(std::vector<double> knots, std::vector<double> values);

  static Profile linear(double a, double b, std::size_t knot_count = 2);

  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double a() const { return knots_.front(); }
  double b() const { return knots_.back(); }

  /// Value at t, extended by 0 below a and 1 above b.
  double operator()(double t) const;
  /// Largest difference quotient over the knot intervals.
  double lipschitz() const;

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

enum class CapacityBranch { Finite, Divergent };

struct ReducedReport {
  double p = 2.0;
  double a = 0.0;
  double b = 1.0;
  double resistance = 0.0;  // +inf on the divergent branch
  double capacity = 0.0;
  CapacityBranch branch = CapacityBranch::Finite;
  std::optional<Profile> profile;
  std::size_t levels = 0;
};

/// R^{1-p}, with the convention that an infinite resistance gives 0.
double capacity_from_resistance(double resistance, double p);

/// A^{-1/(p-1)}, +inf at or below kFloorA.
double resistance_density(double A, double p);

/// Trapezoid integral of A^{-1/(p-1)} over [a,b]; +inf if any row used has
/// A <= kFloorA. Endpoints between knots are linearly interpolated.
double resistance(const WeightTable& table, const LevelPair& levels);

ReducedReport reduced_capacity(const WeightTable& table, const LevelPair& levels);

Profile optimal_profile(const WeightTable& table, const LevelPair& levels);

/// Sum over profile pieces of |v'|^p A_mid * length, where A_mid is the
/// midpoint value of the linearly interpolated resistance density.
double reduced_energy(const Profile& profile, const WeightTable& table);

Profile truncated_profile(const WeightTable& table, const LevelPair& levels, double k);

struct LinearComparison {
  double linear_energy = 0.0;
  double capacity = 0.0;
  double excess = 0.0;
  bool equality = false;  // constant-weight case
};

LinearComparison linear_profile_comparison(const WeightTable& table, const LevelPair& levels);

/// |R(a,b) - R(a,c) - R(c,b)|; c must be a knot of the table.
double series_residual(const WeightTable& table, double a, double c, double b);

/// Table of the phase phi(theta): levels phi(t), weights phi'(t)^{p-1} A(t).
/// `phi` holds phi at each table level.
WeightTable reparametrize_table(const WeightTable& table, const std::vector<double>& phi);

struct TwoSidedBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Capacities of the envelope weights gamma_lo^{p-1} m and gamma_hi^{p-1} M,
/// all sampled on `knots`.
TwoSidedBounds two_sided_bounds(const std::vector<double>& knots,
                                const std::vector<double>& gamma_lo,
                                const std::vector<double>& gamma_hi,
                                const std::vector<double>& m, const std::vector<double>& M,
                                const LevelPair& levels, double p);

/// max_i |A_i - Gamma_i^{p-1} S_i| / max(A_i, kFloorA).
double eikonal_check(const WeightTable& table, const std::vector<double>& gamma);

std::string to_string(CapacityBranch branch);

}  // namespace phasecap
