#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "phasecap/field.hpp"
#include "phasecap/reduced.hpp"

namespace phasecap {

/// Nodes held at 0 (E) and at 1 (F).
struct ConstraintSet {
  std::vector<std::uint8_t> zero;
  std::vector<std::uint8_t> one;

  ConstraintSet() = default;
  ConstraintSet(std::vector<std::uint8_t> zero_mask, std::vector<std::uint8_t> one_mask);

  static ConstraintSet from_plates(const PlateMasks& masks);
  std::size_t zero_count() const;
  std::size_t one_count() const;
};

struct MinimizeOptions {
  double p = 2.0;
  double eps_reg = 0.0;
  double tol_rel = 1e-10;
  std::size_t max_iter = 20000;
  bool check_truncation = false;

  /// eps_reg = 1e-8 below p = 2, 0 otherwise.
  static MinimizeOptions defaults(double p);
};

/// Discrete p-Dirichlet energy with cell-centred gradients: each cell's
/// gradient averages the 2^{n-1} node differences along every axis.
class DirichletEnergy {
 public:
  DirichletEnergy(Grid grid, double p, double eps_reg = 0.0);

  const Grid& grid() const noexcept { return grid_; }
  double p() const noexcept { return p_; }

  double value(std::span<const double> u) const;
  /// Energy and its gradient with respect to every node value.
  double value_and_gradient(std::span<const double> u, std::span<double> grad) const;

  std::array<double, 3> cell_gradient(std::span<const double> u, std::size_t cell) const;
  std::array<double, 3> cell_center(std::size_t cell) const;

 private:
  Grid grid_;
  double p_;
  double eps_sq_;
};

struct CapacityReport {
  double p = 2.0;
  double capacity = 0.0;  // unregularised energy of the clamped minimizer
  std::size_t iterations = 0;
  double final_rel_decrease = 0.0;
  bool converged = false;
  ScalarField minimizer;
  std::vector<double> energy_history;  // regularised energy per iterate
  std::size_t truncation_violations = 0;

  // Filled by compare_bound.
  double reduced_capacity = 0.0;
  double gap = 0.0;  // reduced - full
  double tol_compare = 0.0;
  bool bound_ok = true;
  double fibered_competitor_energy = 0.0;
  std::size_t free_nodes = 0;
};

/// Minimises the discrete energy over node values with masked nodes fixed.
/// `initial` seeds the free nodes (0.5 when absent).
CapacityReport p_capacity(const Grid& grid, const ConstraintSet& constraints,
                          const MinimizeOptions& opts,
                          const std::optional<std::vector<double>>& initial = std::nullopt);

struct FiberedEnergy {
  double grid_energy = 0.0;
  double reduced_energy = 0.0;
  double residual = 0.0;
};

/// Grid energy of u = v(theta) (v extended by 0 and 1) against the reduced
/// energy of v on a weight table at the profile knots plus `level_count`
/// uniform levels.
FiberedEnergy fibered_energy(const ScalarField& theta, const Profile& profile, double p,
                             std::size_t level_count = 0);

enum class PlateMode { Truncated, Strict };

struct CompareOptions {
  PlateMode mode = PlateMode::Truncated;
  /// Keeps only theta in [b, b + width] in the outer plate.
  std::optional<double> outer_plate_width;
  std::size_t level_count = 512;
  /// Plates to use instead of {theta <= a}, {theta >= b}; must lie inside them.
  std::optional<ConstraintSet> plates;
};

CapacityReport compare_bound(const ScalarField& theta, const LevelPair& levels, double p,
                             const MinimizeOptions& opts, const CompareOptions& copts = {});

struct AxisAverage {
  std::vector<double> coords;
  std::vector<double> values;
};

/// Trapezoid-weighted mean of u over each node plane normal to `axis`.
AxisAverage transverse_average(const ScalarField& u, std::size_t axis);

/// Mean of u over the sphere |x - center| = r, via the fiber mesh of the
/// radial phase.
std::vector<double> spherical_average(const ScalarField& u, const std::vector<double>& center,
                                      const std::vector<double>& radii);

/// Midpoint-rule integral of |v'|^p * omega_{n-1} r^{n-1} for samples v(r).
double radial_profile_energy(const std::vector<double>& radii, const std::vector<double>& values,
                             double p, std::size_t n);

/// Midpoint-rule integral of |v'|^p * section for samples v(x).
double axial_profile_energy(const std::vector<double>& coords, const std::vector<double>& values,
                            double p, double section);

struct TangentialSplit {
  double normal = 0.0;
  double tangential = 0.0;
  double excluded_measure = 0.0;  // cells with |grad theta| <= floor_grad
};

/// Squared gradient split along grad theta / |grad theta| per cell. A
/// nonpositive floor_grad selects 1e-12 times the largest cell gradient.
TangentialSplit tangential_decompose(const ScalarField& u_star, const ScalarField& theta,
                                     double floor_grad = 0.0);

struct PolarizationGap {
  double energy_difference = 0.0;  // E(u_f) - E(u_*)
  double difference_energy = 0.0;  // E(u_f - u_*)
  double residual = 0.0;
};

/// Quadratic (p = 2) polarization check on the shared discrete energy.
PolarizationGap polarization_gap(const ScalarField& u_f, const ScalarField& u_star,
                                 const ConstraintSet& constraints);

}  // namespace phasecap
