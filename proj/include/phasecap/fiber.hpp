#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "phasecap/field.hpp"

namespace phasecap {

/// Axis-aligned box lo < hi per axis.
struct Region {
  std::vector<double> lo;
  std::vector<double> hi;

  Region() = default;
  Region(std::vector<double> lo_, std::vector<double> hi_);

  bool contains(const std::array<double, 3>& x, std::size_t ndim) const;
  /// Intersection with the grid box; throws EmptyRegion if it is empty.
  Region clipped_to(const Grid& grid) const;
};

struct FiberElement {
  double measure = 0.0;    // length in 2-D, area in 3-D
  double grad_norm = 0.0;  // |grad theta| interpolated at the centroid
  std::size_t cell = 0;
  int component = 0;
  std::array<double, 3> centroid{0.0, 0.0, 0.0};
};

/// Piecewise-linear approximation of the fiber {theta = t} inside the open box.
struct FiberMesh {
  double level = 0.0;
  double requested_level = 0.0;
  bool nudged = false;
  std::size_t ndim = 2;
  double floor_grad = 0.0;
  int component_count = 0;
  std::vector<FiberElement> elements;  // ascending cell index

  double min_grad() const;
  double max_grad() const;
};

/// Caches the node gradient and the level/gradient floors for repeated
/// extraction from one phase field.
class FiberExtractor {
 public:
  explicit FiberExtractor(ScalarField field);

  FiberMesh extract(double t, const std::optional<Region>& region = std::nullopt) const;

  const ScalarField& field() const noexcept { return field_; }
  const VectorField& gradient() const noexcept { return grad_; }
  double lipschitz() const noexcept { return lipschitz_; }
  double floor_grad() const noexcept { return floor_grad_; }
  double level_epsilon() const noexcept { return eps_level_; }
  double min_value() const noexcept { return min_value_; }
  double max_value() const noexcept { return max_value_; }

 private:
  double nudge(double t, bool& nudged) const;
  void extract_2d(double t, FiberMesh& mesh, const std::optional<Region>& region) const;
  void extract_3d(double t, FiberMesh& mesh, const std::optional<Region>& region) const;

  ScalarField field_;
  VectorField grad_;
  double lipschitz_ = 0.0;
  double floor_grad_ = 0.0;
  double eps_level_ = 0.0;
  double min_value_ = 0.0;
  double max_value_ = 0.0;
};

FiberMesh extract_fiber(const ScalarField& field, double t,
                        const std::optional<Region>& region = std::nullopt);

double fiber_size(const FiberMesh& mesh);

/// Per-component energy weights, components in label order, elements in
/// ascending cell order within each component.
std::vector<double> component_weights(const FiberMesh& mesh, double p);

/// Sum of `component_weights` in label order; bit-identical to summing them.
double energy_weight(const FiberMesh& mesh, double p);

/// Integral of 1/|grad theta| over the fiber; +inf when any element of
/// positive measure has grad_norm below the mesh's floor_grad.
double pushforward_weight(const FiberMesh& mesh);

struct FiberMeanEnergy {
  double w = 0.0;
  double energy_weight = 0.0;
  double rho = 0.0;  // energy_weight / w
};

FiberMeanEnergy fiber_mean_energy(const FiberMesh& mesh, double p);

// ---------------------------------------------------------------------------

struct WeightRow {
  double t = 0.0;
  double S = 0.0;
  double A = 0.0;
  double w = 0.0;  // +inf encodes the vanishing-gradient flag
};

class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(double p, std::vector<WeightRow> rows);

  /// Table from prescribed weights only; S and w are set equal to A, as for
  /// a unit-gradient phase.
  static WeightTable synthetic(double p, const std::vector<double>& t,
                               const std::vector<double>& A);
  static WeightTable synthetic(double p, const std::vector<double>& t,
                               const std::function<double(double)>& weight);

  double p() const noexcept { return p_; }
  const std::vector<WeightRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  const WeightRow& operator[](std::size_t i) const { return rows_[i]; }
  double t_min() const { return rows_.front().t; }
  double t_max() const { return rows_.back().t; }
  std::vector<double> levels() const;

  /// Index of the row whose level equals t (within 1e-12 of the span), if any.
  std::optional<std::size_t> find_knot(double t) const;

  std::vector<std::string> notes;

 private:
  double p_ = 2.0;
  std::vector<WeightRow> rows_;
};

/// `count` equally spaced levels from lo to hi inclusive.
std::vector<double> uniform_levels(double lo, double hi, std::size_t count);

/// Levels t0 + delta * 2^{-j/per_octave}, j = count-1 .. 0, ascending.
std::vector<double> geometric_levels(double t0, double delta, std::size_t count,
                                     std::size_t per_octave = 1);

WeightTable weight_table(const FiberExtractor& extractor, double p,
                         const std::vector<double>& levels,
                         const std::optional<Region>& region = std::nullopt,
                         unsigned threads = 0);

WeightTable weight_table(const ScalarField& field, double p, const std::vector<double>& levels,
                         const std::optional<Region>& region = std::nullopt,
                         unsigned threads = 0);

struct CoareaCheck {
  double volume_side = 0.0;
  double level_side = 0.0;
  double residual = 0.0;  // relative
};

/// Compares the grid integral of |probe(theta)|^p |grad theta|^p with the
/// level integral of |probe(t)|^p A(t). The level side uses the midpoint
/// rule with `level_count` cells over the value range (or `window`).
CoareaCheck coarea_check(const ScalarField& field, double p,
                         const std::function<double(double)>& probe,
                         std::size_t level_count,
                         const std::optional<LevelPair>& window = std::nullopt);

}  // namespace phasecap
