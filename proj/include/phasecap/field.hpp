#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace phasecap {

/// Uniform Cartesian node grid in 2 or 3 dimensions. Node storage is
/// row-major with the last axis varying fastest.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<std::size_t> dims, std::vector<double> spacing,
       std::vector<double> origin);

  /// Grid with `dims` nodes spanning the closed box [lo, hi] per axis.
  static Grid box(std::vector<std::size_t> dims, const std::vector<double>& lo,
                  const std::vector<double>& hi);

  std::size_t ndim() const noexcept { return dims_.size(); }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  const std::vector<double>& spacing() const noexcept { return spacing_; }
  const std::vector<double>& origin() const noexcept { return origin_; }
  std::size_t dim(std::size_t axis) const { return dims_[axis]; }
  double h(std::size_t axis) const { return spacing_[axis]; }
  double lo(std::size_t axis) const { return origin_[axis]; }
  double hi(std::size_t axis) const {
    return origin_[axis] + spacing_[axis] * static_cast<double>(dims_[axis] - 1);
  }

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t cell_count() const noexcept;
  double cell_volume() const noexcept;
  std::size_t stride(std::size_t axis) const { return strides_[axis]; }

  std::size_t index(const std::array<std::size_t, 3>& ijk) const noexcept;
  std::array<std::size_t, 3> multi_index(std::size_t node) const noexcept;
  double coord(std::size_t node, std::size_t axis) const noexcept;
  std::array<double, 3> position(std::size_t node) const noexcept;

  /// Outermost node layer; stands in for the boundary of the open box.
  bool is_boundary(std::size_t node) const noexcept;

  /// Cell c is addressed by its lowest-corner node multi-index, with the
  /// last axis fastest over (dims - 1) cells per axis.
  std::array<std::size_t, 3> cell_multi_index(std::size_t cell) const noexcept;
  std::size_t cell_index(const std::array<std::size_t, 3>& ijk) const noexcept;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::vector<double> spacing_;
  std::vector<double> origin_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(Grid grid, std::vector<double> values, std::string name = "theta");

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t node) const { return values_[node]; }
  const std::string& name() const noexcept { return name_; }

  double min_value() const;
  double max_value() const;

  /// Multilinear interpolation at a point of the closed box.
  double interpolate(const std::array<double, 3>& x) const;

 private:
  Grid grid_;
  std::vector<double> values_;
  std::string name_;
};

class VectorField {
 public:
  VectorField() = default;
  VectorField(Grid grid, std::vector<std::vector<double>> components);

  const Grid& grid() const noexcept { return grid_; }
  const std::vector<double>& component(std::size_t axis) const {
    return components_[axis];
  }
  double norm_at(std::size_t node) const;
  double max_norm() const;

  /// Multilinear interpolation of every component.
  std::array<double, 3> interpolate(const std::array<double, 3>& x) const;

 private:
  Grid grid_;
  std::vector<std::vector<double>> components_;
};

struct PhaseModel {
  enum class Kind { Planar, Radial, Monomial, File };

  Kind kind = Kind::Planar;
  std::size_t axis = 0;
  std::vector<double> center;
  double gamma = 2.0;
  std::filesystem::path path;

  static PhaseModel planar(std::size_t axis = 0);
  static PhaseModel radial(std::vector<double> center);
  static PhaseModel monomial(double gamma, std::size_t axis = 0);
  static PhaseModel file(std::filesystem::path path);
};

struct LevelPair {
  double a = 0.0;
  double b = 1.0;

  LevelPair() = default;
  LevelPair(double lo, double hi);
};

struct PlateMasks {
  std::vector<std::uint8_t> e;  // theta <= a
  std::vector<std::uint8_t> f;  // theta >= b
  std::size_t e_count = 0;
  std::size_t f_count = 0;
};

struct AdmissibilityReport {
  bool admissible = false;
  bool boundary_inside = false;
  bool e_nonempty = false;
  bool f_nonempty = false;
  double boundary_min = 0.0;
  double boundary_max = 0.0;
  std::size_t offending_boundary_nodes = 0;

  std::string summary() const;
};

ScalarField sample_phase(const PhaseModel& model, const Grid& grid);

/// Central differences inside, one-sided second-order stencils on the
/// outermost layer. Exact for affine fields everywhere.
VectorField gradient(const ScalarField& field);

PlateMasks plate_masks(const ScalarField& field, const LevelPair& levels);

AdmissibilityReport check_admissible_levels(const ScalarField& field,
                                            const LevelPair& levels);

// Field file format `PHASEFIELD v1`.
void write_field(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_field(const std::filesystem::path& path);
std::string format_field(const ScalarField& field);
ScalarField parse_field(const std::string& text);

/// Shortest decimal representation that round-trips exactly.
std::string format_shortest(double value);

}  // namespace phasecap
