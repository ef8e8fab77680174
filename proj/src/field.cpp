#include "phasecap/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "phasecap/error.hpp"

namespace phasecap {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::Io: return "io";
    case ErrorCode::Format: return "format";
    case ErrorCode::OutOfSpan: return "out-of-span";
    case ErrorCode::NoMinimizer: return "no-minimizer";
    case ErrorCode::UndefinedDecomposition: return "undefined-decomposition";
    case ErrorCode::KnotAlignment: return "knot-alignment";
    case ErrorCode::NonMonotone: return "non-monotone";
    case ErrorCode::ComparisonViolation: return "comparison-violation";
    case ErrorCode::Admissibility: return "admissibility";
    case ErrorCode::NonConvergence: return "non-convergence";
    case ErrorCode::EmptyRegion: return "empty-region";
    case ErrorCode::TooFewRows: return "too-few-rows";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<std::size_t> dims, std::vector<double> spacing,
           std::vector<double> origin)
    : dims_(std::move(dims)), spacing_(std::move(spacing)), origin_(std::move(origin)) {
  const std::size_t n = dims_.size();
  if (n != 2 && n != 3) {
    fail(ErrorCode::DimensionMismatch, "grid must have 2 or 3 axes");
  }
  if (spacing_.size() != n || origin_.size() != n) {
    fail(ErrorCode::DimensionMismatch, "grid spacing/origin length differs from dims");
  }
  node_count_ = 1;
  for (std::size_t axis = 0; axis < n; ++axis) {
    if (dims_[axis] < 2) fail(ErrorCode::InvalidArgument, "every grid axis needs >= 2 nodes");
    if (!(spacing_[axis] > 0.0) || !std::isfinite(spacing_[axis])) {
      fail(ErrorCode::InvalidArgument, "grid spacing must be positive");
    }
    if (!std::isfinite(origin_[axis])) fail(ErrorCode::InvalidArgument, "grid origin must be finite");
    node_count_ *= dims_[axis];
  }
  strides_.assign(n, 1);
  for (std::size_t axis = n - 1; axis > 0; --axis) {
    strides_[axis - 1] = strides_[axis] * dims_[axis];
  }
}

Grid Grid::box(std::vector<std::size_t> dims, const std::vector<double>& lo,
               const std::vector<double>& hi) {
  if (lo.size() != dims.size() || hi.size() != dims.size()) {
    fail(ErrorCode::DimensionMismatch, "box extent length differs from dims");
  }
  std::vector<double> spacing(dims.size());
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    if (!(hi[axis] > lo[axis])) fail(ErrorCode::InvalidArgument, "box needs lo < hi on every axis");
    if (dims[axis] < 2) fail(ErrorCode::InvalidArgument, "every grid axis needs >= 2 nodes");
    spacing[axis] = (hi[axis] - lo[axis]) / static_cast<double>(dims[axis] - 1);
  }
  return Grid(std::move(dims), std::move(spacing), lo);
}

std::size_t Grid::cell_count() const noexcept {
  std::size_t count = 1;
  for (auto d : dims_) count *= d - 1;
  return count;
}

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (auto h : spacing_) v *= h;
  return v;
}

std::size_t Grid::index(const std::array<std::size_t, 3>& ijk) const noexcept {
  std::size_t node = 0;
  for (std::size_t axis = 0; axis < ndim(); ++axis) node += ijk[axis] * strides_[axis];
  return node;
}

std::array<std::size_t, 3> Grid::multi_index(std::size_t node) const noexcept {
  std::array<std::size_t, 3> ijk{0, 0, 0};
  for (std::size_t axis = 0; axis < ndim(); ++axis) {
    ijk[axis] = node / strides_[axis];
    node %= strides_[axis];
  }
  return ijk;
}

double Grid::coord(std::size_t node, std::size_t axis) const noexcept {
  const std::size_t i = (node / strides_[axis]) % dims_[axis];
  return origin_[axis] + spacing_[axis] * static_cast<double>(i);
}

std::array<double, 3> Grid::position(std::size_t node) const noexcept {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const auto ijk = multi_index(node);
  for (std::size_t axis = 0; axis < ndim(); ++axis) {
    x[axis] = origin_[axis] + spacing_[axis] * static_cast<double>(ijk[axis]);
  }
  return x;
}

bool Grid::is_boundary(std::size_t node) const noexcept {
  const auto ijk = multi_index(node);
  for (std::size_t axis = 0; axis < ndim(); ++axis) {
    if (ijk[axis] == 0 || ijk[axis] + 1 == dims_[axis]) return true;
  }
  return false;
}

std::array<std::size_t, 3> Grid::cell_multi_index(std::size_t cell) const noexcept {
  std::array<std::size_t, 3> ijk{0, 0, 0};
  for (std::size_t axis = ndim(); axis-- > 0;) {
    const std::size_t cells = dims_[axis] - 1;
    ijk[axis] = cell % cells;
    cell /= cells;
  }
  return ijk;
}

std::size_t Grid::cell_index(const std::array<std::size_t, 3>& ijk) const noexcept {
  std::size_t cell = 0;
  for (std::size_t axis = 0; axis < ndim(); ++axis) {
    cell = cell * (dims_[axis] - 1) + ijk[axis];
  }
  return cell;
}

// ---------------------------------------------------------------------------
// Fields

namespace {

struct CellLocation {
  std::array<std::size_t, 3> cell{0, 0, 0};
  std::array<double, 3> frac{0.0, 0.0, 0.0};
};

CellLocation locate(const Grid& grid, const std::array<double, 3>& x) {
  CellLocation loc;
  for (std::size_t axis = 0; axis < grid.ndim(); ++axis) {
    const double s = (x[axis] - grid.lo(axis)) / grid.h(axis);
    const double max_cell = static_cast<double>(grid.dim(axis) - 2);
    double c = std::floor(s);
    c = std::clamp(c, 0.0, max_cell);
    loc.cell[axis] = static_cast<std::size_t>(c);
    loc.frac[axis] = std::clamp(s - c, 0.0, 1.0);
  }
  return loc;
}

// Multilinear interpolation of `values` at a located point.
double multilinear(const Grid& grid, const std::vector<double>& values,
                   const CellLocation& loc) {
  const std::size_t n = grid.ndim();
  const std::size_t corners = std::size_t{1} << n;
  const std::size_t base = grid.index(loc.cell);
  double result = 0.0;
  for (std::size_t c = 0; c < corners; ++c) {
    double weight = 1.0;
    std::size_t node = base;
    for (std::size_t axis = 0; axis < n; ++axis) {
      const bool upper = (c >> (n - 1 - axis)) & 1U;
      weight *= upper ? loc.frac[axis] : 1.0 - loc.frac[axis];
      if (upper) node += grid.stride(axis);
    }
    result += weight * values[node];
  }
  return result;
}

}  // namespace

ScalarField::ScalarField(Grid grid, std::vector<double> values, std::string name)
    : grid_(std::move(grid)), values_(std::move(values)), name_(std::move(name)) {
  if (values_.size() != grid_.node_count()) {
    fail(ErrorCode::DimensionMismatch, "field value count differs from grid node count");
  }
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "field values must be finite");
  }
}

double ScalarField::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::interpolate(const std::array<double, 3>& x) const {
  return multilinear(grid_, values_, locate(grid_, x));
}

VectorField::VectorField(Grid grid, std::vector<std::vector<double>> components)
    : grid_(std::move(grid)), components_(std::move(components)) {
  if (components_.size() != grid_.ndim()) {
    fail(ErrorCode::DimensionMismatch, "vector field needs one component per axis");
  }
  for (const auto& c : components_) {
    if (c.size() != grid_.node_count()) {
      fail(ErrorCode::DimensionMismatch, "vector component count differs from node count");
    }
    for (double v : c) {
      if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "vector field values must be finite");
    }
  }
}

double VectorField::norm_at(std::size_t node) const {
  double sq = 0.0;
  for (const auto& c : components_) sq += c[node] * c[node];
  return std::sqrt(sq);
}

double VectorField::max_norm() const {
  double m = 0.0;
  for (std::size_t node = 0; node < grid_.node_count(); ++node) m = std::max(m, norm_at(node));
  return m;
}

std::array<double, 3> VectorField::interpolate(const std::array<double, 3>& x) const {
  const auto loc = locate(grid_, x);
  std::array<double, 3> g{0.0, 0.0, 0.0};
  for (std::size_t axis = 0; axis < grid_.ndim(); ++axis) {
    g[axis] = multilinear(grid_, components_[axis], loc);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Models

PhaseModel PhaseModel::planar(std::size_t axis) {
  PhaseModel m;
  m.kind = Kind::Planar;
  m.axis = axis;
  return m;
}

PhaseModel PhaseModel::radial(std::vector<double> center) {
  PhaseModel m;
  m.kind = Kind::Radial;
  m.center = std::move(center);
  return m;
}

PhaseModel PhaseModel::monomial(double gamma, std::size_t axis) {
  if (!(gamma > 1.0)) fail(ErrorCode::InvalidArgument, "monomial exponent must exceed 1");
  PhaseModel m;
  m.kind = Kind::Monomial;
  m.gamma = gamma;
  m.axis = axis;
  return m;
}

PhaseModel PhaseModel::file(std::filesystem::path path) {
  PhaseModel m;
  m.kind = Kind::File;
  m.path = std::move(path);
  return m;
}

LevelPair::LevelPair(double lo, double hi) : a(lo), b(hi) {
  if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "levels need a < b");
}

ScalarField sample_phase(const PhaseModel& model, const Grid& grid) {
  using Kind = PhaseModel::Kind;
  if (model.kind == Kind::File) {
    ScalarField loaded = read_field(model.path);
    if (!(loaded.grid() == grid)) {
      fail(ErrorCode::DimensionMismatch, "field file grid differs from the requested grid");
    }
    return loaded;
  }
  if ((model.kind == Kind::Planar || model.kind == Kind::Monomial) && model.axis >= grid.ndim()) {
    fail(ErrorCode::DimensionMismatch, "model axis exceeds grid dimension");
  }
  if (model.kind == Kind::Radial && model.center.size() != grid.ndim()) {
    fail(ErrorCode::DimensionMismatch, "radial center length differs from grid axes");
  }
  if (model.kind == Kind::Monomial && !(model.gamma > 1.0)) {
    fail(ErrorCode::InvalidArgument, "monomial exponent must exceed 1");
  }

  std::vector<double> values(grid.node_count());
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    const auto x = grid.position(node);
    switch (model.kind) {
      case Kind::Planar:
        values[node] = x[model.axis];
        break;
      case Kind::Radial: {
        double sq = 0.0;
        for (std::size_t axis = 0; axis < grid.ndim(); ++axis) {
          const double d = x[axis] - model.center[axis];
          sq += d * d;
        }
        values[node] = std::sqrt(sq);
        break;
      }
      case Kind::Monomial:
        values[node] = std::pow(std::abs(x[model.axis]), model.gamma);
        break;
      case Kind::File:
        break;
    }
  }
  return ScalarField(grid, std::move(values), "theta");
}

VectorField gradient(const ScalarField& field) {
  const Grid& grid = field.grid();
  const auto& u = field.values();
  std::vector<std::vector<double>> comps(grid.ndim(), std::vector<double>(grid.node_count()));
  for (std::size_t axis = 0; axis < grid.ndim(); ++axis) {
    const std::size_t s = grid.stride(axis);
    const std::size_t n = grid.dim(axis);
    const double h = grid.h(axis);
    auto& g = comps[axis];
    for (std::size_t node = 0; node < grid.node_count(); ++node) {
      const std::size_t i = (node / s) % n;
      if (i > 0 && i + 1 < n) {
        g[node] = (u[node + s] - u[node - s]) / (2.0 * h);
      } else if (n == 2) {
        g[node] = i == 0 ? (u[node + s] - u[node]) / h : (u[node] - u[node - s]) / h;
      } else if (i == 0) {
        g[node] = (-3.0 * u[node] + 4.0 * u[node + s] - u[node + 2 * s]) / (2.0 * h);
      } else {
        g[node] = (3.0 * u[node] - 4.0 * u[node - s] + u[node - 2 * s]) / (2.0 * h);
      }
    }
  }
  return VectorField(grid, std::move(comps));
}

PlateMasks plate_masks(const ScalarField& field, const LevelPair& levels) {
  if (!(levels.a < levels.b)) fail(ErrorCode::InvalidArgument, "levels need a < b");
  PlateMasks masks;
  const auto& v = field.values();
  masks.e.assign(v.size(), 0);
  masks.f.assign(v.size(), 0);
  for (std::size_t node = 0; node < v.size(); ++node) {
    if (v[node] <= levels.a) {
      masks.e[node] = 1;
      ++masks.e_count;
    } else if (v[node] >= levels.b) {
      masks.f[node] = 1;
      ++masks.f_count;
    }
  }
  return masks;
}

AdmissibilityReport check_admissible_levels(const ScalarField& field, const LevelPair& levels) {
  if (!(levels.a < levels.b)) fail(ErrorCode::InvalidArgument, "levels need a < b");
  AdmissibilityReport report;
  report.boundary_min = std::numeric_limits<double>::infinity();
  report.boundary_max = -std::numeric_limits<double>::infinity();
  const Grid& grid = field.grid();
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    if (!grid.is_boundary(node)) continue;
    const double v = field[node];
    report.boundary_min = std::min(report.boundary_min, v);
    report.boundary_max = std::max(report.boundary_max, v);
    if (!(levels.a < v && v < levels.b)) ++report.offending_boundary_nodes;
  }
  const auto masks = plate_masks(field, levels);
  report.boundary_inside = report.offending_boundary_nodes == 0;
  report.e_nonempty = masks.e_count > 0;
  report.f_nonempty = masks.f_count > 0;
  report.admissible = report.boundary_inside && report.e_nonempty && report.f_nonempty;
  return report;
}

std::string AdmissibilityReport::summary() const {
  std::ostringstream os;
  os << (admissible ? "admissible" : "not admissible") << ": boundary theta in ["
     << boundary_min << ", " << boundary_max << "], " << offending_boundary_nodes
     << " boundary nodes outside (a,b); E_a " << (e_nonempty ? "nonempty" : "empty")
     << ", F_b " << (f_nonempty ? "nonempty" : "empty");
  return os.str();
}

}  // namespace phasecap
