#include "phasecap/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "phasecap/error.hpp"

namespace phasecap {

namespace {

using Point = std::array<double, 3>;

Point lerp(const Point& a, const Point& b, double s) {
  return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
}

double distance(const Point& a, const Point& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1], dz = b[2] - a[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double triangle_area(const Point& a, const Point& b, const Point& c) {
  const Point u{b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Point v{c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const double cx = u[1] * v[2] - u[2] * v[1];
  const double cy = u[2] * v[0] - u[0] * v[2];
  const double cz = u[0] * v[1] - u[1] * v[0];
  return 0.5 * std::sqrt(cx * cx + cy * cy + cz * cz);
}

// Sutherland-Hodgman against one half-space; keep_above selects x[axis] >= bound.
std::vector<Point> clip_plane(const std::vector<Point>& poly, std::size_t axis, double bound,
                              bool keep_above, bool closed) {
  std::vector<Point> out;
  if (poly.empty()) return out;
  auto inside = [&](const Point& p) { return keep_above ? p[axis] >= bound : p[axis] <= bound; };
  auto cut = [&](const Point& a, const Point& b) {
    const double s = (bound - a[axis]) / (b[axis] - a[axis]);
    Point r = lerp(a, b, s);
    r[axis] = bound;
    return r;
  };
  if (!closed) {
    // Segment.
    const Point& a = poly[0];
    const Point& b = poly[1];
    const bool ia = inside(a), ib = inside(b);
    if (ia && ib) return poly;
    if (!ia && !ib) return out;
    const Point c = cut(a, b);
    return ia ? std::vector<Point>{a, c} : std::vector<Point>{c, b};
  }
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point& cur = poly[i];
    const Point& prev = poly[(i + poly.size() - 1) % poly.size()];
    const bool ic = inside(cur), ip = inside(prev);
    if (ic) {
      if (!ip) out.push_back(cut(prev, cur));
      out.push_back(cur);
    } else if (ip) {
      out.push_back(cut(prev, cur));
    }
  }
  return out;
}

std::vector<Point> clip_to_region(std::vector<Point> poly, const Region& region,
                                  std::size_t ndim) {
  const bool closed = poly.size() > 2;
  for (std::size_t axis = 0; axis < ndim && !poly.empty(); ++axis) {
    poly = clip_plane(poly, axis, region.lo[axis], true, closed);
    poly = clip_plane(poly, axis, region.hi[axis], false, closed);
  }
  return poly;
}

// Measure and centroid of a segment (2 points) or planar polygon (>= 3 points).
std::pair<double, Point> measure_and_centroid(const std::vector<Point>& poly) {
  if (poly.size() < 2) return {0.0, Point{0.0, 0.0, 0.0}};
  if (poly.size() == 2) {
    return {distance(poly[0], poly[1]), lerp(poly[0], poly[1], 0.5)};
  }
  double area = 0.0;
  Point c{0.0, 0.0, 0.0};
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const double a = triangle_area(poly[0], poly[i], poly[i + 1]);
    area += a;
    for (std::size_t k = 0; k < 3; ++k) c[k] += a * (poly[0][k] + poly[i][k] + poly[i + 1][k]) / 3.0;
  }
  if (area > 0.0) {
    for (auto& ck : c) ck /= area;
  } else {
    c = poly[0];
  }
  return {area, c};
}

struct DisjointSet {
  std::vector<int> parent;
  int make() {
    parent.push_back(static_cast<int>(parent.size()));
    return parent.back();
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

using VertexKey = std::uint64_t;

VertexKey edge_key(std::size_t n0, std::size_t n1) {
  if (n0 > n1) std::swap(n0, n1);
  return (static_cast<VertexKey>(n0) << 32) | static_cast<VertexKey>(n1);
}

// Collects raw elements of one cell and appends them with connectivity keys.
class MeshBuilder {
 public:
  MeshBuilder(const Grid& grid, const VectorField& grad, const std::optional<Region>& region,
              FiberMesh& mesh)
      : grid_(grid), grad_(grad), region_(region), mesh_(mesh) {}

  void add(std::vector<Point> poly, const std::vector<VertexKey>& keys, std::size_t cell) {
    if (on_box_face(poly)) return;
    if (region_) {
      poly = clip_to_region(std::move(poly), *region_, grid_.ndim());
      if (poly.size() < 2) return;
    }
    auto [measure, centroid] = measure_and_centroid(poly);
    if (!(measure > 0.0)) return;
    const auto g = grad_.interpolate(centroid);
    double gsq = 0.0;
    for (std::size_t axis = 0; axis < grid_.ndim(); ++axis) gsq += g[axis] * g[axis];

    FiberElement e;
    e.measure = measure;
    e.grad_norm = std::sqrt(gsq);
    e.cell = cell;
    e.centroid = centroid;
    const int id = sets_.make();
    for (VertexKey k : keys) {
      auto [it, inserted] = owner_.try_emplace(k, id);
      if (!inserted) sets_.unite(id, it->second);
    }
    mesh_.elements.push_back(e);
  }

  void finish() {
    std::unordered_map<int, int> label;
    for (std::size_t i = 0; i < mesh_.elements.size(); ++i) {
      const int root = sets_.find(static_cast<int>(i));
      auto [it, inserted] = label.try_emplace(root, static_cast<int>(label.size()));
      mesh_.elements[i].component = it->second;
    }
    mesh_.component_count = static_cast<int>(label.size());
  }

 private:
  // Pieces lying on the outer box belong to the closed box only.
  bool on_box_face(const std::vector<Point>& poly) const {
    for (std::size_t axis = 0; axis < grid_.ndim(); ++axis) {
      const double tol = 1e-12 * grid_.h(axis);
      bool all_lo = true, all_hi = true;
      for (const auto& p : poly) {
        all_lo = all_lo && std::abs(p[axis] - grid_.lo(axis)) <= tol;
        all_hi = all_hi && std::abs(p[axis] - grid_.hi(axis)) <= tol;
      }
      if (all_lo || all_hi) return true;
    }
    return false;
  }

  const Grid& grid_;
  const VectorField& grad_;
  const std::optional<Region>& region_;
  FiberMesh& mesh_;
  DisjointSet sets_;
  std::unordered_map<VertexKey, int> owner_;
};

}  // namespace

// ---------------------------------------------------------------------------

Region::Region(std::vector<double> lo_, std::vector<double> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.empty()) {
    fail(ErrorCode::DimensionMismatch, "region lo/hi lengths differ");
  }
  for (std::size_t axis = 0; axis < lo.size(); ++axis) {
    if (!(lo[axis] < hi[axis])) fail(ErrorCode::InvalidArgument, "region needs lo < hi per axis");
  }
}

bool Region::contains(const std::array<double, 3>& x, std::size_t ndim) const {
  for (std::size_t axis = 0; axis < ndim; ++axis) {
    if (x[axis] < lo[axis] || x[axis] > hi[axis]) return false;
  }
  return true;
}

Region Region::clipped_to(const Grid& grid) const {
  if (lo.size() != grid.ndim()) fail(ErrorCode::DimensionMismatch, "region dimension differs from grid");
  std::vector<double> l(lo.size()), h(hi.size());
  for (std::size_t axis = 0; axis < lo.size(); ++axis) {
    l[axis] = std::max(lo[axis], grid.lo(axis));
    h[axis] = std::min(hi[axis], grid.hi(axis));
    if (!(l[axis] < h[axis])) fail(ErrorCode::EmptyRegion, "region does not meet the grid box");
  }
  Region r;
  r.lo = std::move(l);
  r.hi = std::move(h);
  return r;
}

double FiberMesh::min_grad() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& e : elements) m = std::min(m, e.grad_norm);
  return elements.empty() ? 0.0 : m;
}

double FiberMesh::max_grad() const {
  double m = 0.0;
  for (const auto& e : elements) m = std::max(m, e.grad_norm);
  return m;
}

FiberExtractor::FiberExtractor(ScalarField field)
    : field_(std::move(field)), grad_(phasecap::gradient(field_)) {
  lipschitz_ = grad_.max_norm();
  floor_grad_ = 1e-12 * lipschitz_;
  min_value_ = field_.min_value();
  max_value_ = field_.max_value();
  eps_level_ = 1e-9 * (max_value_ - min_value_);
}

double FiberExtractor::nudge(double t, bool& nudged) const {
  nudged = false;
  if (eps_level_ <= 0.0) return t;
  for (int round = 0; round < 16; ++round) {
    bool hit = false;
    for (double v : field_.values()) {
      if (std::abs(t - v) < eps_level_) {
        hit = true;
        break;
      }
    }
    if (!hit) break;
    t += eps_level_;
    nudged = true;
  }
  return t;
}

FiberMesh FiberExtractor::extract(double t, const std::optional<Region>& region) const {
  if (!(t > min_value_ && t < max_value_)) {
    fail(ErrorCode::OutOfSpan, "fiber level lies outside the open value range of the phase");
  }
  std::optional<Region> clipped;
  if (region) clipped = region->clipped_to(field_.grid());

  FiberMesh mesh;
  mesh.requested_level = t;
  mesh.level = nudge(t, mesh.nudged);
  mesh.ndim = field_.grid().ndim();
  mesh.floor_grad = floor_grad_;
  if (mesh.ndim == 2) {
    extract_2d(mesh.level, mesh, clipped);
  } else {
    extract_3d(mesh.level, mesh, clipped);
  }
  return mesh;
}

void FiberExtractor::extract_2d(double t, FiberMesh& mesh,
                                const std::optional<Region>& region) const {
  const Grid& grid = field_.grid();
  const auto& v = field_.values();
  const std::size_t s0 = grid.stride(0), s1 = grid.stride(1);
  MeshBuilder builder(grid, grad_, region, mesh);

  // Corners counter-clockwise: (i,j) (i+1,j) (i+1,j+1) (i,j+1); edge k joins
  // corner k and corner k+1.
  for (std::size_t i = 0; i + 1 < grid.dim(0); ++i) {
    for (std::size_t j = 0; j + 1 < grid.dim(1); ++j) {
      const std::size_t base = i * s0 + j * s1;
      const std::array<std::size_t, 4> node{base, base + s0, base + s0 + s1, base + s1};
      std::array<double, 4> val{};
      unsigned mask = 0;
      for (int k = 0; k < 4; ++k) {
        val[k] = v[node[k]];
        if (val[k] > t) mask |= 1U << k;
      }
      if (mask == 0 || mask == 15) continue;

      std::array<Point, 4> at{};
      for (int k = 0; k < 4; ++k) at[k] = grid.position(node[k]);
      auto crossing = [&](int e) {
        const int a = e, b = (e + 1) % 4;
        const double s = (t - val[a]) / (val[b] - val[a]);
        return lerp(at[a], at[b], s);
      };
      auto key = [&](int e) { return edge_key(node[e], node[(e + 1) % 4]); };
      const std::size_t cell = grid.cell_index({i, j, 0});

      std::vector<int> edges;
      for (int e = 0; e < 4; ++e) {
        if (((mask >> e) & 1U) != ((mask >> ((e + 1) % 4)) & 1U)) edges.push_back(e);
      }
      if (edges.size() == 2) {
        builder.add({crossing(edges[0]), crossing(edges[1])}, {key(edges[0]), key(edges[1])}, cell);
        continue;
      }
      // Saddle: value of the bilinear interpolant at its critical point
      // decides which diagonal pair is joined.
      const double denom = val[0] + val[2] - val[1] - val[3];
      const double saddle = denom != 0.0 ? (val[0] * val[2] - val[1] * val[3]) / denom
                                         : 0.25 * (val[0] + val[1] + val[2] + val[3]);
      const bool saddle_above = saddle > t;
      for (int k = 0; k < 4; ++k) {
        const bool above = (mask >> k) & 1U;
        if (above == saddle_above) continue;
        const int e_prev = (k + 3) % 4;
        builder.add({crossing(e_prev), crossing(k)}, {key(e_prev), key(k)}, cell);
      }
    }
  }
  builder.finish();
}

void FiberExtractor::extract_3d(double t, FiberMesh& mesh,
                                const std::optional<Region>& region) const {
  const Grid& grid = field_.grid();
  const auto& v = field_.values();
  const std::array<std::size_t, 3> s{grid.stride(0), grid.stride(1), grid.stride(2)};
  MeshBuilder builder(grid, grad_, region, mesh);

  // Kuhn split: one tetrahedron per axis permutation, all sharing the main
  // diagonal, conforming across neighbouring cubes.
  static constexpr std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

  for (std::size_t i = 0; i + 1 < grid.dim(0); ++i) {
    for (std::size_t j = 0; j + 1 < grid.dim(1); ++j) {
      for (std::size_t k = 0; k + 1 < grid.dim(2); ++k) {
        const std::size_t base = i * s[0] + j * s[1] + k * s[2];
        const std::size_t top = base + s[0] + s[1] + s[2];
        double lo = v[base], hi = v[base];
        for (std::size_t c = 1; c < 8; ++c) {
          const std::size_t n = base + ((c >> 2) & 1U) * s[0] + ((c >> 1) & 1U) * s[1] + (c & 1U) * s[2];
          lo = std::min(lo, v[n]);
          hi = std::max(hi, v[n]);
        }
        if (!(lo <= t && t < hi)) continue;
        const std::size_t cell = grid.cell_index({i, j, k});

        for (const auto& perm : perms) {
          std::array<std::size_t, 4> tet{base, base + s[perm[0]], base + s[perm[0]] + s[perm[1]], top};
          std::array<double, 4> val{};
          std::array<Point, 4> at{};
          std::vector<int> above, below;
          for (int q = 0; q < 4; ++q) {
            val[q] = v[tet[q]];
            at[q] = grid.position(tet[q]);
            (val[q] > t ? above : below).push_back(q);
          }
          if (above.empty() || below.empty()) continue;
          auto crossing = [&](int a, int b) {
            const double f = (t - val[a]) / (val[b] - val[a]);
            return lerp(at[a], at[b], f);
          };
          auto key = [&](int a, int b) { return edge_key(tet[a], tet[b]); };

          if (above.size() == 1 || below.size() == 1) {
            const auto& lone = above.size() == 1 ? above : below;
            const auto& rest = above.size() == 1 ? below : above;
            const int a = lone[0];
            builder.add({crossing(a, rest[0]), crossing(a, rest[1]), crossing(a, rest[2])},
                        {key(a, rest[0]), key(a, rest[1]), key(a, rest[2])}, cell);
          } else {
            const int a = above[0], b = above[1], c = below[0], d = below[1];
            // Quad ac, ad, bd, bc split along ac-bd.
            builder.add({crossing(a, c), crossing(a, d), crossing(b, d)},
                        {key(a, c), key(a, d), key(b, d)}, cell);
            builder.add({crossing(a, c), crossing(b, d), crossing(b, c)},
                        {key(a, c), key(b, d), key(b, c)}, cell);
          }
        }
      }
    }
  }
  builder.finish();
}

FiberMesh extract_fiber(const ScalarField& field, double t, const std::optional<Region>& region) {
  return FiberExtractor(field).extract(t, region);
}

// ---------------------------------------------------------------------------
// Fiber integrals

double fiber_size(const FiberMesh& mesh) {
  double s = 0.0;
  for (const auto& e : mesh.elements) s += e.measure;
  return s;
}

std::vector<double> component_weights(const FiberMesh& mesh, double p) {
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  std::vector<double> sums(static_cast<std::size_t>(mesh.component_count), 0.0);
  for (const auto& e : mesh.elements) {
    sums[static_cast<std::size_t>(e.component)] += std::pow(e.grad_norm, p - 1.0) * e.measure;
  }
  return sums;
}

double energy_weight(const FiberMesh& mesh, double p) {
  double total = 0.0;
  for (double c : component_weights(mesh, p)) total += c;
  return total;
}

double pushforward_weight(const FiberMesh& mesh) {
  double w = 0.0;
  for (const auto& e : mesh.elements) {
    if (e.measure <= 0.0) continue;
    if (e.grad_norm < mesh.floor_grad || e.grad_norm == 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    w += e.measure / e.grad_norm;
  }
  return w;
}

FiberMeanEnergy fiber_mean_energy(const FiberMesh& mesh, double p) {
  FiberMeanEnergy r;
  r.w = pushforward_weight(mesh);
  r.energy_weight = energy_weight(mesh, p);
  if (!std::isfinite(r.w) || !(r.w > 0.0)) {
    fail(ErrorCode::UndefinedDecomposition, "pushforward weight is zero or infinite; rho undefined");
  }
  r.rho = r.energy_weight / r.w;
  return r;
}

}  // namespace phasecap
