#include <cmath>

#include "phasecap/error.hpp"
#include "phasecap/fullcap.hpp"

namespace phasecap {

DirichletEnergy::DirichletEnergy(Grid grid, double p, double eps_reg)
    : grid_(std::move(grid)), p_(p), eps_sq_(eps_reg * eps_reg) {
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  if (!(eps_reg >= 0.0)) fail(ErrorCode::InvalidArgument, "eps_reg must be nonnegative");
}

std::array<double, 3> DirichletEnergy::cell_gradient(std::span<const double> u,
                                                     std::size_t cell) const {
  const std::size_t n = grid_.ndim();
  const std::size_t base = grid_.index(grid_.cell_multi_index(cell));
  std::array<double, 3> g{0.0, 0.0, 0.0};
  if (n == 2) {
    const std::size_t s0 = grid_.stride(0), s1 = grid_.stride(1);
    const double u00 = u[base], u10 = u[base + s0], u01 = u[base + s1], u11 = u[base + s0 + s1];
    g[0] = ((u10 - u00) + (u11 - u01)) / (2.0 * grid_.h(0));
    g[1] = ((u01 - u00) + (u11 - u10)) / (2.0 * grid_.h(1));
    return g;
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    const std::size_t sa = grid_.stride(axis);
    const std::size_t sb = grid_.stride((axis + 1) % 3);
    const std::size_t sc = grid_.stride((axis + 2) % 3);
    double sum = 0.0;
    for (std::size_t off : {std::size_t{0}, sb, sc, sb + sc}) {
      sum += u[base + off + sa] - u[base + off];
    }
    g[axis] = sum / (4.0 * grid_.h(axis));
  }
  return g;
}

std::array<double, 3> DirichletEnergy::cell_center(std::size_t cell) const {
  const auto ijk = grid_.cell_multi_index(cell);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (std::size_t axis = 0; axis < grid_.ndim(); ++axis) {
    x[axis] = grid_.lo(axis) + grid_.h(axis) * (static_cast<double>(ijk[axis]) + 0.5);
  }
  return x;
}

double DirichletEnergy::value(std::span<const double> u) const {
  if (u.size() != grid_.node_count()) fail(ErrorCode::DimensionMismatch, "energy argument must have one value per node");
  const double vol = grid_.cell_volume();
  const double half_p = 0.5 * p_;
  double energy = 0.0;
  if (grid_.ndim() == 2) {
    const std::size_t s0 = grid_.stride(0), s1 = grid_.stride(1);
    const double ix = 1.0 / (2.0 * grid_.h(0)), iy = 1.0 / (2.0 * grid_.h(1));
    for (std::size_t i = 0; i + 1 < grid_.dim(0); ++i) {
      for (std::size_t j = 0; j + 1 < grid_.dim(1); ++j) {
        const std::size_t b = i * s0 + j * s1;
        const double u00 = u[b], u10 = u[b + s0], u01 = u[b + s1], u11 = u[b + s0 + s1];
        const double gx = ((u10 - u00) + (u11 - u01)) * ix;
        const double gy = ((u01 - u00) + (u11 - u10)) * iy;
        const double q = gx * gx + gy * gy + eps_sq_;
        energy += p_ == 2.0 ? q : std::pow(q, half_p);
      }
    }
    return energy * vol;
  }
  for (std::size_t cell = 0; cell < grid_.cell_count(); ++cell) {
    const auto g = cell_gradient(u, cell);
    const double q = g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + eps_sq_;
    energy += std::pow(q, half_p);
  }
  return energy * vol;
}

double DirichletEnergy::value_and_gradient(std::span<const double> u, std::span<double> grad) const {
  if (u.size() != grid_.node_count() || grad.size() != grid_.node_count()) {
    fail(ErrorCode::DimensionMismatch, "energy arguments must have one value per node");
  }
  std::fill(grad.begin(), grad.end(), 0.0);
  const double vol = grid_.cell_volume();
  const double half_p = 0.5 * p_;
  double energy = 0.0;

  // d/dq of q^{p/2} times 2 (chain rule through q = |g|^2), times vol.
  auto density = [&](double q, double& dq) {
    if (p_ == 2.0) {
      dq = 2.0 * vol;
      return q;
    }
    if (q <= 0.0) {
      dq = 0.0;
      return 0.0;
    }
    const double e = std::pow(q, half_p);
    dq = p_ * e / q * vol;
    return e;
  };

  if (grid_.ndim() == 2) {
    const std::size_t s0 = grid_.stride(0), s1 = grid_.stride(1);
    const double ix = 1.0 / (2.0 * grid_.h(0)), iy = 1.0 / (2.0 * grid_.h(1));
    for (std::size_t i = 0; i + 1 < grid_.dim(0); ++i) {
      for (std::size_t j = 0; j + 1 < grid_.dim(1); ++j) {
        const std::size_t b = i * s0 + j * s1;
        const double u00 = u[b], u10 = u[b + s0], u01 = u[b + s1], u11 = u[b + s0 + s1];
        const double gx = ((u10 - u00) + (u11 - u01)) * ix;
        const double gy = ((u01 - u00) + (u11 - u10)) * iy;
        double dq = 0.0;
        energy += density(gx * gx + gy * gy + eps_sq_, dq);
        const double fx = dq * gx * ix, fy = dq * gy * iy;
        grad[b] += -fx - fy;
        grad[b + s0] += fx - fy;
        grad[b + s1] += -fx + fy;
        grad[b + s0 + s1] += fx + fy;
      }
    }
    return energy * vol;
  }

  const std::array<std::size_t, 3> s{grid_.stride(0), grid_.stride(1), grid_.stride(2)};
  for (std::size_t cell = 0; cell < grid_.cell_count(); ++cell) {
    const std::size_t base = grid_.index(grid_.cell_multi_index(cell));
    const auto g = cell_gradient(u, cell);
    double dq = 0.0;
    energy += density(g[0] * g[0] + g[1] * g[1] + g[2] * g[2] + eps_sq_, dq);
    for (std::size_t axis = 0; axis < 3; ++axis) {
      const double f = dq * g[axis] / (4.0 * grid_.h(axis));
      const std::size_t sa = s[axis], sb = s[(axis + 1) % 3], sc = s[(axis + 2) % 3];
      for (std::size_t off : {std::size_t{0}, sb, sc, sb + sc}) {
        grad[base + off + sa] += f;
        grad[base + off] -= f;
      }
    }
  }
  return energy * vol;
}

}  // namespace phasecap
