#pragma once

// Independent reference computations for the test suite. Nothing here calls
// into the library's oracles module.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "phasecap/fiber.hpp"
#include "phasecap/field.hpp"

namespace support {

inline constexpr double kPi = 3.14159265358979323846;

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// |S^{n-1}| for n = 2, 3.
inline double sphere(int n) { return n == 2 ? 2.0 * kPi : 4.0 * kPi; }

// Resistance of the radial model: integral of (omega r^{n-1})^{-1/(p-1)} dr.
inline double radial_cap(int n, double p, double re, double rf) {
  const double q = 1.0 / (p - 1.0);
  const double R = simpson([&](double r) { return std::pow(sphere(n) * std::pow(r, n - 1), -q); }, re, rf, 20000);
  return std::pow(R, 1.0 - p);
}

inline phasecap::Grid unit_square(std::size_t n) { return phasecap::Grid::box({n, n}, {0.0, 0.0}, {1.0, 1.0}); }

inline phasecap::ScalarField field_from(const phasecap::Grid& g,
                                        const std::function<double(const std::array<double, 3>&)>& f) {
  std::vector<double> v(g.node_count());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.position(i));
  return phasecap::ScalarField(g, v);
}

// Random positive table on uniform levels in [0, 1].
inline phasecap::WeightTable random_table(std::mt19937_64& rng, double p, std::size_t n) {
  std::uniform_real_distribution<double> u(0.2, 5.0);
  std::vector<double> t(n), A(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    A[i] = u(rng);
  }
  return phasecap::WeightTable::synthetic(p, t, A);
}

}  // namespace support
