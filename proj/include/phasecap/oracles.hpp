#pragma once

#include <cstddef>

namespace phasecap::oracles {

/// Closed-form data for the three symmetric models.
struct ModelSpec {
  enum class Kind { Planar, Radial, Monomial };

  Kind kind = Kind::Planar;
  double p = 2.0;
  // planar: cross-section measure and levels
  double section = 1.0;
  double a = 0.0;
  double b = 1.0;
  // radial
  std::size_t n = 2;
  double r_e = 1.0;
  double r_f = 2.0;
  // monomial (section doubles as |D|)
  double gamma = 2.0;

  static ModelSpec planar(double section, double a, double b, double p);
  static ModelSpec radial(std::size_t n, double r_e, double r_f, double p);
  static ModelSpec monomial(double gamma, double section, double p);
};

/// Measure of the unit sphere S^{n-1}.
double sphere_measure(std::size_t n);

double planar_capacity(const ModelSpec& spec);

double radial_capacity(const ModelSpec& spec);

/// Exact weight 2 |D| gamma^{p-1} t^{(gamma-1)(p-1)/gamma} of |x_1|^gamma.
double monomial_weight(const ModelSpec& spec, double t);

/// Exponent (gamma-1)(p-1)/gamma of the monomial weight.
double monomial_exponent(const ModelSpec& spec);

/// Degeneracy exponent alpha = 1 - 1/gamma of the monomial phase.
double monomial_alpha(const ModelSpec& spec);

}  // namespace phasecap::oracles
