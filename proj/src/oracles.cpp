#include "phasecap/oracles.hpp"

#include <cmath>
#include <numbers>

#include "phasecap/error.hpp"

namespace phasecap::oracles {

ModelSpec ModelSpec::planar(double section, double a, double b, double p) {
  if (!(a < b) || !(section > 0.0) || !(p > 1.0)) {
    fail(ErrorCode::InvalidArgument, "planar model needs a < b, |D| > 0, p > 1");
  }
  ModelSpec s;
  s.kind = Kind::Planar;
  s.section = section;
  s.a = a;
  s.b = b;
  s.p = p;
  return s;
}

ModelSpec ModelSpec::radial(std::size_t n, double r_e, double r_f, double p) {
  if (!(0.0 < r_e && r_e < r_f) || n < 1 || !(p > 1.0)) {
    fail(ErrorCode::InvalidArgument, "radial model needs 0 < r_E < r_F, n >= 1, p > 1");
  }
  ModelSpec s;
  s.kind = Kind::Radial;
  s.n = n;
  s.r_e = r_e;
  s.r_f = r_f;
  s.p = p;
  return s;
}

ModelSpec ModelSpec::monomial(double gamma, double section, double p) {
  if (!(gamma > 1.0) || !(section > 0.0) || !(p > 1.0)) {
    fail(ErrorCode::InvalidArgument, "monomial model needs gamma > 1, |D| > 0, p > 1");
  }
  ModelSpec s;
  s.kind = Kind::Monomial;
  s.gamma = gamma;
  s.section = section;
  s.p = p;
  return s;
}

double sphere_measure(std::size_t n) {
  const double half = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double planar_capacity(const ModelSpec& spec) {
  return spec.section * std::pow(spec.b - spec.a, 1.0 - spec.p);
}

double radial_capacity(const ModelSpec& spec) {
  const double p = spec.p;
  const double n = static_cast<double>(spec.n);
  const double omega = sphere_measure(spec.n);
  if (std::abs(p - n) < 1e-12) {
    return omega * std::pow(std::log(spec.r_f / spec.r_e), 1.0 - p);
  }
  const double q = (p - n) / (p - 1.0);
  const double bracket = (p - 1.0) / (p - n) * (std::pow(spec.r_f, q) - std::pow(spec.r_e, q));
  return omega * std::pow(bracket, 1.0 - p);
}

double monomial_exponent(const ModelSpec& spec) {
  return (spec.gamma - 1.0) * (spec.p - 1.0) / spec.gamma;
}

double monomial_alpha(const ModelSpec& spec) { return 1.0 - 1.0 / spec.gamma; }

double monomial_weight(const ModelSpec& spec, double t) {
  if (!(t > 0.0)) fail(ErrorCode::InvalidArgument, "monomial weight needs t > 0");
  return 2.0 * spec.section * std::pow(spec.gamma, spec.p - 1.0) * std::pow(t, monomial_exponent(spec));
}

}  // namespace phasecap::oracles
