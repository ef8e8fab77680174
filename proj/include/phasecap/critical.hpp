#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "phasecap/fiber.hpp"
#include "phasecap/field.hpp"

namespace phasecap {

/// Power-law fit log y = intercept + slope * log(t - t0) over (t0, t0+delta].
struct LocalProfileFit {
  double t0 = 0.0;
  double delta = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 1.0;
  std::size_t rows = 0;
};

enum class Regime { Transmissive, Supercritical };

struct RegimeReport {
  double t0 = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double nu = 0.0;
  double p = 2.0;
  double criterion = 0.0;  // alpha + nu / (p - 1)
  Regime verdict = Regime::Transmissive;
  std::optional<double> local_resistance;  // +inf when divergent
};

std::string to_string(Regime regime);

/// Minimum number of window rows a fit needs.
inline constexpr std::size_t kMinFitRows = 8;

/// Slack on the divergence test s/(p-1) >= 1 for fitted slopes.
inline constexpr double kCriterionSlack = 1e-9;

/// Slope s = alpha (p-1) + nu of log A against log(t - t0).
LocalProfileFit fit_exponent(const WeightTable& table, double t0, double delta);

/// Slope nu of log S against log(t - t0).
LocalProfileFit fit_size_exponent(const WeightTable& table, double t0, double delta);

RegimeReport classify(double alpha, double nu, double p);

/// Integral of A^{-1/(p-1)} over (t0, t0+delta). When A vanishes at t0 (or the
/// table starts above t0) the piece below the first positive row is
/// integrated against the fitted power law and is +inf in the critical or
/// supercritical case.
double local_resistance(const WeightTable& table, double t0, double delta);

struct LojasiewiczResult {
  bool holds = false;
  double worst_margin = 0.0;  // min over nodes of |grad theta| - c0 |theta - t0|^alpha
  std::size_t witness = 0;
  std::array<double, 3> witness_position{0.0, 0.0, 0.0};
  std::size_t nodes_checked = 0;
};

LojasiewiczResult lojasiewicz_check(const ScalarField& field, const Region& region, double t0,
                                    double alpha, double c0);

/// Reduced capacities over (t0, t0+delta) for each delta.
std::vector<double> supercritical_vanishing(const WeightTable& table, double t0,
                                            const std::vector<double>& deltas);

}  // namespace phasecap
