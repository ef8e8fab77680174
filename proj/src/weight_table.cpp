#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "phasecap/error.hpp"
#include "phasecap/fiber.hpp"

namespace phasecap {

WeightTable::WeightTable(double p, std::vector<WeightRow> rows) : p_(p), rows_(std::move(rows)) {
  if (!(p_ > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  if (rows_.empty()) fail(ErrorCode::InvalidArgument, "weight table needs at least one row");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.t)) fail(ErrorCode::InvalidArgument, "weight table level must be finite");
    if (i > 0 && !(r.t > rows_[i - 1].t)) {
      fail(ErrorCode::NonMonotone, "weight table levels must be strictly increasing");
    }
    if (!(r.S >= 0.0) || !(r.A >= 0.0) || !(r.w >= 0.0) || !std::isfinite(r.A) || !std::isfinite(r.S)) {
      fail(ErrorCode::InvalidArgument, "weight table rows need finite S >= 0, A >= 0 and w >= 0");
    }
  }
}

WeightTable WeightTable::synthetic(double p, const std::vector<double>& t,
                                   const std::vector<double>& A) {
  if (t.size() != A.size()) fail(ErrorCode::DimensionMismatch, "level and weight counts differ");
  std::vector<WeightRow> rows(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) rows[i] = {t[i], A[i], A[i], A[i]};
  return WeightTable(p, std::move(rows));
}

WeightTable WeightTable::synthetic(double p, const std::vector<double>& t,
                                   const std::function<double(double)>& weight) {
  std::vector<double> A(t.size());
  std::transform(t.begin(), t.end(), A.begin(), weight);
  return synthetic(p, t, A);
}

std::vector<double> WeightTable::levels() const {
  std::vector<double> t(rows_.size());
  std::transform(rows_.begin(), rows_.end(), t.begin(), [](const WeightRow& r) { return r.t; });
  return t;
}

std::optional<std::size_t> WeightTable::find_knot(double t) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(t_max() - t_min()));
  auto it = std::lower_bound(rows_.begin(), rows_.end(), t - tol,
                             [](const WeightRow& r, double x) { return r.t < x; });
  if (it != rows_.end() && std::abs(it->t - t) <= tol) {
    return static_cast<std::size_t>(it - rows_.begin());
  }
  return std::nullopt;
}

std::vector<double> uniform_levels(double lo, double hi, std::size_t count) {
  if (count < 2 || !(lo < hi)) fail(ErrorCode::InvalidArgument, "uniform levels need count >= 2 and lo < hi");
  std::vector<double> t(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = lo + step * static_cast<double>(i);
  t.back() = hi;
  return t;
}

std::vector<double> geometric_levels(double t0, double delta, std::size_t count,
                                     std::size_t per_octave) {
  if (count < 1 || per_octave < 1 || !(delta > 0.0)) {
    fail(ErrorCode::InvalidArgument, "geometric levels need count, per_octave >= 1 and delta > 0");
  }
  std::vector<double> t(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double e = -static_cast<double>(j) / static_cast<double>(per_octave);
    t[count - 1 - j] = t0 + delta * std::exp2(e);
  }
  return t;
}

WeightTable weight_table(const FiberExtractor& extractor, double p,
                         const std::vector<double>& levels, const std::optional<Region>& region,
                         unsigned threads) {
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) fail(ErrorCode::NonMonotone, "level grid must be strictly increasing");
  }
  const std::size_t n = levels.size();
  std::vector<WeightRow> rows(n);
  std::vector<std::uint8_t> nudged(n, 0);
  std::vector<std::string> errors(n);

  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      try {
        const FiberMesh mesh = extractor.extract(levels[i], region);
        WeightRow& r = rows[i];
        r.t = levels[i];
        r.S = fiber_size(mesh);
        r.A = energy_weight(mesh, p);
        r.w = pushforward_weight(mesh);
        nudged[i] = mesh.nudged;
        const double gmin = mesh.min_grad(), gmax = mesh.max_grad();
        const double lo = std::pow(gmin, p - 1.0) * r.S, hi = std::pow(gmax, p - 1.0) * r.S;
        const double slack = 1e-12 * std::max(hi, 1e-300);
        if (r.A < lo - slack || r.A > hi + slack) {
          errors[i] = "rowwise gradient bound violated at t=" + format_shortest(r.t);
        }
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    }
  };

  unsigned workers = threads ? threads : std::max(1U, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
  if (workers <= 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) fail(ErrorCode::InvalidArgument, errors[i]);
  }
  WeightTable table(p, std::move(rows));
  for (std::size_t i = 0; i < n; ++i) {
    if (nudged[i]) table.notes.push_back("level " + format_shortest(levels[i]) + " nudged by +eps_level");
  }
  return table;
}

WeightTable weight_table(const ScalarField& field, double p, const std::vector<double>& levels,
                         const std::optional<Region>& region, unsigned threads) {
  return weight_table(FiberExtractor(field), p, levels, region, threads);
}

CoareaCheck coarea_check(const ScalarField& field, double p,
                         const std::function<double(double)>& probe, std::size_t level_count,
                         const std::optional<LevelPair>& window) {
  if (!(p > 1.0)) fail(ErrorCode::InvalidArgument, "p must exceed 1");
  if (level_count < 1) fail(ErrorCode::InvalidArgument, "coarea check needs at least one level");
  const FiberExtractor extractor(field);
  double lo = extractor.min_value(), hi = extractor.max_value();
  if (window) {
    lo = std::max(lo, window->a);
    hi = std::min(hi, window->b);
  }
  if (!(lo < hi)) fail(ErrorCode::OutOfSpan, "coarea window misses the value range");

  auto g = [&](double t) {
    if (t < lo || t > hi) return 0.0;
    return std::pow(std::abs(probe(t)), p);
  };

  // Volume side: trapezoid rule over cells (node average per cell).
  const Grid& grid = field.grid();
  const VectorField& grad = extractor.gradient();
  std::vector<double> nodal(grid.node_count());
  for (std::size_t node = 0; node < grid.node_count(); ++node) {
    nodal[node] = g(field[node]) * std::pow(grad.norm_at(node), p);
  }
  const std::size_t corners = std::size_t{1} << grid.ndim();
  double volume = 0.0;
  for (std::size_t cell = 0; cell < grid.cell_count(); ++cell) {
    const std::size_t base = grid.index(grid.cell_multi_index(cell));
    double sum = 0.0;
    for (std::size_t c = 0; c < corners; ++c) {
      std::size_t node = base;
      for (std::size_t axis = 0; axis < grid.ndim(); ++axis) {
        if ((c >> axis) & 1U) node += grid.stride(axis);
      }
      sum += nodal[node];
    }
    volume += sum / static_cast<double>(corners);
  }
  volume *= grid.cell_volume();

  // Level side: midpoint rule.
  const double dt = (hi - lo) / static_cast<double>(level_count);
  double level = 0.0;
  for (std::size_t k = 0; k < level_count; ++k) {
    const double t = lo + (static_cast<double>(k) + 0.5) * dt;
    const double gt = g(t);
    if (gt == 0.0) continue;
    level += gt * energy_weight(extractor.extract(t), p);
  }
  level *= dt;

  CoareaCheck r;
  r.volume_side = volume;
  r.level_side = level;
  const double scale = std::max(std::abs(volume), std::abs(level));
  r.residual = scale > 0.0 ? std::abs(volume - level) / scale : 0.0;
  return r;
}

}  // namespace phasecap
