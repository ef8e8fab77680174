#pragma once

#include <cmath>
#include <vector>

namespace phasecap {

/// Exact floating-point accumulator (Shewchuk expansion, as in fsum). The
/// represented sum is exact, so result() is correctly rounded and does not
/// depend on the order in which terms were added.
class ExactSum {
 public:
  ExactSum& add(double x) {
    if (!std::isfinite(x)) {
      special_ += x;
      return *this;
    }
    std::size_t kept = 0;
    for (double y : partials_) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials_[kept++] = lo;
      x = hi;
    }
    partials_.resize(kept);
    partials_.push_back(x);
    return *this;
  }

  ExactSum& operator+=(double x) { return add(x); }
  ExactSum& operator-=(double x) { return add(-x); }

  double result() const {
    if (special_ != 0.0 || std::isnan(special_)) return special_;
    if (partials_.empty()) return 0.0;
    // Round the expansion from the top, with the half-way correction used by fsum.
    std::size_t n = partials_.size();
    double hi = partials_[--n];
    double lo = 0.0;
    while (n > 0) {
      const double x = hi;
      const double y = partials_[--n];
      hi = x + y;
      const double yr = hi - x;
      lo = y - yr;
      if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
      const double y = lo * 2.0;
      const double x = hi + y;
      if (y == x - hi) hi = x;
    }
    return hi;
  }

 private:
  std::vector<double> partials_;
  double special_ = 0.0;
};

}  // namespace phasecap
