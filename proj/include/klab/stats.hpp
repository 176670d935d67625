#ifndef KLAB_STATS_HPP
#define KLAB_STATS_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>

namespace klab {

/// Welford accumulator for mean and sample variance.
class RunningStats {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }

  /// Sample variance (n - 1 denominator); 0 for fewer than two values.
  double variance() const noexcept { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

  /// Standard error of the mean: sample sd / sqrt(n).
  double standard_error() const noexcept {
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Summary {
  std::string name;
  double estimate = 0.0;
  double standard_error = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::size_t trials = 0;
  std::size_t flagged_count = 0;
  std::optional<double> target;

  /// |estimate - target| <= k * standard_error (exact match required when the
  /// standard error is zero).
  bool within(double k) const {
    if (!target) return true;
    return std::abs(estimate - *target) <= k * standard_error;
  }
};

inline Summary summarize(std::string name, const RunningStats& stats, std::size_t flagged = 0,
                         std::optional<double> target = std::nullopt) {
  Summary s;
  s.name = std::move(name);
  s.estimate = stats.mean();
  s.standard_error = stats.standard_error();
  s.ci95_lo = s.estimate - 1.96 * s.standard_error;
  s.ci95_hi = s.estimate + 1.96 * s.standard_error;
  s.trials = stats.count();
  s.flagged_count = flagged;
  s.target = target;
  return s;
}

}  // namespace klab

#endif  // KLAB_STATS_HPP
