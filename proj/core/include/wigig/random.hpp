#pragma once

#include <cstdint>
#include <random>

namespace wigig {

using Rng = std::mt19937_64;

/// Independent stream for (seed, stream, index). Used to give every trial or
/// station its own generator so results do not depend on execution order.
Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t index = 0);

/// Normal distribution truncated to [lo, hi], sampled by inverse CDF.
class TruncatedNormal {
 public:
  TruncatedNormal(double location, double scale, double lo, double hi);

  /// Parameterization used for the measured timing tables: the truncated
  /// distribution has the given mean, scale (max - mean) / 2 and support
  /// [mean / 4, max]. The parent location is solved numerically so the mean of
  /// the *truncated* distribution equals `mean`.
  static TruncatedNormal from_mean_max(double mean, double max);

  double sample(Rng& rng) const;

  /// Analytic mean of the truncated distribution.
  double mean() const;

  double location() const noexcept { return location_; }
  double scale() const noexcept { return scale_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double location_;
  double scale_;
  double lo_;
  double hi_;
  double cdf_lo_ = 0.0;
  double cdf_hi_ = 1.0;
};

/// Triangular distribution on [lo, hi] with the given mode.
class Triangular {
 public:
  Triangular(double lo, double mode, double hi);
  double sample(Rng& rng) const;
  double mean() const noexcept { return (lo_ + mode_ + hi_) / 3.0; }

 private:
  double lo_;
  double mode_;
  double hi_;
};

}  // namespace wigig
