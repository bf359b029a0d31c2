#include "wigig/random.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wigig {

namespace {

const boost::math::normal kStdNormal{0.0, 1.0};

double phi(double z) { return boost::math::pdf(kStdNormal, z); }

// Probability mass of the standard normal on [a, b], computed on the side of the
// distribution where it does not cancel.
double mass(double a, double b) {
  if (a > 0.0) {
    return boost::math::cdf(boost::math::complement(kStdNormal, a)) -
           boost::math::cdf(boost::math::complement(kStdNormal, b));
  }
  return boost::math::cdf(kStdNormal, b) - boost::math::cdf(kStdNormal, a);
}

double truncated_mean(double location, double scale, double lo, double hi) {
  const double a = (lo - location) / scale;
  const double b = (hi - location) / scale;
  const double z = mass(a, b);
  if (!(z > 0.0)) {
    // All mass collapsed onto one bound.
    return location < lo ? lo : hi;
  }
  return location + scale * (phi(a) - phi(b)) / z;
}

}  // namespace

Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng{seq};
}

TruncatedNormal::TruncatedNormal(double location, double scale, double lo, double hi)
    : location_(location), scale_(scale), lo_(lo), hi_(hi) {
  if (!(lo <= hi) || !(scale >= 0.0) || !std::isfinite(location)) {
    throw std::invalid_argument("TruncatedNormal: need lo <= hi and scale >= 0");
  }
  if (scale_ > 0.0) {
    const double a = (lo_ - location_) / scale_;
    const double b = (hi_ - location_) / scale_;
    if (a > 0.0) {
      cdf_lo_ = boost::math::cdf(boost::math::complement(kStdNormal, a));
      cdf_hi_ = boost::math::cdf(boost::math::complement(kStdNormal, b));
    } else {
      cdf_lo_ = boost::math::cdf(kStdNormal, a);
      cdf_hi_ = boost::math::cdf(kStdNormal, b);
    }
  }
}

TruncatedNormal TruncatedNormal::from_mean_max(double mean, double max) {
  if (!(mean > 0.0) || !(max >= mean)) {
    throw std::invalid_argument("TruncatedNormal: need 0 < mean <= max");
  }
  const double scale = (max - mean) / 2.0;
  const double lo = mean / 4.0;
  if (scale == 0.0) {
    return TruncatedNormal{mean, 0.0, mean, mean};
  }
  // truncated_mean is increasing in the parent location.
  double left = lo - 15.0 * scale;
  double right = max + 15.0 * scale;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (left + right);
    if (truncated_mean(mid, scale, lo, max) < mean) {
      left = mid;
    } else {
      right = mid;
    }
  }
  return TruncatedNormal{0.5 * (left + right), scale, lo, max};
}

double TruncatedNormal::sample(Rng& rng) const {
  if (scale_ == 0.0 || lo_ == hi_) {
    return std::clamp(location_, lo_, hi_);
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const double p = cdf_lo_ + u * (cdf_hi_ - cdf_lo_);
  const bool upper_side = (lo_ - location_) / scale_ > 0.0;
  double z = 0.0;
  if (p <= 0.0 || p >= 1.0) {
    return u < 0.5 ? lo_ : hi_;
  }
  if (upper_side) {
    z = boost::math::quantile(boost::math::complement(kStdNormal, p));
  } else {
    z = boost::math::quantile(kStdNormal, p);
  }
  return std::clamp(location_ + scale_ * z, lo_, hi_);
}

double TruncatedNormal::mean() const {
  if (scale_ == 0.0 || lo_ == hi_) {
    return std::clamp(location_, lo_, hi_);
  }
  return truncated_mean(location_, scale_, lo_, hi_);
}

Triangular::Triangular(double lo, double mode, double hi) : lo_(lo), mode_(mode), hi_(hi) {
  if (!(lo <= mode && mode <= hi)) {
    throw std::invalid_argument("Triangular: need lo <= mode <= hi");
  }
}

double Triangular::sample(Rng& rng) const {
  if (lo_ == hi_) {
    return lo_;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const double split = (mode_ - lo_) / (hi_ - lo_);
  if (u < split) {
    return lo_ + std::sqrt(u * (hi_ - lo_) * (mode_ - lo_));
  }
  return hi_ - std::sqrt((1.0 - u) * (hi_ - lo_) * (hi_ - mode_));
}

}  // namespace wigig
