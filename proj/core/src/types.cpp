#include "wigig/types.hpp"

#include <cmath>
#include <stdexcept>

namespace wigig {

SignalQuality::SignalQuality(double value) : value_(value) {
  if (!std::isfinite(value) || value < kMin || value > kMax) {
    throw std::out_of_range("signal quality " + std::to_string(value) + " outside [0, 10]");
  }
}

SignalQuality SignalQuality::clamped(double value) noexcept {
  SignalQuality q;
  q.value_ = std::isfinite(value) ? std::fmin(kMax, std::fmax(kMin, value)) : kMin;
  return q;
}

int SignalQuality::quantized() const noexcept { return static_cast<int>(std::lround(value_)); }

Scenario scenario_from_id(int id) {
  switch (id) {
    case 1: return Scenario::Transient;
    case 2: return Scenario::PermanentNoNlos;
    case 3: return Scenario::PermanentWithNlos;
    default: break;
  }
  throw std::invalid_argument("unknown blockage scenario id " + std::to_string(id));
}

Scenario parse_scenario(std::string_view text) {
  if (text == "1" || text == "transient") return Scenario::Transient;
  if (text == "2" || text == "permanent_no_nlos") return Scenario::PermanentNoNlos;
  if (text == "3" || text == "permanent_with_nlos") return Scenario::PermanentWithNlos;
  throw std::invalid_argument("unknown blockage scenario '" + std::string(text) + "'");
}

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::Transient: return "transient";
    case Scenario::PermanentNoNlos: return "permanent_no_nlos";
    case Scenario::PermanentWithNlos: return "permanent_with_nlos";
  }
  return "?";
}

Environment parse_environment(std::string_view text) {
  if (text == "indoor_corridor") return Environment::IndoorCorridor;
  if (text == "indoor_room") return Environment::IndoorRoom;
  if (text == "outdoor_open") return Environment::OutdoorOpen;
  throw std::invalid_argument("unknown environment '" + std::string(text) + "'");
}

std::string_view to_string(Environment e) noexcept {
  switch (e) {
    case Environment::IndoorCorridor: return "indoor_corridor";
    case Environment::IndoorRoom: return "indoor_room";
    case Environment::OutdoorOpen: return "outdoor_open";
  }
  return "?";
}

DistanceBucket nearest_bucket(double distance_m) noexcept {
  return std::fabs(distance_m - 3.0) <= std::fabs(distance_m - 7.0) ? DistanceBucket::Near3m
                                                                     : DistanceBucket::Far7m;
}

double bucket_distance_m(DistanceBucket b) noexcept {
  return b == DistanceBucket::Near3m ? 3.0 : 7.0;
}

}  // namespace wigig
