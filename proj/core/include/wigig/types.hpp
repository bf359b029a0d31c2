#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wigig {

/// Milliseconds on the scenario clock.
using TimeMs = std::int64_t;

using ApId = int;

/// Thrown for malformed configuration (bad files, bad keys, invariant violations in
/// user-supplied parameters). The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an input stream (trace CSV, sample feed) violates its contract.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normalized link quality reported by the WiGig API, on a 0..10 scale.
class SignalQuality {
 public:
  static constexpr double kMin = 0.0;
  static constexpr double kMax = 10.0;

  constexpr SignalQuality() = default;

  /// Throws std::out_of_range when value is outside [0, 10] or not finite.
  explicit SignalQuality(double value);

  static SignalQuality clamped(double value) noexcept;

  constexpr double value() const noexcept { return value_; }
  int quantized() const noexcept;

  friend constexpr auto operator<=>(SignalQuality, SignalQuality) = default;

 private:
  double value_ = 0.0;
};

enum class Scenario : int {
  Transient = 1,
  PermanentNoNlos = 2,
  PermanentWithNlos = 3,
};

/// Accepts 1/2/3 and the snake_case names used in config files.
Scenario scenario_from_id(int id);
Scenario parse_scenario(std::string_view text);
std::string_view to_string(Scenario s) noexcept;
constexpr int scenario_id(Scenario s) noexcept { return static_cast<int>(s); }

enum class Environment { IndoorCorridor, IndoorRoom, OutdoorOpen };

Environment parse_environment(std::string_view text);
std::string_view to_string(Environment e) noexcept;

/// Blockage statistics exist for two STA-AP distances only.
enum class DistanceBucket { Near3m = 0, Far7m = 1 };

DistanceBucket nearest_bucket(double distance_m) noexcept;
double bucket_distance_m(DistanceBucket b) noexcept;

}  // namespace wigig
