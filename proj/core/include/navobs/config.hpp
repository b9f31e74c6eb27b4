#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "navobs/observer.hpp"
#include "navobs/vehicle.hpp"

namespace navobs {

enum class ObserverSelection { Proposed, Adhoc, Both };
enum class SensorMode { Ranges, Gps };

struct InitialEstimate {
  Vec3 p = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  /// Rotation vector of R_hat(0).
  Vec3 attitude = Vec3::Zero();
  Vec3 b = Vec3::Zero();
};

struct RunConfig {
  ScenarioConfig scenario;
  GainParams gains;
  InitialEstimate initial;
  ObserverSelection observers = ObserverSelection::Both;
  SensorMode sensor_mode = SensorMode::Ranges;
  std::string output_dir = "out";
  /// Reserved for optional sensor noise; the default scenario is noise-free.
  std::uint64_t seed = 0;
  /// Attitude-error level of the invariant set used by the gain-bound calculator.
  double epsilon = 0.8;
  std::optional<double> mu;
  std::size_t monitor_decimation = 10;
  /// Reject configurations violating the theoretical conditions (c_hat2 > sqrt(8) c2,
  /// non-collinear m_I and a_I) instead of only reporting them.
  bool strict_theory = false;
};

/**
 * Parses the JSON configuration text. Omitted fields keep their defaults.
 * Throws ParseError on malformed text and ValidationError on unknown keys
 * or mistyped values. Does not run semantic validation.
 */
RunConfig parse_config(std::string_view text);

/// Semantic validation; throws ValidationError naming the offending field.
/// Fills gains.c5 with 1.05 ||b_omega|| when it was left at zero.
void validate_config(RunConfig& cfg);

/// parse_config + validate_config.
RunConfig load_config(std::string_view text);

/// Reads and loads a config file. Throws IoError if it cannot be read.
RunConfig load_config_file(const std::filesystem::path& path);

const char* to_string(ObserverSelection sel);
const char* to_string(SensorMode mode);
std::optional<ObserverSelection> parse_observer_selection(std::string_view s);

}  // namespace navobs
