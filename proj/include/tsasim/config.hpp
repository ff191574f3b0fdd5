#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "tsasim/actuation.hpp"
#include "tsasim/finger.hpp"
#include "tsasim/thumb.hpp"

namespace tsasim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ControllerParams {
  double position_gain_v_per_rot = 10.0;
  double bend_gain_v_per_deg = 0.5;
  double sample_period_s = 0.01;
  /// Allowed steady-state gap between command and encoder angle; proportional
  /// control against a loaded, non-backdriving transmission leaves a small
  /// droop of load*supply/(stall*gain).
  double theta_tolerance_rot = 0.15;
};

struct ProtocolDefaults {
  double staircase_peak_rot = 26.0;
  std::array<double, 2> blocked_setpoints_rot{13.0, 26.0};
};

/// Full parameter set of the gripper: four fingers, the two-actuator thumb,
/// one TSA drive per tendon channel (eleven motors in total: four finger
/// primaries, four finger antagonists, thumb bend, thumb roll, thumb
/// antagonist), motor and sensor constants, and controller gains.
struct GripperConfig {
  GripperConfig();

  std::string name = "default-gripper";
  std::array<double, 2> footprint_mm{106.0, 106.0};
  double total_length_mm = 295.0;

  std::array<FingerParams, 4> fingers{};
  std::array<TendonDrive, 4> finger_primary{};
  std::array<TendonDrive, 4> finger_antag{};
  HysteresisParams hysteresis{};
  ThumbParams thumb{};
  TendonDrive thumb_antag{};
  MotorParams motor{};
  ImuParams imu{};
  ControllerParams control{};
  ProtocolDefaults protocol{};

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parse a key = value configuration tree. Unknown keys and malformed
/// values raise ConfigError with the key name; keys not present keep their
/// defaults. '#' starts a comment.
GripperConfig parse_config(const std::string& text);
GripperConfig load_config(const std::string& path);

/// Canonical serialization: every key, fixed order, %.17g numbers (so that
/// parse(serialize(c)) == c exactly). `header_comment` lines are emitted
/// with a leading "# ".
std::string serialize_config(const GripperConfig& config, const std::string& header_comment = "");
void save_config(const GripperConfig& config, const std::string& path,
                 const std::string& header_comment = "");

/// FNV-1a digest of the canonical serialization, as 16 hex characters.
std::string config_hash(const GripperConfig& config);

bool config_equal(const GripperConfig& a, const GripperConfig& b);

}  // namespace tsasim
