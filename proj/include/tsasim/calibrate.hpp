#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "tsasim/config.hpp"

namespace tsasim {

struct CalibrationTargets {
  std::optional<double> max_bend_deg;    // peak fingertip angle at the staircase peak
  std::optional<double> blocked_force_n;
  double bend_rel_tolerance = 0.05;
  double force_rel_tolerance = 0.15;
};

struct CalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CalibrationResult {
  GripperConfig config;
  bool changed = false;
  std::string notes;  // one line per adjusted parameter
};

/// Peak fingertip angle the finger reaches when driven to the staircase
/// peak twist (motor-stall limited), VerticalUp, quasi-static.
double evaluate_max_bend_deg(const GripperConfig& config);

/// Bracketed scalar searches on the free parameters (twisting-zone length,
/// moment-arm scale, joint-stiffness scale) until every target is met
/// within its tolerance. A config that already satisfies the targets is
/// returned unchanged. Throws CalibrationError when a target cannot be met
/// within the parameter bounds.
CalibrationResult calibrate(const GripperConfig& input, const CalibrationTargets& targets);

}  // namespace tsasim
