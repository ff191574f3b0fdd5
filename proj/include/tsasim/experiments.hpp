#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tsasim/config.hpp"
#include "tsasim/run.hpp"

namespace tsasim {

/// Staircase of motor-angle setpoints: up to the peak and back down in
/// fixed steps, each held long enough to reach steady state.
struct StaircasePosition {
  double step_rot = 2.0;
  double hold_s = 5.0;
  int cycles = 4;
  double peak_rot = 26.0;
};

struct RandomSetpoints {
  int count_per_cycle = 20;
  int cycles = 4;
  double peak_rot = 26.0;
  double hold_s = 5.0;
};

/// Fingertip pressed against a rigid stop while the motor is driven to the
/// listed setpoints.
struct BlockedForce {
  std::array<double, 2> setpoints_rot{13.0, 26.0};
  double hold_s = 5.0;
};

/// Hold the proximal bending angle constant under increasing hanging mass
/// by adjusting the motor angle.
struct ConstantDeflection {
  std::vector<double> masses_g{0, 100, 200, 300, 400, 500};
  double tolerance_deg = 1.0;
};

/// Antagonistic stiffness tuning: pre-twist the primary TSA, rebalance the
/// bending angle with the antagonist, then load and unload the fingertip.
struct StiffnessTuning {
  std::vector<double> pretwists_rot{0, 8, 10, 15};
  std::vector<double> masses_g{0, 60, 100, 120, 140, 160, 200};
  double hold_s = 30.0;
  int cycles = 2;
};

struct LateralStiffness {
  std::vector<double> loads_n{0.0, 0.1, 0.2, 0.5, 1.0};
  std::vector<double> pretwists_rot{0, 3, 9};
  double hold_s = 2.0;
};

/// Staircase variant with larger steps so slews are long enough for the
/// velocity analysis.
struct VelocityTest {
  double step_rot = 6.5;
  double hold_s = 2.0;
  int cycles = 1;
  double peak_rot = 26.0;
};

using Protocol = std::variant<StaircasePosition, RandomSetpoints, BlockedForce, ConstantDeflection,
                              StiffnessTuning, LateralStiffness, VelocityTest>;

/// Build a protocol from its CLI name, with peaks taken from the config.
Protocol protocol_from_name(const std::string& name, const GripperConfig& config);
std::string protocol_name(const Protocol& protocol);
std::vector<std::string> protocol_names();

/// A solve failure inside a protocol, annotated with the failing sample.
struct SimulationError : std::runtime_error {
  SimulationError(const std::string& what, std::size_t sample_index_);
  std::size_t sample_index;
};

/// Thrown by constant_deflection when a mass cannot be held within the
/// actuator limits.
struct Unreachable : std::runtime_error {
  explicit Unreachable(double mass_g_);
  double mass_g;
};

/// Execute one protocol on one finger. Deterministic in (config, protocol,
/// orientation, seed): replays are byte-identical.
Run run_protocol(const GripperConfig& config, const Protocol& protocol, Orientation orientation,
                 std::uint64_t seed, int finger_index = 0);

/// Peak fingertip normal force with the finger kinematically blocked and
/// the motor stalled at its final setpoint. Statics of the distal link give
/// force = tension * arm_3 * eta_3 / l_4; the tension is the stall-torque
/// bound at that twist, so the result is proportional to the stall torque.
double blocked_force(const GripperConfig& config);

struct DeflectionPoint {
  double mass_g = 0.0;
  double theta_required_rot = 0.0;
};

/// For each hanging mass, the motor angle that restores the proximal
/// bending angle to its unloaded value within the tolerance. Solved
/// quasi-statically (hysteresis reset), so the mapping is order-free.
std::vector<DeflectionPoint> constant_deflection(const GripperConfig& config,
                                                 const std::vector<double>& masses_g,
                                                 double tolerance_deg,
                                                 Orientation orientation = Orientation::HorizontalUp,
                                                 int finger_index = 0);

struct StiffnessPoint {
  double pretwist_rot = 0.0;
  double antagonist_twist_rot = 0.0;
  double k_alpha_n_per_deg = 0.0;
};

/// Full antagonistic stiffness procedure per pre-twist; the stiffness comes
/// from the second loading cycle (the first is the lonely stroke). When
/// runs_out is given, the per-pre-twist runs are appended to it.
std::vector<StiffnessPoint> stiffness_sweep(const GripperConfig& config,
                                            const StiffnessTuning& protocol,
                                            Orientation orientation, std::uint64_t seed,
                                            std::vector<Run>* runs_out = nullptr,
                                            int finger_index = 0);

struct LateralPoint {
  double pretwist_rot = 0.0;
  double k_lateral_n_per_deg = 0.0;
  double r_squared = 0.0;
};

std::vector<LateralPoint> lateral_stiffness_sweep(const GripperConfig& config,
                                                  const LateralStiffness& protocol,
                                                  int finger_index = 0);

}  // namespace tsasim
