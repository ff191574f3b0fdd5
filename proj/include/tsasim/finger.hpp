#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "tsasim/tsa.hpp"

namespace tsasim {

inline constexpr int kJointCount = 3;
inline constexpr int kLinkCount = 4;
inline constexpr double kGravityMmPerS2 = 9806.65;  // 9.80665 m/s^2 in mm/s^2

/// Base orientation of the gripper during an experiment. Determines the
/// gravity direction in the finger's bending plane, where +x points along
/// the straight finger and positive joint angles curl counterclockwise.
enum class Orientation { VerticalUp, VerticalDown, HorizontalUp, HorizontalDown };

/// Gravity unit vector in the bending-plane frame for a given orientation.
std::array<double, 2> gravity_direction(Orientation o);

const char* to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

/// Pseudo-rigid-body parameters of one soft finger: three torsional-spring
/// joints cut into the silicone, four links, and two tendon channels
/// (frontal bending tendon, rear antagonistic tendon).
struct FingerParams {
  std::array<double, kJointCount> joint_stiffness_nmm_per_rad{26.0, 26.0, 26.0};
  double joint_max_angle_deg = 90.0;  // triangular cut closes at 90 deg
  /// Effective fraction of the nominal joint limit that is reachable; axial
  /// compression of the silicone shrinks the cut angles under tension.
  double bend_limit_scale = 230.6 / 270.0;
  std::array<double, kJointCount> frontal_arm_mm{5.2, 5.2, 5.2};
  std::array<double, kJointCount> rear_arm_mm{5.2, 5.2, 5.2};
  std::array<double, kLinkCount> link_length_mm{22.0, 20.0, 18.0, 14.0};
  std::array<double, kLinkCount> link_mass_g{2.8, 2.4, 2.0, 1.6};
  double tendon_friction_coeff = 0.05;

  /// Lumped lateral (off-axis) bending: one torsional spring at the base
  /// whose stiffness grows affinely with total tendon tension.
  double lateral_stiffness_nmm_per_rad = 210.0;
  double lateral_tension_gain_per_n = 0.25;

  double effective_joint_limit_rad() const;
  /// Tension transmission efficiency at joint `i` (0-based): (1-mu)^i.
  double transmission(int joint_index) const;
  void validate() const;
};

/// Quasi-static pose of one finger. `fingertip_angle_deg` is always the sum
/// of the joint angles; tendon displacements are derived from the pose.
struct FingerState {
  std::array<double, kJointCount> joint_angles_deg{0.0, 0.0, 0.0};
  double fingertip_angle_deg = 0.0;
  double frontal_displacement_mm = 0.0;
  double rear_displacement_mm = 0.0;
};

enum class Tendon { Frontal, Rear };

/// Tendon path-length change (mm) produced by a pose: sum of moment arm
/// times joint angle. Zero at the straight pose, linear in each angle.
double tendon_displacement(const FingerParams& params,
                           const std::array<double, kJointCount>& joint_angles_deg,
                           Tendon which);

/// Thrown when the torque-balance solve fails to converge.
struct NonConvergence : std::runtime_error {
  NonConvergence(int iterations_, double residual_nmm_);
  int iterations;
  double residual_nmm;
};

struct EquilibriumResult {
  FingerState state;
  int iterations = 0;
  double max_residual_nmm = 0.0;  // over unclamped joints
};

/// Solve the per-joint torque balance
///   T_f*arm_f*eta - T_r*arm_r*eta - k*phi - tau_gravity - tau_load = 0
/// for constant tendon tensions, with joint angles clamped to the effective
/// limits (clamped joints may carry residual torque). The external tip load
/// acts along -y of the bending plane (a weight hung from the fingertip).
EquilibriumResult equilibrium(const FingerParams& params, double frontal_tension_n,
                              double rear_tension_n, Orientation orientation,
                              double external_tip_load_n, int max_iterations = 200);

/// One tendon channel driven by a TSA through a series-elastic string whose
/// force law is quadratic in stretch (soft toe region, stiffening with
/// load): T(s) = elastic_coeff * s^2 for s > 0, else 0.
struct TendonDrive {
  TsaParams tsa;
  double elastic_coeff_n_per_mm2 = 0.89;
  double pre_stretch_mm = 0.8;  // strings are tied slightly taut
};

/// String tension at a given stretch (mm); zero when slack.
double string_tension(const TendonDrive& drive, double stretch_mm);
/// Incremental stiffness dT/ds (N/mm) of the string at a given stretch.
double string_stiffness(const TendonDrive& drive, double stretch_mm);

struct DriveCommand {
  double frontal_twist_rot = 0.0;
  double rear_twist_rot = 0.0;
  bool frontal_active = true;  // inactive TSA pays out freely: slack, zero tension
  bool rear_active = false;
};

struct DriveSolution {
  FingerState state;
  double frontal_tension_n = 0.0;
  double rear_tension_n = 0.0;
  int iterations = 0;
};

/// Twist-driven equilibrium: tendon tensions follow the series-elastic
/// string law at the commanded twists and the pose balances them. The
/// frontal stretch is x(twist)+pre-stretch-d_f(pose); the rear path
/// lengthens with curl, so its stretch is x(twist)+pre-stretch+d_r(pose).
DriveSolution solve_drive(const FingerParams& params, const TendonDrive& frontal,
                          const TendonDrive& rear, const DriveCommand& cmd,
                          Orientation orientation, double external_tip_load_n,
                          int max_iterations = 200);

/// Lateral (off-axis) inclination under a lateral tip load. The lumped
/// lateral spring stiffens with the total tendon tension (co-contraction).
double lateral_deflection(const FingerParams& params, double lateral_load_n,
                          double frontal_tension_n, double rear_tension_n);

/// Rate-independent play (backlash) operator with a decaying first-stroke
/// offset, reproducing the lonely-stroke behaviour of the soft finger. The
/// memory depends only on the input sequence, never on timing.
struct HysteresisParams {
  double play_width_deg = 10.0;      // full width between branches
  double lonely_stroke_offset_deg = 8.0;
  double decay_travel_deg = 460.0;   // cumulative input travel over which the offset fades
};

class HysteresisOperator {
 public:
  HysteresisOperator() = default;
  explicit HysteresisOperator(const HysteresisParams& params);

  /// Feed the next input sample; returns the operator output (degrees).
  double apply(double raw_alpha_deg);

  void reset();
  bool in_first_cycle() const { return travel_deg_ < params_.decay_travel_deg; }
  const HysteresisParams& params() const { return params_; }

 private:
  HysteresisParams params_{};
  bool primed_ = false;
  double last_input_deg_ = 0.0;
  double branch_memory_deg_ = 0.0;  // last play-operator output
  double travel_deg_ = 0.0;         // cumulative |input change|
};

}  // namespace tsasim
