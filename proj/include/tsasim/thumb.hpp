#pragma once

#include <array>

#include "tsasim/finger.hpp"

namespace tsasim {

/// Two-actuator thumb: a bend chain identical to a finger plus a roll joint
/// at the base, both TSA-driven. The measured Euler angles couple both
/// actuations through a constant 3x2 gain matrix.
struct ThumbParams {
  FingerParams finger;
  TendonDrive bend_drive;
  TendonDrive roll_drive;

  double roll_arm_mm = 5.2;
  double roll_stiffness_nmm_per_rad = 30.0;
  double roll_max_angle_deg = 90.0;
  /// The roll chain is far more gravity-sensitive than the bend chain; this
  /// torque is scaled by an orientation factor and applied at the roll joint.
  double roll_gravity_nmm = 14.0;

  /// Rows x/y/z, columns (bend, roll): euler = coupling * (bend, roll).
  std::array<std::array<double, 2>, 3> coupling{{{0.92, 0.22}, {0.14, 0.88}, {0.08, 0.18}}};

  void validate() const;
};

struct ThumbPose {
  double euler_x_deg = 0.0;
  double euler_y_deg = 0.0;
  double euler_z_deg = 0.0;
  double bend_angle_deg = 0.0;  // fingertip angle of the bend chain
  double roll_angle_deg = 0.0;  // roll joint output, clamped to [0, 90]
};

/// Multiplier applied to roll_gravity_nmm per orientation (signed: positive
/// assists the roll).
double roll_gravity_factor(Orientation o);

/// Solve the thumb pose for commanded motor twists. An inactive motor
/// (twist exactly 0) leaves its string slack.
ThumbPose thumb_pose(const ThumbParams& params, double bend_motor_twist_rot,
                     double roll_motor_twist_rot, Orientation orientation);

}  // namespace tsasim
