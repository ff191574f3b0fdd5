#include "tsasim/thumb.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tsasim {

namespace {
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}

void ThumbParams::validate() const {
  finger.validate();
  bend_drive.tsa.validate();
  roll_drive.tsa.validate();
  if (roll_max_angle_deg != 90.0) {
    throw std::invalid_argument("thumb.roll_max_angle_deg must be 90");
  }
  if (!(roll_arm_mm > 0.0) || !(roll_stiffness_nmm_per_rad > 0.0)) {
    throw std::invalid_argument("thumb roll arm and stiffness must be > 0");
  }
  const auto& c = coupling;
  if (!(std::abs(c[0][0]) > std::abs(c[1][0]) && std::abs(c[0][0]) > std::abs(c[2][0]))) {
    throw std::invalid_argument("thumb.coupling bend column must be x-dominant");
  }
  if (!(std::abs(c[1][1]) > std::abs(c[0][1]) && std::abs(c[1][1]) > std::abs(c[2][1]))) {
    throw std::invalid_argument("thumb.coupling roll column must be y-dominant");
  }
  if (c[0][1] == 0.0 || c[2][1] == 0.0) {
    throw std::invalid_argument("thumb.coupling roll column needs nonzero x and z entries");
  }
}

double roll_gravity_factor(Orientation o) {
  switch (o) {
    case Orientation::VerticalUp: return -1.0;
    case Orientation::VerticalDown: return 1.0;
    case Orientation::HorizontalUp: return -0.35;
    case Orientation::HorizontalDown: return 0.35;
  }
  return 0.0;
}

ThumbPose thumb_pose(const ThumbParams& params, double bend_motor_twist_rot,
                     double roll_motor_twist_rot, Orientation orientation) {
  ThumbPose pose;

  DriveCommand cmd;
  cmd.frontal_twist_rot = bend_motor_twist_rot;
  cmd.frontal_active = bend_motor_twist_rot > 0.0;
  cmd.rear_active = false;
  const DriveSolution bend = solve_drive(params.finger, params.bend_drive, params.bend_drive, cmd,
                                         orientation, /*external_tip_load_n=*/0.0);
  pose.bend_angle_deg = bend.state.fingertip_angle_deg;

  // Roll joint: single torsional spring against the roll TSA, gravity term
  // scaled by orientation. Bisection on the joint angle; saturates at the
  // 90 degree hard stop.
  const double limit_rad = params.roll_max_angle_deg / kRadToDeg;
  const double grav = params.roll_gravity_nmm * roll_gravity_factor(orientation);
  const bool roll_active = roll_motor_twist_rot > 0.0;
  const double xr =
      roll_active ? contraction(params.roll_drive.tsa, roll_motor_twist_rot) +
                        params.roll_drive.pre_stretch_mm
                  : 0.0;
  auto torque = [&](double rho) {
    const double tension =
        roll_active ? string_tension(params.roll_drive, xr - params.roll_arm_mm * rho) : 0.0;
    return tension * params.roll_arm_mm - params.roll_stiffness_nmm_per_rad * rho + grav;
  };
  double roll_rad = 0.0;
  if (torque(0.0) <= 0.0) {
    roll_rad = 0.0;
  } else if (torque(limit_rad) >= 0.0) {
    roll_rad = limit_rad;  // pressed against the stop: exactly 90 deg
  } else {
    double lo = 0.0, hi = limit_rad;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (torque(mid) > 0.0 ? lo : hi) = mid;
    }
    roll_rad = 0.5 * (lo + hi);
  }
  pose.roll_angle_deg = roll_rad * kRadToDeg;

  const auto& c = params.coupling;
  pose.euler_x_deg = c[0][0] * pose.bend_angle_deg + c[0][1] * pose.roll_angle_deg;
  pose.euler_y_deg = c[1][0] * pose.bend_angle_deg + c[1][1] * pose.roll_angle_deg;
  pose.euler_z_deg = c[2][0] * pose.bend_angle_deg + c[2][1] * pose.roll_angle_deg;
  return pose;
}

}  // namespace tsasim
