#include "tsasim/calibrate.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tsasim/experiments.hpp"
#include "tsasim/finger.hpp"

namespace tsasim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double hold_torque_nmm(const GripperConfig& cfg, double twist) {
  DriveCommand cmd{twist, 0.0, true, false};
  const DriveSolution sol = solve_drive(cfg.fingers[0], cfg.finger_primary[0],
                                        cfg.finger_antag[0], cmd, Orientation::VerticalUp, 0.0);
  return sol.frontal_tension_n * linear_jacobian(cfg.finger_primary[0].tsa, twist) / kTwoPi;
}

void set_zone_length(GripperConfig& cfg, double length_mm) {
  auto apply = [length_mm](TendonDrive& d) {
    d.tsa.twist_zone_length_mm = length_mm;
    d.tsa.max_twist_rot = 0.95 * d.tsa.singularity_twist_rot();
  };
  for (int i = 0; i < 4; ++i) {
    apply(cfg.finger_primary[i]);
    apply(cfg.finger_antag[i]);
  }
  apply(cfg.thumb.bend_drive);
  apply(cfg.thumb.roll_drive);
  apply(cfg.thumb_antag);
}

void scale_arms(GripperConfig& cfg, double scale) {
  auto apply = [scale](FingerParams& f) {
    for (int i = 0; i < kJointCount; ++i) {
      f.frontal_arm_mm[i] *= scale;
      f.rear_arm_mm[i] *= scale;
    }
  };
  for (auto& f : cfg.fingers) apply(f);
  apply(cfg.thumb.finger);
  cfg.thumb.roll_arm_mm *= scale;
}

void scale_stiffness(GripperConfig& cfg, double scale) {
  auto apply = [scale](FingerParams& f) {
    for (auto& k : f.joint_stiffness_nmm_per_rad) k *= scale;
  };
  for (auto& f : cfg.fingers) apply(f);
  apply(cfg.thumb.finger);
  cfg.thumb.roll_stiffness_nmm_per_rad *= scale;
}

bool force_met(double value, const CalibrationTargets& t) {
  return !t.blocked_force_n ||
         std::abs(value - *t.blocked_force_n) <= t.force_rel_tolerance * *t.blocked_force_n;
}

bool bend_met(double value, const CalibrationTargets& t) {
  return !t.max_bend_deg ||
         std::abs(value - *t.max_bend_deg) <= t.bend_rel_tolerance * *t.max_bend_deg;
}

}  // namespace

double evaluate_max_bend_deg(const GripperConfig& cfg) {
  const double peak = std::min(cfg.protocol.staircase_peak_rot,
                               cfg.finger_primary[0].tsa.max_twist_rot * 0.999);
  // The motor stalls on the way up if the holding torque outgrows the stall
  // torque; find the twist it actually reaches.
  double reach = peak;
  if (hold_torque_nmm(cfg, peak) > cfg.motor.stall_torque_nmm) {
    double lo = 0.0, hi = peak;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      (hold_torque_nmm(cfg, mid) > cfg.motor.stall_torque_nmm ? hi : lo) = mid;
    }
    reach = lo;
  }
  DriveCommand cmd{reach, 0.0, true, false};
  return solve_drive(cfg.fingers[0], cfg.finger_primary[0], cfg.finger_antag[0], cmd,
                     Orientation::VerticalUp, 0.0)
      .state.fingertip_angle_deg;
}

CalibrationResult calibrate(const GripperConfig& input, const CalibrationTargets& targets) {
  CalibrationResult result;
  result.config = input;
  std::ostringstream notes;

  if (bend_met(evaluate_max_bend_deg(input), targets) &&
      force_met(blocked_force(input), targets)) {
    result.changed = false;
    return result;  // fixed point: targets already satisfied
  }

  GripperConfig& cfg = result.config;
  for (int outer = 0; outer < 4; ++outer) {
    if (targets.blocked_force_n && !force_met(blocked_force(cfg), targets)) {
      // Blocked force grows with the twisting-zone length (slower jacobian
      // at the final setpoint means more stall tension).
      double lo = 62.0, hi = 320.0;
      GripperConfig probe = cfg;
      set_zone_length(probe, lo);
      const double flo = blocked_force(probe);
      set_zone_length(probe, hi);
      const double fhi = blocked_force(probe);
      if ((*targets.blocked_force_n - flo) * (*targets.blocked_force_n - fhi) > 0.0) {
        throw CalibrationError("blocked-force target unreachable within zone-length bounds");
      }
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        set_zone_length(probe, mid);
        (blocked_force(probe) < *targets.blocked_force_n ? lo : hi) = mid;
      }
      set_zone_length(cfg, 0.5 * (lo + hi));
      notes << "twisting-zone length set to " << 0.5 * (lo + hi) << " mm\n";
    }

    if (targets.max_bend_deg && !bend_met(evaluate_max_bend_deg(cfg), targets)) {
      // Shrinking the moment arms raises the bend reached from a fixed
      // contraction budget; find the largest scale that still saturates.
      const double target = *targets.max_bend_deg;
      double lo = 0.2, hi = 3.0;
      auto bend_at = [&](double scale) {
        GripperConfig probe = cfg;
        scale_arms(probe, scale);
        return evaluate_max_bend_deg(probe);
      };
      if (bend_at(lo) < target * (1.0 - targets.bend_rel_tolerance)) {
        // Even tiny arms fail: the joints are too stiff to saturate.
        double slo = 0.01, shi = 1.0;
        GripperConfig probe = cfg;
        for (int i = 0; i < 40; ++i) {
          const double mid = 0.5 * (slo + shi);
          probe = cfg;
          scale_stiffness(probe, mid);
          (evaluate_max_bend_deg(probe) < target * (1.0 - targets.bend_rel_tolerance) ? shi
                                                                                      : slo) = mid;
        }
        scale_stiffness(cfg, slo);
        notes << "joint stiffness scaled by " << slo << "\n";
      }
      for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (bend_at(mid) < target * (1.0 - 1e-4) ? hi : lo) = mid;
      }
      const double scale = 0.95 * lo;  // keep a saturation margin
      scale_arms(cfg, scale);
      notes << "moment arms scaled by " << scale << "\n";
    }

    if (bend_met(evaluate_max_bend_deg(cfg), targets) && force_met(blocked_force(cfg), targets)) {
      result.changed = true;
      result.notes = notes.str();
      return result;
    }
  }
  throw CalibrationError("calibration targets not reachable within parameter bounds");
}

}  // namespace tsasim
