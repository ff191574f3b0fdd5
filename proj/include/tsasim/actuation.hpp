#pragma once

#include <cstdint>

namespace tsasim {

/// Brushed DC gearmotor constants. The defaults model a 6 V micro gearmotor
/// with a 30:1 gearbox and a 12 CPR magnetic encoder (360 counts per output
/// rotation, 1 degree resolution).
struct MotorParams {
  double gear_ratio = 30.0;
  double encoder_counts_per_rev = 360.0;
  double stall_torque_nmm = 44.129925;  // 0.45 kg*cm
  double no_load_speed_rps = 32.5;
  double supply_voltage_v = 6.0;
  double time_constant_s = 0.02;

  void validate() const;
};

struct MotorState {
  double shaft_angle_rot = 0.0;
  double shaft_speed_rps = 0.0;
  double applied_voltage_v = 0.0;
};

/// Advance the motor by dt under a (resistive) load torque. Steady-state
/// speed is no_load*(V/Vs)*(1 - load/stall(V)), reached through a
/// first-order lag; the shaft angle integrates by the trapezoid rule. The
/// load torque always opposes motion and never back-drives a stopped shaft.
MotorState motor_step(const MotorParams& params, const MotorState& state, double voltage_v,
                      double load_torque_nmm, double dt_s);

/// Proportional position control: clamp(gain*(setpoint - measured), +-supply).
double p_control_motor(double setpoint_rot, double measured_rot, double gain_v_per_rot,
                       double supply_voltage_v);

/// Proportional control on a measured bending angle, in degrees.
double closed_loop_bend(double target_alpha_deg, double measured_alpha_deg, double gain_v_per_deg,
                        double supply_voltage_v);

/// Quantize a shaft angle to encoder counts (floor convention).
std::int64_t encoder_read(double shaft_angle_rot, double counts_per_rev = 360.0);
/// Angle reconstructed from a count value.
double encoder_angle(std::int64_t counts, double counts_per_rev = 360.0);

/// Fingertip IMU with a hard uniform error bound. Readings are a pure
/// function of (seed, sample_index), so replays are bit-identical.
struct ImuParams {
  double error_bound_deg = 2.5;
  std::uint64_t noise_seed = 0;
};

double imu_read(double true_angle_deg, const ImuParams& params, std::uint64_t sample_index);

/// SplitMix64-based uniform double in [0, 1); stable across platforms.
double seeded_uniform(std::uint64_t seed, std::uint64_t index);

}  // namespace tsasim
