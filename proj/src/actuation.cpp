#include "tsasim/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tsasim {

void MotorParams::validate() const {
  if (!(stall_torque_nmm > 0.0)) {
    throw std::invalid_argument("motor.stall_torque_nmm must be > 0");
  }
  if (!(no_load_speed_rps > 0.0)) {
    throw std::invalid_argument("motor.no_load_speed_rps must be > 0");
  }
  if (!(supply_voltage_v > 0.0)) {
    throw std::invalid_argument("motor.supply_voltage_v must be > 0");
  }
  if (!(time_constant_s > 0.0)) {
    throw std::invalid_argument("motor.time_constant_s must be > 0");
  }
  if (!(gear_ratio > 0.0) || !(encoder_counts_per_rev > 0.0)) {
    throw std::invalid_argument("motor.gear_ratio and encoder_counts_per_rev must be > 0");
  }
}

MotorState motor_step(const MotorParams& p, const MotorState& state, double voltage_v,
                      double load_torque_nmm, double dt_s) {
  if (!(dt_s > 0.0)) {
    throw std::domain_error("dt must be > 0");
  }
  const double v = std::clamp(voltage_v, -p.supply_voltage_v, p.supply_voltage_v);
  const double duty = v / p.supply_voltage_v;
  const double load = std::max(load_torque_nmm, 0.0);

  // Torque and no-load speed both scale with voltage for a PM DC motor.
  double target = 0.0;
  if (duty != 0.0) {
    const double stall_at_v = p.stall_torque_nmm * std::abs(duty);
    if (load < stall_at_v) {
      const double sign = duty > 0.0 ? 1.0 : -1.0;
      target = p.no_load_speed_rps * duty - sign * p.no_load_speed_rps * load / p.stall_torque_nmm;
      if (target * sign < 0.0) target = 0.0;
    }
  }

  MotorState next = state;
  next.applied_voltage_v = v;
  const double blend = 1.0 - std::exp(-dt_s / p.time_constant_s);
  double speed = state.shaft_speed_rps + (target - state.shaft_speed_rps) * blend;
  // A resistive load cannot reverse the shaft: once the speed crosses zero
  // with no driving voltage, the shaft rests.
  if (target == 0.0 && state.shaft_speed_rps * speed < 0.0) speed = 0.0;
  speed = std::clamp(speed, -p.no_load_speed_rps, p.no_load_speed_rps);
  next.shaft_speed_rps = speed;
  next.shaft_angle_rot = state.shaft_angle_rot + 0.5 * (state.shaft_speed_rps + speed) * dt_s;
  return next;
}

double p_control_motor(double setpoint_rot, double measured_rot, double gain_v_per_rot,
                       double supply_voltage_v) {
  if (!(gain_v_per_rot > 0.0)) {
    throw std::domain_error("control gain must be > 0");
  }
  return std::clamp(gain_v_per_rot * (setpoint_rot - measured_rot), -supply_voltage_v,
                    supply_voltage_v);
}

double closed_loop_bend(double target_alpha_deg, double measured_alpha_deg, double gain_v_per_deg,
                        double supply_voltage_v) {
  if (!(gain_v_per_deg > 0.0)) {
    throw std::domain_error("control gain must be > 0");
  }
  return std::clamp(gain_v_per_deg * (target_alpha_deg - measured_alpha_deg), -supply_voltage_v,
                    supply_voltage_v);
}

std::int64_t encoder_read(double shaft_angle_rot, double counts_per_rev) {
  return static_cast<std::int64_t>(std::floor(shaft_angle_rot * counts_per_rev));
}

double encoder_angle(std::int64_t counts, double counts_per_rev) {
  return static_cast<double>(counts) / counts_per_rev;
}

double seeded_uniform(std::uint64_t seed, std::uint64_t index) {
  // SplitMix64 over a per-index stream position.
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double imu_read(double true_angle_deg, const ImuParams& params, std::uint64_t sample_index) {
  if (params.error_bound_deg == 0.0) return true_angle_deg;
  const double u = seeded_uniform(params.noise_seed, sample_index);
  return true_angle_deg + params.error_bound_deg * (2.0 * u - 1.0);
}

}  // namespace tsasim
