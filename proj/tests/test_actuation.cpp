#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tsasim/actuation.hpp"

using namespace tsasim;

namespace {
const MotorParams kMotor{};
constexpr double kDt = 0.01;
}

TEST_CASE("first-order settling to no-load speed") {
  MotorState s{};
  const double t_end = 5.0 * kMotor.time_constant_s;
  for (double t = 0.0; t < t_end; t += kDt) {
    s = motor_step(kMotor, s, kMotor.supply_voltage_v, 0.0, kDt);
  }
  CHECK(s.shaft_speed_rps == doctest::Approx(kMotor.no_load_speed_rps).epsilon(0.01));
  CHECK(s.shaft_speed_rps <= kMotor.no_load_speed_rps);
}

TEST_CASE("stall: speed collapses when load reaches the stall torque") {
  MotorState s{};
  for (int i = 0; i < 200; ++i) {
    s = motor_step(kMotor, s, kMotor.supply_voltage_v, kMotor.stall_torque_nmm, kDt);
  }
  CHECK(s.shaft_speed_rps == doctest::Approx(0.0));
  // Half supply halves the available torque.
  MotorState h{};
  for (int i = 0; i < 200; ++i) {
    h = motor_step(kMotor, h, 0.5 * kMotor.supply_voltage_v, 0.6 * kMotor.stall_torque_nmm, kDt);
  }
  CHECK(h.shaft_speed_rps == doctest::Approx(0.0));
}

TEST_CASE("coast-down: zero voltage decays the speed, angle freezes") {
  MotorState s{};
  for (int i = 0; i < 300; ++i) s = motor_step(kMotor, s, kMotor.supply_voltage_v, 0.0, kDt);
  for (int i = 0; i < 500; ++i) s = motor_step(kMotor, s, 0.0, 0.0, kDt);
  CHECK(std::abs(s.shaft_speed_rps) < 1e-6);
  const double angle = s.shaft_angle_rot;
  for (int i = 0; i < 100; ++i) s = motor_step(kMotor, s, 0.0, 0.0, kDt);
  CHECK(s.shaft_angle_rot == doctest::Approx(angle).epsilon(1e-9));
}

TEST_CASE("motor never exceeds no-load speed or moves against stall") {
  MotorState s{};
  for (int i = 0; i < 400; ++i) {
    const double v = (i % 3 == 0 ? 1.0 : -1.0) * kMotor.supply_voltage_v * 1.5;  // clamped
    const double load = (i % 5) * 0.3 * kMotor.stall_torque_nmm;
    s = motor_step(kMotor, s, v, load, kDt);
    CHECK(std::abs(s.shaft_speed_rps) <= kMotor.no_load_speed_rps + 1e-12);
    CHECK(std::abs(s.applied_voltage_v) <= kMotor.supply_voltage_v);
  }
}

TEST_CASE("p control clamps to the supply") {
  CHECK(p_control_motor(5.0, 5.0, 10.0, 6.0) == 0.0);
  CHECK(p_control_motor(2.0, 0.0, 10.0, 6.0) == 6.0);
  CHECK(p_control_motor(0.0, 2.0, 10.0, 6.0) == -6.0);
  CHECK(p_control_motor(1.0, 0.9, 10.0, 6.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(p_control_motor(1.0, 0.0, -1.0, 6.0), std::domain_error);
}

TEST_CASE("closed loop reaches a 2-rotation step quickly and precisely") {
  MotorState s{};
  const double gain = 10.0;
  double settle_time = -1.0;
  for (int i = 0; i < 500; ++i) {  // 5 s
    const double measured = encoder_angle(encoder_read(s.shaft_angle_rot));
    const double v = p_control_motor(2.0, measured, gain, kMotor.supply_voltage_v);
    s = motor_step(kMotor, s, v, 0.0, kDt);
    if (settle_time < 0.0 && std::abs(s.shaft_angle_rot - 2.0) < 0.02) {
      settle_time = (i + 1) * kDt;
    }
  }
  CHECK(settle_time > 0.0);
  CHECK(settle_time < 1.0);  // well under the 5 s hold
  CHECK(std::abs(s.shaft_angle_rot - 2.0) < 0.01);
}

TEST_CASE("staircase tracking settles each step within 0.01 rot") {
  MotorState s{};
  const double gain = 10.0;
  for (double setpoint = 2.0; setpoint <= 10.0; setpoint += 2.0) {
    for (int i = 0; i < 500; ++i) {
      const double measured = encoder_angle(encoder_read(s.shaft_angle_rot));
      s = motor_step(kMotor, s, p_control_motor(setpoint, measured, gain, 6.0), 0.0, kDt);
    }
    CHECK(std::abs(s.shaft_angle_rot - setpoint) < 0.01);
  }
}

TEST_CASE("bend control sign convention") {
  CHECK(closed_loop_bend(30.0, 30.0, 0.5, 6.0) == 0.0);
  // Measurement above target: untwisting-direction (negative) voltage.
  CHECK(closed_loop_bend(30.0, 40.0, 0.5, 6.0) < 0.0);
  CHECK(closed_loop_bend(30.0, 10.0, 0.5, 6.0) > 0.0);
  CHECK(closed_loop_bend(0.0, 100.0, 1.0, 6.0) == -6.0);
}

TEST_CASE("encoder counts") {
  CHECK(encoder_read(0.0) == 0);
  CHECK(encoder_read(1.0) == 360);
  CHECK(encoder_read(0.5014) == 180);
  CHECK(encoder_read(-0.001) == -1);  // floor convention
  CHECK(encoder_angle(encoder_read(0.123456)) <= 0.123456);
  CHECK(0.123456 - encoder_angle(encoder_read(0.123456)) < 1.0 / 360.0);
}

TEST_CASE("imu determinism and bounds") {
  const ImuParams imu{2.5, 1234};
  CHECK(imu_read(10.0, ImuParams{0.0, 7}, 3) == 10.0);
  CHECK(imu_read(10.0, imu, 5) == imu_read(10.0, imu, 5));
  double max_err = 0.0, mean_err = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double e = imu_read(0.0, imu, static_cast<std::uint64_t>(i));
    max_err = std::max(max_err, std::abs(e));
    mean_err += e;
  }
  mean_err /= n;
  CHECK(max_err <= 2.5);
  CHECK(std::abs(mean_err) < 0.05);
}

TEST_CASE("different seeds decorrelate the noise streams") {
  const ImuParams a{2.5, 1}, b{2.5, 2};
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    if (imu_read(0.0, a, i) == imu_read(0.0, b, i)) ++same;
  }
  CHECK(same == 0);
}
