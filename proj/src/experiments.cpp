#include "tsasim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include "tsasim/actuation.hpp"
#include "tsasim/analysis.hpp"

namespace tsasim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNewtonPerGram = 9.80665e-3;
constexpr std::uint64_t kSetpointStream = 0x72616e64ULL;

enum class Channel { Fingertip, Proximal, Lateral };

struct Axis {
  MotorState motor{};
  double setpoint_rot = 0.0;
  bool powered = false;
  bool direct_voltage = false;
  double voltage_v = 0.0;
};

/// One finger channel stepped at the controller sample period: two motors,
/// the series-elastic tendon pair, the pose solve, the hysteresis operator
/// and the sensors.
class FingerSim {
 public:
  FingerSim(const GripperConfig& config, Orientation orientation, std::uint64_t seed,
            int finger_index, const std::string& protocol_name, Channel channel)
      : cfg_(config),
        finger_(config.fingers.at(static_cast<std::size_t>(finger_index))),
        front_(config.finger_primary.at(static_cast<std::size_t>(finger_index))),
        rear_(config.finger_antag.at(static_cast<std::size_t>(finger_index))),
        orientation_(orientation),
        channel_(channel),
        dt_(config.control.sample_period_s),
        imu_{config.imu.error_bound_deg, seed} {
    run_.protocol = protocol_name;
    run_.orientation = to_string(orientation);
    run_.finger_index = finger_index;
    run_.seed = seed;
    run_.config_hash = config_hash(config);
    HysteresisParams h = config.hysteresis;
    hyst_ = HysteresisOperator(h);
    primary_.powered = true;
  }

  void set_decay_travel(double travel_deg) {
    HysteresisParams h = cfg_.hysteresis;
    h.decay_travel_deg = std::max(travel_deg, 1.0);
    hyst_ = HysteresisOperator(h);
  }

  Axis& primary() { return primary_; }
  Axis& antagonist() { return antag_; }
  void set_mass(double grams) { mass_g_ = grams; }
  void set_lateral_load(double newtons) { lateral_load_n_ = newtons; }
  void set_blocked(bool blocked) { blocked_ = blocked; }

  double time_s() const { return static_cast<double>(tick_) * dt_; }
  double last_alpha_meas() const { return run_.samples.empty() ? 0.0 : run_.samples.back().alpha_meas_deg; }
  double primary_twist() const { return clamp_twist(front_.tsa, primary_.motor.shaft_angle_rot); }
  double antagonist_twist() const { return clamp_twist(rear_.tsa, antag_.motor.shaft_angle_rot); }
  const Run& run() const { return run_; }
  Run&& take_run() { return std::move(run_); }

  /// Mean measured alpha over the trailing `n` samples.
  double mean_alpha_meas(std::size_t n) const {
    if (run_.samples.empty()) return 0.0;
    const std::size_t count = std::min(n, run_.samples.size());
    double acc = 0.0;
    for (std::size_t i = run_.samples.size() - count; i < run_.samples.size(); ++i) {
      acc += run_.samples[i].alpha_meas_deg;
    }
    return acc / static_cast<double>(count);
  }

  void step() {
    step_axis(primary_, front_, last_front_tension_);
    step_axis(antag_, rear_, last_rear_tension_);

    const DriveCommand cmd{primary_twist(), antagonist_twist(), primary_.powered, antag_.powered};
    double alpha_raw = 0.0;
    if (blocked_) {
      // Tip held against the stop: no joint motion, all contraction goes
      // into string stretch.
      const double stretch = contraction(front_.tsa, cmd.frontal_twist_rot) + front_.pre_stretch_mm;
      last_front_tension_ = cmd.frontal_active ? string_tension(front_, stretch) : 0.0;
      last_rear_tension_ = 0.0;
      alpha_raw = 0.0;
    } else {
      DriveSolution sol;
      try {
        sol = solve_drive(finger_, front_, rear_, cmd, orientation_,
                          mass_g_ * kNewtonPerGram);
      } catch (const NonConvergence& e) {
        throw SimulationError(e.what(), run_.samples.size());
      }
      last_front_tension_ = sol.frontal_tension_n;
      last_rear_tension_ = sol.rear_tension_n;
      switch (channel_) {
        case Channel::Fingertip: alpha_raw = sol.state.fingertip_angle_deg; break;
        case Channel::Proximal: alpha_raw = sol.state.joint_angles_deg[0]; break;
        case Channel::Lateral:
          alpha_raw = lateral_deflection(finger_, lateral_load_n_, sol.frontal_tension_n,
                                         sol.rear_tension_n);
          break;
      }
    }

    const double alpha_true =
        channel_ == Channel::Lateral ? alpha_raw : hyst_.apply(alpha_raw);
    const double meas_abs = imu_read(alpha_true, imu_, tick_);
    if (!have_reference_) {
      meas_reference_ = meas_abs;  // initial reading defines the zero
      have_reference_ = true;
    }

    Sample s;
    s.t_s = time_s();
    s.theta_cmd_rot = primary_.setpoint_rot;
    s.theta_meas_rot = encoder_angle(encoder_read(primary_.motor.shaft_angle_rot,
                                                  cfg_.motor.encoder_counts_per_rev),
                                     cfg_.motor.encoder_counts_per_rev);
    s.alpha_true_deg = alpha_true;
    s.alpha_meas_deg = meas_abs - meas_reference_;
    s.tension_primary_n = last_front_tension_;
    s.tension_antag_n = last_rear_tension_;
    s.mass_g = channel_ == Channel::Lateral ? lateral_load_n_ / kNewtonPerGram : mass_g_;
    run_.samples.push_back(s);
    ++tick_;
  }

  void hold(double seconds) {
    const auto ticks = static_cast<long>(std::llround(seconds / dt_));
    for (long i = 0; i < ticks; ++i) step();
  }

 private:
  static double clamp_twist(const TsaParams& tsa, double shaft_rot) {
    return std::clamp(shaft_rot, 0.0, tsa.max_twist_rot);
  }

  void step_axis(Axis& axis, const TendonDrive& drive, double tension_n) {
    double v = 0.0;
    if (axis.powered) {
      if (axis.direct_voltage) {
        v = axis.voltage_v;
      } else {
        const double measured = encoder_angle(
            encoder_read(axis.motor.shaft_angle_rot, cfg_.motor.encoder_counts_per_rev),
            cfg_.motor.encoder_counts_per_rev);
        v = p_control_motor(axis.setpoint_rot, measured, cfg_.control.position_gain_v_per_rot,
                            cfg_.motor.supply_voltage_v);
      }
    }
    // Back-driven load on the shaft from string tension, radians-based
    // power balance.
    const double twist = clamp_twist(drive.tsa, axis.motor.shaft_angle_rot);
    const double load = tension_n * linear_jacobian(drive.tsa, twist) / kTwoPi;
    axis.motor = motor_step(cfg_.motor, axis.motor, v, load, dt_);
    if (!axis.powered) {
      // An unpowered motor pays the string out freely; park the shaft.
      axis.motor.shaft_speed_rps = 0.0;
    }
  }

  const GripperConfig& cfg_;
  FingerParams finger_;
  TendonDrive front_, rear_;
  Orientation orientation_;
  Channel channel_;
  double dt_;
  ImuParams imu_;
  HysteresisOperator hyst_;
  Axis primary_{}, antag_{};
  double mass_g_ = 0.0;
  double lateral_load_n_ = 0.0;
  bool blocked_ = false;
  double last_front_tension_ = 0.0, last_rear_tension_ = 0.0;
  std::uint64_t tick_ = 0;
  bool have_reference_ = false;
  double meas_reference_ = 0.0;
  Run run_{};
};

std::vector<double> staircase_setpoints(double step, double peak) {
  std::vector<double> up;
  for (double s = step; s < peak - 1e-9; s += step) up.push_back(s);
  up.push_back(peak);
  return up;
}

/// Quasi-static probe of the fingertip angle at a twist, used to size the
/// lonely-stroke decay travel before a run starts.
double probe_peak_alpha(const GripperConfig& cfg, int finger_index, Orientation orientation,
                        double twist) {
  const auto fi = static_cast<std::size_t>(finger_index);
  DriveCommand cmd{twist, 0.0, true, false};
  return solve_drive(cfg.fingers.at(fi), cfg.finger_primary.at(fi), cfg.finger_antag.at(fi), cmd,
                     orientation, 0.0)
      .state.fingertip_angle_deg;
}

double probe_proximal(const GripperConfig& cfg, int finger_index, Orientation orientation,
                      double twist, double mass_g, double antag_twist = 0.0,
                      bool antag_active = false) {
  const auto fi = static_cast<std::size_t>(finger_index);
  DriveCommand cmd{twist, antag_twist, true, antag_active};
  return solve_drive(cfg.fingers.at(fi), cfg.finger_primary.at(fi), cfg.finger_antag.at(fi), cmd,
                     orientation, mass_g * kNewtonPerGram)
      .state.joint_angles_deg[0];
}

Run run_staircase(const GripperConfig& cfg, const StaircasePosition& p, Orientation orientation,
                  std::uint64_t seed, int finger_index, const std::string& name) {
  FingerSim sim(cfg, orientation, seed, finger_index, name, Channel::Fingertip);
  sim.set_decay_travel(2.0 * probe_peak_alpha(cfg, finger_index, orientation, p.peak_rot));
  sim.primary().setpoint_rot = 0.0;
  sim.hold(p.hold_s);
  const auto up = staircase_setpoints(p.step_rot, p.peak_rot);
  for (int c = 0; c < p.cycles; ++c) {
    for (double s : up) {
      sim.primary().setpoint_rot = s;
      sim.hold(p.hold_s);
    }
    for (auto it = up.rbegin() + 1; it != up.rend(); ++it) {
      sim.primary().setpoint_rot = *it;
      sim.hold(p.hold_s);
    }
    sim.primary().setpoint_rot = 0.0;
    sim.hold(p.hold_s);
  }
  return sim.take_run();
}

Run run_random(const GripperConfig& cfg, const RandomSetpoints& p, Orientation orientation,
               std::uint64_t seed, int finger_index) {
  FingerSim sim(cfg, orientation, seed, finger_index, "random", Channel::Fingertip);
  sim.set_decay_travel(2.0 * probe_peak_alpha(cfg, finger_index, orientation, p.peak_rot));
  sim.primary().setpoint_rot = 0.0;
  sim.hold(p.hold_s);
  const int total = p.count_per_cycle * p.cycles;
  for (int i = 0; i < total; ++i) {
    sim.primary().setpoint_rot = p.peak_rot * seeded_uniform(seed ^ kSetpointStream, i);
    sim.hold(p.hold_s);
  }
  sim.primary().setpoint_rot = 0.0;
  sim.hold(p.hold_s);
  return sim.take_run();
}

Run run_blocked(const GripperConfig& cfg, const BlockedForce& p, Orientation orientation,
                std::uint64_t seed, int finger_index) {
  FingerSim sim(cfg, orientation, seed, finger_index, "blocked", Channel::Fingertip);
  sim.set_blocked(true);
  sim.primary().setpoint_rot = 0.0;
  sim.hold(1.0);
  for (double s : p.setpoints_rot) {
    sim.primary().setpoint_rot = s;
    sim.hold(p.hold_s);
  }
  return sim.take_run();
}

Run run_velocity(const GripperConfig& cfg, const VelocityTest& p, Orientation orientation,
                 std::uint64_t seed, int finger_index) {
  StaircasePosition st;
  st.step_rot = p.step_rot;
  st.hold_s = p.hold_s;
  st.cycles = p.cycles;
  st.peak_rot = p.peak_rot;
  return run_staircase(cfg, st, orientation, seed, finger_index, "velocity");
}

Run run_constant_deflection(const GripperConfig& cfg, const ConstantDeflection& p,
                            Orientation orientation, std::uint64_t seed, int finger_index) {
  const auto points =
      constant_deflection(cfg, p.masses_g, p.tolerance_deg, orientation, finger_index);
  FingerSim sim(cfg, orientation, seed, finger_index, "constant-deflection", Channel::Proximal);
  const double base = probe_proximal(cfg, finger_index, orientation, 0.0, 0.0);
  const double worst = probe_proximal(cfg, finger_index, orientation, 0.0,
                                      p.masses_g.empty() ? 0.0 : p.masses_g.back());
  sim.set_decay_travel(2.0 * std::abs(base - worst));
  sim.primary().setpoint_rot = 0.0;
  sim.hold(2.0);
  for (const auto& pt : points) {
    sim.set_mass(pt.mass_g);
    sim.primary().setpoint_rot = pt.theta_required_rot;
    sim.hold(4.0);
  }
  return sim.take_run();
}

struct StiffnessSegment {
  StiffnessPoint point;
  Run run;
};

StiffnessSegment run_stiffness_segment(const GripperConfig& cfg, const StiffnessTuning& p,
                                       double pretwist, Orientation orientation,
                                       std::uint64_t seed, int finger_index) {
  FingerSim sim(cfg, orientation, seed, finger_index, "stiffness", Channel::Proximal);
  const double max_mass = p.masses_g.empty() ? 0.0 : p.masses_g.back();
  const double defl_probe =
      probe_proximal(cfg, finger_index, orientation, pretwist, 0.0, pretwist, pretwist > 0.0) -
      probe_proximal(cfg, finger_index, orientation, pretwist, max_mass, pretwist, pretwist > 0.0);
  sim.set_decay_travel(2.0 * std::max(std::abs(defl_probe), 0.5));

  // Step 1: both TSAs untwisted; record the resting angle.
  sim.primary().setpoint_rot = 0.0;
  sim.hold(2.0);
  const double alpha_z0 = sim.mean_alpha_meas(100);

  // Step 2: pre-twist the primary TSA.
  sim.primary().setpoint_rot = pretwist;
  sim.hold(4.0);

  // Step 3: twist the antagonist under closed-loop control until the
  // bending angle returns to its resting value.
  double antagonist_twist = 0.0;
  if (pretwist > 0.0) {
    sim.antagonist().powered = true;
    sim.antagonist().direct_voltage = true;
    std::deque<double> recent;
    const double t_limit = sim.time_s() + 120.0;
    bool converged = false;
    while (sim.time_s() < t_limit) {
      const double err = sim.last_alpha_meas() - alpha_z0;
      // The antagonist acts opposite to the primary on the bending angle.
      sim.antagonist().voltage_v = -closed_loop_bend(alpha_z0, sim.last_alpha_meas(),
                                                     cfg.control.bend_gain_v_per_deg,
                                                     cfg.motor.supply_voltage_v);
      sim.step();
      recent.push_back(err);
      if (recent.size() > 100) recent.pop_front();
      if (recent.size() == 100) {
        double mean = 0.0;
        for (double e : recent) mean += e;
        mean /= 100.0;
        if (std::abs(mean) < 0.3) {
          converged = true;
          break;
        }
      }
    }
    if (!converged) {
      throw SimulationError("antagonist closed loop failed to rebalance the bending angle",
                            sim.run().samples.size());
    }
    // Hold the rebalanced twist for the loading phase.
    antagonist_twist = sim.antagonist().motor.shaft_angle_rot;
    sim.antagonist().direct_voltage = false;
    sim.antagonist().setpoint_rot = antagonist_twist;
    sim.hold(1.0);
  }

  // Steps 4-5: two cycles of monotonically increasing then decreasing
  // hanging masses; steady readings from the tail of each hold.
  std::vector<std::vector<double>> ascending_reads(static_cast<std::size_t>(p.cycles));
  for (int cycle = 0; cycle < p.cycles; ++cycle) {
    for (std::size_t i = 0; i < p.masses_g.size(); ++i) {
      sim.set_mass(p.masses_g[i]);
      sim.hold(p.hold_s);
      ascending_reads[static_cast<std::size_t>(cycle)].push_back(sim.mean_alpha_meas(100));
    }
    for (std::size_t i = p.masses_g.size() - 1; i-- > 0;) {
      sim.set_mass(p.masses_g[i]);
      sim.hold(p.hold_s);
    }
  }

  // Step 6: first-degree fit through the origin on the second loading
  // cycle; the first cycle is the lonely stroke.
  const auto& reads = ascending_reads.at(static_cast<std::size_t>(std::min(p.cycles - 1, 1)));
  const double reference = reads.front();
  std::vector<double> loads_n, deflections_deg;
  for (std::size_t i = 1; i < p.masses_g.size(); ++i) {
    loads_n.push_back(p.masses_g[i] * kNewtonPerGram);
    deflections_deg.push_back(reference - reads[i]);
  }
  StiffnessSegment seg;
  seg.point.pretwist_rot = pretwist;
  seg.point.antagonist_twist_rot = antagonist_twist;
  seg.point.k_alpha_n_per_deg = fit_stiffness(loads_n, deflections_deg);
  seg.run = sim.take_run();
  return seg;
}

Run run_stiffness(const GripperConfig& cfg, const StiffnessTuning& p, Orientation orientation,
                  std::uint64_t seed, int finger_index) {
  Run combined;
  for (std::size_t i = 0; i < p.pretwists_rot.size(); ++i) {
    StiffnessSegment seg = run_stiffness_segment(cfg, p, p.pretwists_rot[i], orientation,
                                                 seed + i, finger_index);
    if (combined.samples.empty()) {
      combined = std::move(seg.run);
      combined.protocol = "stiffness";
    } else {
      const double t0 = combined.samples.back().t_s + cfg.control.sample_period_s;
      for (Sample s : seg.run.samples) {
        s.t_s += t0;
        combined.samples.push_back(s);
      }
    }
  }
  return combined;
}

Run run_lateral(const GripperConfig& cfg, const LateralStiffness& p, Orientation orientation,
                std::uint64_t seed, int finger_index) {
  FingerSim sim(cfg, orientation, seed, finger_index, "lateral", Channel::Lateral);
  sim.primary().powered = false;
  sim.primary().setpoint_rot = 0.0;
  sim.antagonist().powered = true;
  for (double pre : p.pretwists_rot) {
    sim.antagonist().setpoint_rot = pre;
    sim.set_lateral_load(0.0);
    sim.hold(2.0);
    for (double load : p.loads_n) {
      sim.set_lateral_load(load);
      sim.hold(p.hold_s);
    }
    sim.set_lateral_load(0.0);
  }
  return sim.take_run();
}

}  // namespace

Protocol protocol_from_name(const std::string& name, const GripperConfig& config) {
  const double peak = config.protocol.staircase_peak_rot;
  if (name == "staircase") {
    StaircasePosition p;
    p.peak_rot = peak;
    return p;
  }
  if (name == "random") {
    RandomSetpoints p;
    p.peak_rot = peak;
    return p;
  }
  if (name == "blocked") {
    BlockedForce p;
    p.setpoints_rot = config.protocol.blocked_setpoints_rot;
    return p;
  }
  if (name == "constant-deflection") return ConstantDeflection{};
  if (name == "stiffness") return StiffnessTuning{};
  if (name == "lateral") return LateralStiffness{};
  if (name == "velocity") {
    VelocityTest p;
    p.peak_rot = peak;
    return p;
  }
  throw std::invalid_argument("unknown protocol '" + name + "'");
}

std::string protocol_name(const Protocol& protocol) {
  struct Visitor {
    std::string operator()(const StaircasePosition&) const { return "staircase"; }
    std::string operator()(const RandomSetpoints&) const { return "random"; }
    std::string operator()(const BlockedForce&) const { return "blocked"; }
    std::string operator()(const ConstantDeflection&) const { return "constant-deflection"; }
    std::string operator()(const StiffnessTuning&) const { return "stiffness"; }
    std::string operator()(const LateralStiffness&) const { return "lateral"; }
    std::string operator()(const VelocityTest&) const { return "velocity"; }
  };
  return std::visit(Visitor{}, protocol);
}

std::vector<std::string> protocol_names() {
  return {"staircase", "random",  "blocked", "constant-deflection",
          "stiffness", "lateral", "velocity"};
}

SimulationError::SimulationError(const std::string& what, std::size_t sample_index_)
    : std::runtime_error(what + " (sample " + std::to_string(sample_index_) + ")"),
      sample_index(sample_index_) {}

Unreachable::Unreachable(double mass_g_)
    : std::runtime_error("mass " + std::to_string(mass_g_) +
                         " g cannot be held within the actuator limits"),
      mass_g(mass_g_) {}

Run run_protocol(const GripperConfig& config, const Protocol& protocol, Orientation orientation,
                 std::uint64_t seed, int finger_index) {
  struct Visitor {
    const GripperConfig& cfg;
    Orientation orientation;
    std::uint64_t seed;
    int finger;
    Run operator()(const StaircasePosition& p) const {
      return run_staircase(cfg, p, orientation, seed, finger, "staircase");
    }
    Run operator()(const RandomSetpoints& p) const {
      return run_random(cfg, p, orientation, seed, finger);
    }
    Run operator()(const BlockedForce& p) const {
      return run_blocked(cfg, p, orientation, seed, finger);
    }
    Run operator()(const ConstantDeflection& p) const {
      return run_constant_deflection(cfg, p, orientation, seed, finger);
    }
    Run operator()(const StiffnessTuning& p) const {
      return run_stiffness(cfg, p, orientation, seed, finger);
    }
    Run operator()(const LateralStiffness& p) const {
      return run_lateral(cfg, p, orientation, seed, finger);
    }
    Run operator()(const VelocityTest& p) const {
      return run_velocity(cfg, p, orientation, seed, finger);
    }
  };
  return std::visit(Visitor{config, orientation, seed, finger_index}, protocol);
}

double blocked_force(const GripperConfig& config) {
  const FingerParams& f = config.fingers[0];
  const TendonDrive& front = config.finger_primary[0];
  const double theta =
      std::min(config.protocol.blocked_setpoints_rot[1], front.tsa.max_twist_rot);
  const double tension =
      tension_from_torque(front.tsa, theta, config.motor.stall_torque_nmm);
  // Torque balance of the distal link about its own joint: the tendon pin
  // at the tip works through arm_3, the contact force through the link.
  const double gain = f.frontal_arm_mm[2] * f.transmission(2) / f.link_length_mm[3];
  return tension * gain;
}

std::vector<DeflectionPoint> constant_deflection(const GripperConfig& config,
                                                 const std::vector<double>& masses_g,
                                                 double tolerance_deg, Orientation orientation,
                                                 int finger_index) {
  if (!(tolerance_deg > 0.0)) {
    throw std::domain_error("constant_deflection tolerance must be > 0");
  }
  const auto fi = static_cast<std::size_t>(finger_index);
  const FingerParams& finger = config.fingers.at(fi);
  const TendonDrive& front = config.finger_primary.at(fi);
  const TendonDrive& rear = config.finger_antag.at(fi);

  auto alpha_z = [&](double twist, double mass) {
    DriveCommand cmd{twist, 0.0, true, false};
    return solve_drive(finger, front, rear, cmd, orientation, mass * kNewtonPerGram)
        .state.joint_angles_deg[0];
  };
  const double alpha_z0 = alpha_z(0.0, 0.0);
  const double theta_hi = front.tsa.max_twist_rot * 0.999;

  std::vector<DeflectionPoint> out;
  for (double mass : masses_g) {
    double theta = 0.0;
    const double f0 = alpha_z(0.0, mass) - alpha_z0;
    if (f0 < -1e-9) {
      if (alpha_z(theta_hi, mass) - alpha_z0 < 0.0) {
        throw Unreachable(mass);
      }
      double lo = 0.0, hi = theta_hi;
      for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (alpha_z(mid, mass) - alpha_z0 < 0.0 ? lo : hi) = mid;
      }
      theta = 0.5 * (lo + hi);
      // The motor must be able to hold this twist against the string.
      DriveCommand cmd{theta, 0.0, true, false};
      const DriveSolution sol =
          solve_drive(finger, front, rear, cmd, orientation, mass * kNewtonPerGram);
      const double hold_torque =
          sol.frontal_tension_n * linear_jacobian(front.tsa, theta) / kTwoPi;
      if (hold_torque > config.motor.stall_torque_nmm) {
        throw Unreachable(mass);
      }
    }
    if (std::abs(alpha_z(theta, mass) - alpha_z0) > tolerance_deg) {
      throw Unreachable(mass);
    }
    out.push_back({mass, theta});
  }
  return out;
}

std::vector<StiffnessPoint> stiffness_sweep(const GripperConfig& config,
                                            const StiffnessTuning& protocol,
                                            Orientation orientation, std::uint64_t seed,
                                            std::vector<Run>* runs_out, int finger_index) {
  std::vector<StiffnessPoint> out;
  for (std::size_t i = 0; i < protocol.pretwists_rot.size(); ++i) {
    StiffnessSegment seg = run_stiffness_segment(config, protocol, protocol.pretwists_rot[i],
                                                 orientation, seed + i, finger_index);
    out.push_back(seg.point);
    if (runs_out) runs_out->push_back(std::move(seg.run));
  }
  return out;
}

std::vector<LateralPoint> lateral_stiffness_sweep(const GripperConfig& config,
                                                  const LateralStiffness& protocol,
                                                  int finger_index) {
  const auto fi = static_cast<std::size_t>(finger_index);
  const FingerParams& finger = config.fingers.at(fi);
  const TendonDrive& front = config.finger_primary.at(fi);
  const TendonDrive& rear = config.finger_antag.at(fi);

  std::vector<LateralPoint> out;
  for (double pre : protocol.pretwists_rot) {
    DriveCommand cmd{0.0, pre, false, true};
    const DriveSolution sol =
        solve_drive(finger, front, rear, cmd, Orientation::HorizontalUp, 0.0);
    std::vector<double> loads, deflections;
    for (double load : protocol.loads_n) {
      loads.push_back(load);
      deflections.push_back(
          lateral_deflection(finger, load, sol.frontal_tension_n, sol.rear_tension_n));
    }
    LateralPoint p;
    p.pretwist_rot = pre;
    p.k_lateral_n_per_deg = fit_stiffness(loads, deflections);
    p.r_squared = r_squared_through_origin(deflections, loads);
    out.push_back(p);
  }
  return out;
}

}  // namespace tsasim
