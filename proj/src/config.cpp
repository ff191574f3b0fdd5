#include "tsasim/config.hpp"

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace tsasim {

namespace {

struct Binding {
  std::string key;
  std::vector<double*> nums;
  std::string* str = nullptr;
};

void bind_tsa(std::vector<Binding>& b, const std::string& prefix, TsaParams& t) {
  b.push_back({prefix + ".twist_zone_length_mm", {&t.twist_zone_length_mm}});
  b.push_back({prefix + ".string_radius_mm", {&t.string_radius_mm}});
  b.push_back({prefix + ".max_twist_rot", {&t.max_twist_rot}});
  b.push_back({prefix + ".jacobian_floor_mm_per_rot", {&t.jacobian_floor_mm_per_rot}});
}

void bind_drive(std::vector<Binding>& b, const std::string& prefix, TendonDrive& d) {
  bind_tsa(b, prefix, d.tsa);
  b.push_back({prefix + ".elastic_coeff_n_per_mm2", {&d.elastic_coeff_n_per_mm2}});
  b.push_back({prefix + ".pre_stretch_mm", {&d.pre_stretch_mm}});
}

void bind_finger(std::vector<Binding>& b, const std::string& prefix, FingerParams& f) {
  b.push_back({prefix + ".joint_stiffness_nmm_per_rad",
               {&f.joint_stiffness_nmm_per_rad[0], &f.joint_stiffness_nmm_per_rad[1],
                &f.joint_stiffness_nmm_per_rad[2]}});
  b.push_back({prefix + ".joint_max_angle_deg", {&f.joint_max_angle_deg}});
  b.push_back({prefix + ".bend_limit_scale", {&f.bend_limit_scale}});
  b.push_back(
      {prefix + ".frontal_arm_mm", {&f.frontal_arm_mm[0], &f.frontal_arm_mm[1], &f.frontal_arm_mm[2]}});
  b.push_back({prefix + ".rear_arm_mm", {&f.rear_arm_mm[0], &f.rear_arm_mm[1], &f.rear_arm_mm[2]}});
  b.push_back({prefix + ".link_length_mm",
               {&f.link_length_mm[0], &f.link_length_mm[1], &f.link_length_mm[2],
                &f.link_length_mm[3]}});
  b.push_back({prefix + ".link_mass_g",
               {&f.link_mass_g[0], &f.link_mass_g[1], &f.link_mass_g[2], &f.link_mass_g[3]}});
  b.push_back({prefix + ".tendon_friction_coeff", {&f.tendon_friction_coeff}});
  b.push_back({prefix + ".lateral_stiffness_nmm_per_rad", {&f.lateral_stiffness_nmm_per_rad}});
  b.push_back({prefix + ".lateral_tension_gain_per_n", {&f.lateral_tension_gain_per_n}});
}

std::vector<Binding> registry(GripperConfig& c) {
  std::vector<Binding> b;
  b.push_back({"meta.name", {}, &c.name});
  b.push_back({"meta.footprint_mm", {&c.footprint_mm[0], &c.footprint_mm[1]}});
  b.push_back({"meta.total_length_mm", {&c.total_length_mm}});

  for (int i = 0; i < 4; ++i) {
    const std::string fi = "finger." + std::to_string(i);
    bind_finger(b, fi, c.fingers[i]);
    bind_drive(b, fi + ".primary", c.finger_primary[i]);
    bind_drive(b, fi + ".antagonist", c.finger_antag[i]);
  }

  b.push_back({"hysteresis.play_width_deg", {&c.hysteresis.play_width_deg}});
  b.push_back({"hysteresis.lonely_stroke_offset_deg", {&c.hysteresis.lonely_stroke_offset_deg}});
  b.push_back({"hysteresis.decay_travel_deg", {&c.hysteresis.decay_travel_deg}});

  bind_finger(b, "thumb.finger", c.thumb.finger);
  bind_drive(b, "thumb.bend", c.thumb.bend_drive);
  bind_drive(b, "thumb.roll", c.thumb.roll_drive);
  bind_drive(b, "thumb.antagonist", c.thumb_antag);
  b.push_back({"thumb.roll_arm_mm", {&c.thumb.roll_arm_mm}});
  b.push_back({"thumb.roll_stiffness_nmm_per_rad", {&c.thumb.roll_stiffness_nmm_per_rad}});
  b.push_back({"thumb.roll_max_angle_deg", {&c.thumb.roll_max_angle_deg}});
  b.push_back({"thumb.roll_gravity_nmm", {&c.thumb.roll_gravity_nmm}});
  b.push_back({"thumb.coupling_x", {&c.thumb.coupling[0][0], &c.thumb.coupling[0][1]}});
  b.push_back({"thumb.coupling_y", {&c.thumb.coupling[1][0], &c.thumb.coupling[1][1]}});
  b.push_back({"thumb.coupling_z", {&c.thumb.coupling[2][0], &c.thumb.coupling[2][1]}});

  b.push_back({"motor.gear_ratio", {&c.motor.gear_ratio}});
  b.push_back({"motor.encoder_counts_per_rev", {&c.motor.encoder_counts_per_rev}});
  b.push_back({"motor.stall_torque_nmm", {&c.motor.stall_torque_nmm}});
  b.push_back({"motor.no_load_speed_rps", {&c.motor.no_load_speed_rps}});
  b.push_back({"motor.supply_voltage_v", {&c.motor.supply_voltage_v}});
  b.push_back({"motor.time_constant_s", {&c.motor.time_constant_s}});

  b.push_back({"imu.error_bound_deg", {&c.imu.error_bound_deg}});

  b.push_back({"control.position_gain_v_per_rot", {&c.control.position_gain_v_per_rot}});
  b.push_back({"control.bend_gain_v_per_deg", {&c.control.bend_gain_v_per_deg}});
  b.push_back({"control.sample_period_s", {&c.control.sample_period_s}});
  b.push_back({"control.theta_tolerance_rot", {&c.control.theta_tolerance_rot}});

  b.push_back({"protocol.staircase_peak_rot", {&c.protocol.staircase_peak_rot}});
  b.push_back({"protocol.blocked_setpoints_rot",
               {&c.protocol.blocked_setpoints_rot[0], &c.protocol.blocked_setpoints_rot[1]}});
  return b;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

GripperConfig::GripperConfig() {
  // Bending tendons are tied with noticeable pre-stretch so the unloaded
  // finger rests a few degrees into its curl; antagonists are merely taut.
  for (auto& d : finger_primary) d.pre_stretch_mm = 2.3;
  for (auto& d : finger_antag) d.pre_stretch_mm = 0.0;
  thumb.bend_drive.pre_stretch_mm = 2.3;
  thumb.roll_drive.pre_stretch_mm = 2.3;
  thumb_antag.pre_stretch_mm = 0.0;
}

void GripperConfig::validate() const {
  for (int i = 0; i < 4; ++i) {
    fingers[i].validate();
    finger_primary[i].tsa.validate();
    finger_antag[i].tsa.validate();
    if (!(finger_primary[i].elastic_coeff_n_per_mm2 > 0.0) ||
        !(finger_antag[i].elastic_coeff_n_per_mm2 > 0.0)) {
      throw ConfigError("finger." + std::to_string(i) +
                        ".*.elastic_coeff_n_per_mm2 must be > 0");
    }
  }
  thumb.validate();
  thumb_antag.tsa.validate();
  motor.validate();
  if (imu.error_bound_deg < 0.0) {
    throw ConfigError("imu.error_bound_deg must be >= 0");
  }
  if (hysteresis.play_width_deg < 0.0 || hysteresis.lonely_stroke_offset_deg < 0.0) {
    throw ConfigError("hysteresis widths must be >= 0");
  }
  if (!(control.position_gain_v_per_rot > 0.0) || !(control.bend_gain_v_per_deg > 0.0)) {
    throw ConfigError("control gains must be > 0");
  }
  if (!(control.sample_period_s > 0.0)) {
    throw ConfigError("control.sample_period_s must be > 0");
  }
  if (!(protocol.staircase_peak_rot > 0.0)) {
    throw ConfigError("protocol.staircase_peak_rot must be > 0");
  }
}

GripperConfig parse_config(const std::string& text) {
  GripperConfig c;
  auto bindings = registry(c);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string eq;
    if (!(ls >> eq) || eq != "=") {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    Binding* binding = nullptr;
    for (auto& cand : bindings) {
      if (cand.key == key) {
        binding = &cand;
        break;
      }
    }
    if (!binding) {
      throw ConfigError("unknown configuration key '" + key + "' (line " +
                        std::to_string(line_no) + ")");
    }
    if (binding->str) {
      std::string v;
      ls >> v;
      *binding->str = v;
      continue;
    }
    for (std::size_t i = 0; i < binding->nums.size(); ++i) {
      std::string tok;
      if (!(ls >> tok)) {
        throw ConfigError("key '" + key + "' expects " + std::to_string(binding->nums.size()) +
                          " values");
      }
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end == tok.c_str() || *end != '\0') {
        throw ConfigError("key '" + key + "': '" + tok + "' is not a number");
      }
      *binding->nums[i] = v;
    }
    std::string extra;
    if (ls >> extra) {
      throw ConfigError("key '" + key + "' has more values than expected");
    }
  }
  return c;
}

GripperConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const GripperConfig& config, const std::string& header_comment) {
  GripperConfig copy = config;
  auto bindings = registry(copy);
  std::ostringstream out;
  if (!header_comment.empty()) {
    std::istringstream hc(header_comment);
    std::string line;
    while (std::getline(hc, line)) out << "# " << line << "\n";
  }
  for (const auto& b : bindings) {
    out << b.key << " =";
    if (b.str) {
      out << ' ' << *b.str;
    } else {
      for (const double* v : b.nums) out << ' ' << format_number(*v);
    }
    out << '\n';
  }
  return out.str();
}

void save_config(const GripperConfig& config, const std::string& path,
                 const std::string& header_comment) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
    out << serialize_config(config, header_comment);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot move temporary config into place at '" + path + "'");
  }
}

std::string config_hash(const GripperConfig& config) {
  const std::string canon = serialize_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool config_equal(const GripperConfig& a, const GripperConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace tsasim
