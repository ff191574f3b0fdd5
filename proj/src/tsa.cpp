#include "tsasim/tsa.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tsasim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_twist_domain(const TsaParams& p, double twist_rot) {
  if (!(twist_rot >= 0.0)) {
    throw std::domain_error("twist must be non-negative, got " + std::to_string(twist_rot));
  }
  if (twist_rot > p.max_twist_rot) {
    throw std::domain_error("twist " + std::to_string(twist_rot) + " exceeds max_twist " +
                            std::to_string(p.max_twist_rot));
  }
}
}  // namespace

double TsaParams::singularity_twist_rot() const {
  return twist_zone_length_mm / (kTwoPi * string_radius_mm);
}

void TsaParams::validate() const {
  if (!(twist_zone_length_mm > 0.0)) {
    throw std::invalid_argument("tsa.twist_zone_length_mm must be > 0");
  }
  if (!(string_radius_mm > 0.0)) {
    throw std::invalid_argument("tsa.string_radius_mm must be > 0");
  }
  if (!(jacobian_floor_mm_per_rot > 0.0)) {
    throw std::invalid_argument("tsa.jacobian_floor_mm_per_rot must be > 0");
  }
  if (!(max_twist_rot > 0.0) || !(max_twist_rot < singularity_twist_rot())) {
    throw std::invalid_argument("tsa.max_twist_rot must lie in (0, singularity twist)");
  }
}

TsaState make_tsa_state(const TsaParams& params, double twist_rot, double tension_n) {
  if (!(tension_n >= 0.0)) {
    throw std::domain_error("tension must be non-negative");
  }
  return TsaState{twist_rot, contraction(params, twist_rot), tension_n};
}

double contraction(const TsaParams& p, double twist_rot) {
  check_twist_domain(p, twist_rot);
  const double wound = kTwoPi * twist_rot * p.string_radius_mm;
  const double l = p.twist_zone_length_mm;
  return l - std::sqrt(l * l - wound * wound);
}

double linear_jacobian(const TsaParams& p, double twist_rot) {
  check_twist_domain(p, twist_rot);
  const double c = kTwoPi * p.string_radius_mm;
  const double l = p.twist_zone_length_mm;
  return c * c * twist_rot / std::sqrt(l * l - c * c * twist_rot * twist_rot);
}

double tension_from_torque(const TsaParams& p, double twist_rot, double motor_torque_nmm) {
  if (!(motor_torque_nmm >= 0.0)) {
    throw std::domain_error("motor torque must be non-negative");
  }
  const double j = std::max(linear_jacobian(p, twist_rot), p.jacobian_floor_mm_per_rot);
  return motor_torque_nmm / j;
}

}  // namespace tsasim
