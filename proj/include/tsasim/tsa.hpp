#pragma once

namespace tsasim {

/// Geometry and limits of one twisted string actuator (TSA): a string pair
/// twisted by a motor inside a fixed-length twisting zone. The single-zone
/// helix model gives contraction x(t) = L - sqrt(L^2 - (2*pi*t*r)^2) for a
/// twist of t motor rotations.
struct TsaParams {
  double twist_zone_length_mm = 80.0;
  double string_radius_mm = 0.35;
  double max_twist_rot = 34.559359071382985;  // 0.95 x singularity for defaults
  double jacobian_floor_mm_per_rot = 0.05;

  /// Twist at which the helix model becomes singular (strings fully wound).
  double singularity_twist_rot() const;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Instantaneous state of one string pair. `contraction_mm` is always the
/// value of contraction(params, twist); it is never set independently.
struct TsaState {
  double twist_rot = 0.0;
  double contraction_mm = 0.0;
  double tension_n = 0.0;
};

TsaState make_tsa_state(const TsaParams& params, double twist_rot, double tension_n = 0.0);

/// Linear contraction (mm) of the string pair at the given twist.
/// Domain: 0 <= twist <= max_twist; throws std::domain_error outside.
double contraction(const TsaParams& params, double twist_rot);

/// Analytic derivative of `contraction` with respect to twist (mm/rot).
/// Zero at zero twist and strictly increasing toward the singularity.
double linear_jacobian(const TsaParams& params, double twist_rot);

/// Axial force the actuator can sustain at a given motor torque, from the
/// static power balance tension = torque / jacobian. The jacobian floor
/// keeps the result finite at zero twist.
double tension_from_torque(const TsaParams& params, double twist_rot, double motor_torque_nmm);

}  // namespace tsasim
