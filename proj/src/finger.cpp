#include "tsasim/finger.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tsasim {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kResidualTolNmm = 1e-6;

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct PlaneChain {
  // joint positions p[0..3] (p[0] = base of joint 1) and link mid-points c[1..4],
  // all in the bending-plane frame, lengths in mm, angles in rad.
  std::array<std::array<double, 2>, kJointCount + 1> joint_pos;
  std::array<std::array<double, 2>, kLinkCount + 1> link_com;
  std::array<double, 2> tip;
};

PlaneChain chain_geometry(const FingerParams& p, const Vec3& phi_rad) {
  PlaneChain g{};
  double heading = 0.0;
  double x = 0.0, y = 0.0;
  for (int link = 1; link <= kLinkCount; ++link) {
    if (link >= 2) heading += phi_rad[link - 2];
    const double len = p.link_length_mm[link - 1];
    const double ux = std::cos(heading), uy = std::sin(heading);
    g.link_com[link] = {x + 0.5 * len * ux, y + 0.5 * len * uy};
    x += len * ux;
    y += len * uy;
    if (link <= kJointCount) g.joint_pos[link] = {x, y};
  }
  g.tip = {x, y};
  return g;
}

// Net curl-positive torque at each joint from gravity and the hanging tip
// load (load acts along -y in the bending plane).
Vec3 external_torques(const FingerParams& p, const Vec3& phi_rad, Orientation orientation,
                      double tip_load_n) {
  const PlaneChain g = chain_geometry(p, phi_rad);
  const auto gdir = gravity_direction(orientation);
  Vec3 tau = Vec3::Zero();
  for (int i = 1; i <= kJointCount; ++i) {
    const auto& pj = g.joint_pos[i];
    double t = 0.0;
    for (int link = i + 1; link <= kLinkCount; ++link) {
      const double w = p.link_mass_g[link - 1] * 1e-3 * kGravityMmPerS2 * 1e-3;  // N
      const double dx = g.link_com[link][0] - pj[0];
      const double dy = g.link_com[link][1] - pj[1];
      t += w * (dx * gdir[1] - dy * gdir[0]);
    }
    if (tip_load_n != 0.0) {
      const double dx = g.tip[0] - pj[0];
      t += -tip_load_n * dx;  // force (0, -load) at the tip
    }
    tau[i - 1] = t;
  }
  return tau;
}

// Tension model seen by the balance solve: tensions as a function of the
// tendon path changes, plus their derivatives for the Newton step.
struct Tensions {
  double frontal = 0.0, rear = 0.0;
  double d_frontal_d_path = 0.0;  // dT_f / d(d_f)
  double d_rear_d_path = 0.0;     // dT_r / d(d_r)
};

template <typename TensionFn>
Vec3 residual(const FingerParams& p, const Vec3& phi_rad, Orientation orientation,
              double tip_load_n, const TensionFn& tension_fn, Tensions* out = nullptr) {
  double df = 0.0, dr = 0.0;
  for (int i = 0; i < kJointCount; ++i) {
    df += p.frontal_arm_mm[i] * phi_rad[i];
    dr += p.rear_arm_mm[i] * phi_rad[i];
  }
  const Tensions t = tension_fn(df, dr);
  if (out) *out = t;
  const Vec3 ext = external_torques(p, phi_rad, orientation, tip_load_n);
  Vec3 r;
  for (int i = 0; i < kJointCount; ++i) {
    const double eta = p.transmission(i);
    r[i] = t.frontal * p.frontal_arm_mm[i] * eta - t.rear * p.rear_arm_mm[i] * eta -
           p.joint_stiffness_nmm_per_rad[i] * phi_rad[i] + ext[i];
  }
  return r;
}

// KKT check on the box [0, limit]: interior joints need |r| < tol, a joint
// clamped at 0 may carry negative residual, one at the limit positive.
bool satisfied(const Vec3& phi, const Vec3& r, double limit, double tol, double* worst) {
  double w = 0.0;
  bool ok = true;
  for (int i = 0; i < kJointCount; ++i) {
    double v;
    if (phi[i] <= 0.0 && r[i] < 0.0) {
      v = 0.0;
    } else if (phi[i] >= limit && r[i] > 0.0) {
      v = 0.0;
    } else {
      v = std::abs(r[i]);
    }
    w = std::max(w, v);
    if (v >= tol) ok = false;
  }
  if (worst) *worst = w;
  return ok;
}

FingerState to_state(const FingerParams& p, const Vec3& phi_rad) {
  FingerState s;
  double sum = 0.0;
  for (int i = 0; i < kJointCount; ++i) {
    s.joint_angles_deg[i] = phi_rad[i] * kRadToDeg;
    sum += s.joint_angles_deg[i];
  }
  s.fingertip_angle_deg = sum;
  s.frontal_displacement_mm = tendon_displacement(p, s.joint_angles_deg, Tendon::Frontal);
  s.rear_displacement_mm = tendon_displacement(p, s.joint_angles_deg, Tendon::Rear);
  return s;
}

struct NewtonOutcome {
  bool converged = false;
  Vec3 phi = Vec3::Zero();
  double worst = 0.0;
  int iterations = 0;
};

// Projected damped Newton from one start. The merit function is the
// KKT-adjusted residual (bound-wedged joints do not count), and the Newton
// system is reduced to the free coordinates so clamped joints cannot mask
// the others.
template <typename TensionFn>
NewtonOutcome newton_attempt(const FingerParams& p, Orientation orientation, double tip_load_n,
                             const TensionFn& tension_fn, Vec3 phi, int max_iterations) {
  const double limit = p.effective_joint_limit_rad();
  NewtonOutcome out;
  Vec3 r = residual(p, phi, orientation, tip_load_n, tension_fn);
  double merit = 0.0;
  satisfied(phi, r, limit, kResidualTolNmm, &merit);
  for (int iter = 0; iter < max_iterations; ++iter) {
    out.iterations = iter;
    if (satisfied(phi, r, limit, kResidualTolNmm, &out.worst)) {
      out.converged = true;
      out.phi = phi;
      return out;
    }
    Mat3 jac;
    const double h = 1e-7;
    for (int j = 0; j < kJointCount; ++j) {
      Vec3 hi = phi, lo = phi;
      hi[j] += h;
      lo[j] -= h;
      jac.col(j) = (residual(p, hi, orientation, tip_load_n, tension_fn) -
                    residual(p, lo, orientation, tip_load_n, tension_fn)) /
                   (2.0 * h);
    }
    std::array<int, kJointCount> free_idx{};
    int n_free = 0;
    for (int i = 0; i < kJointCount; ++i) {
      const bool wedged = (phi[i] <= 0.0 && r[i] < 0.0) || (phi[i] >= limit && r[i] > 0.0);
      if (!wedged) free_idx[n_free++] = i;
    }
    if (n_free == 0) {  // fully wedged pose; satisfied() accepts it next pass
      out.converged = satisfied(phi, r, limit, kResidualTolNmm, &out.worst);
      out.phi = phi;
      return out;
    }
    Eigen::MatrixXd jr(n_free, n_free);
    Eigen::VectorXd rr(n_free);
    for (int a = 0; a < n_free; ++a) {
      rr(a) = r[free_idx[a]];
      for (int b = 0; b < n_free; ++b) jr(a, b) = jac(free_idx[a], free_idx[b]);
    }
    const Eigen::VectorXd reduced = jr.fullPivLu().solve(-rr);
    Vec3 step = Vec3::Zero();
    for (int a = 0; a < n_free; ++a) step[free_idx[a]] = reduced(a);
    if (!step.allFinite()) return out;

    double scale = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      Vec3 cand = phi + scale * step;
      for (int i = 0; i < kJointCount; ++i) cand[i] = std::clamp(cand[i], 0.0, limit);
      Vec3 rc = residual(p, cand, orientation, tip_load_n, tension_fn);
      double wc;
      const bool done = satisfied(cand, rc, limit, kResidualTolNmm, &wc);
      if (done || wc < merit * 0.999) {
        phi = cand;
        r = rc;
        merit = wc;
        accepted = true;
        break;
      }
      if ((cand - phi).norm() < 1e-15) break;
      scale *= 0.5;
    }
    if (!accepted) return out;
  }
  return out;
}

// Try a spread of deterministic starts. A hanging tip load makes two
// equilibria coexist (the finger can also flop over the load); the
// measurement rigs hold the finger on the small-angle branch, so that is
// the canonical pick. A scalar bisection on the uniform-curl coordinate
// backs the Newton attempts up.
template <typename TensionFn>
EquilibriumResult solve_balance(const FingerParams& p, Orientation orientation,
                                double tip_load_n, const TensionFn& tension_fn,
                                int max_iterations, Tensions* tensions_out) {
  const double limit = p.effective_joint_limit_rad();
  const int per_attempt = std::max(20, max_iterations / 3);

  const std::array<Vec3, 8> starts = {
      Vec3::Zero(),
      Vec3::Constant(0.25 * limit),
      Vec3::Constant(0.6 * limit),
      Vec3::Constant(limit),
      Vec3(0.0, 0.0, 0.5 * limit),
      Vec3(0.0, 0.5 * limit, limit),
      Vec3(0.0, limit, limit),
      Vec3(0.05 * limit, 0.5 * limit, limit),
  };
  bool found = false;
  Vec3 best = Vec3::Zero();
  double best_alpha = 0.0;
  double best_worst = 0.0;
  int total_iterations = 0;
  for (const Vec3& start : starts) {
    const NewtonOutcome out =
        newton_attempt(p, orientation, tip_load_n, tension_fn, start, per_attempt);
    total_iterations += out.iterations;
    if (!out.converged) continue;
    const double alpha = out.phi.sum();
    if (!found || alpha < best_alpha - 1e-12) {
      found = true;
      best = out.phi;
      best_alpha = alpha;
      best_worst = out.worst;
    }
    // Without a tip load the balance is monotone in each joint and the
    // equilibrium unique; the first converged start is the answer.
    if (tip_load_n == 0.0) break;
  }

  if (!found) {
    // Fallback: bisect the total-bending coordinate with a uniform pose and
    // polish with Newton from there.
    auto total = [&](double t) {
      return residual(p, Vec3::Constant(t * limit), orientation, tip_load_n, tension_fn).sum();
    };
    if (total(0.0) > 0.0 && total(1.0) < 0.0) {
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) > 0.0 ? lo : hi) = mid;
      }
      const NewtonOutcome out = newton_attempt(p, orientation, tip_load_n, tension_fn,
                                               Vec3::Constant(0.5 * (lo + hi) * limit),
                                               per_attempt);
      total_iterations += out.iterations;
      if (out.converged) {
        found = true;
        best = out.phi;
        best_worst = out.worst;
      }
    }
  }
  if (!found) {
    throw NonConvergence(total_iterations, -1.0);
  }
  // Refresh the tension bookkeeping at the chosen pose.
  residual(p, best, orientation, tip_load_n, tension_fn, tensions_out);
  EquilibriumResult res;
  res.state = to_state(p, best);
  res.iterations = total_iterations;
  res.max_residual_nmm = best_worst;
  return res;
}

}  // namespace

std::array<double, 2> gravity_direction(Orientation o) {
  switch (o) {
    case Orientation::VerticalUp: return {-1.0, 0.0};
    case Orientation::VerticalDown: return {1.0, 0.0};
    case Orientation::HorizontalUp: return {0.0, -1.0};
    case Orientation::HorizontalDown: return {0.0, 1.0};
  }
  return {0.0, -1.0};
}

const char* to_string(Orientation o) {
  switch (o) {
    case Orientation::VerticalUp: return "vu";
    case Orientation::VerticalDown: return "vd";
    case Orientation::HorizontalUp: return "hu";
    case Orientation::HorizontalDown: return "hd";
  }
  return "hu";
}

Orientation orientation_from_string(const std::string& s) {
  if (s == "vu") return Orientation::VerticalUp;
  if (s == "vd") return Orientation::VerticalDown;
  if (s == "hu") return Orientation::HorizontalUp;
  if (s == "hd") return Orientation::HorizontalDown;
  throw std::invalid_argument("unknown orientation '" + s + "' (expected vu, vd, hu or hd)");
}

double FingerParams::effective_joint_limit_rad() const {
  return joint_max_angle_deg * bend_limit_scale * kDegToRad;
}

double FingerParams::transmission(int joint_index) const {
  return std::pow(1.0 - tendon_friction_coeff, joint_index);
}

void FingerParams::validate() const {
  for (int i = 0; i < kJointCount; ++i) {
    if (!(joint_stiffness_nmm_per_rad[i] > 0.0)) {
      throw std::invalid_argument("finger.joint_stiffness_nmm_per_rad must be > 0");
    }
    if (!(frontal_arm_mm[i] > 0.0)) {
      throw std::invalid_argument("finger.frontal_arm_mm must be > 0");
    }
    if (!(rear_arm_mm[i] > 0.0)) {
      throw std::invalid_argument("finger.rear_arm_mm must be > 0");
    }
  }
  for (int i = 0; i < kLinkCount; ++i) {
    if (!(link_length_mm[i] > 0.0)) {
      throw std::invalid_argument("finger.link_length_mm must be > 0");
    }
    if (!(link_mass_g[i] > 0.0)) {
      throw std::invalid_argument("finger.link_mass_g must be > 0");
    }
  }
  if (joint_max_angle_deg != 90.0) {
    throw std::invalid_argument("finger.joint_max_angle_deg must be 90 (triangular cut closes)");
  }
  if (!(bend_limit_scale > 0.0) || bend_limit_scale > 1.0) {
    throw std::invalid_argument("finger.bend_limit_scale must lie in (0, 1]");
  }
  if (tendon_friction_coeff < 0.0 || tendon_friction_coeff > 0.1) {
    throw std::invalid_argument("finger.tendon_friction_coeff must lie in [0, 0.1]");
  }
  if (!(lateral_stiffness_nmm_per_rad > 0.0)) {
    throw std::invalid_argument("finger.lateral_stiffness_nmm_per_rad must be > 0");
  }
  if (lateral_tension_gain_per_n < 0.0) {
    throw std::invalid_argument("finger.lateral_tension_gain_per_n must be >= 0");
  }
}

double tendon_displacement(const FingerParams& params,
                           const std::array<double, kJointCount>& joint_angles_deg,
                           Tendon which) {
  const double limit_deg = params.joint_max_angle_deg;
  double sum = 0.0;
  for (int i = 0; i < kJointCount; ++i) {
    const double a = joint_angles_deg[i];
    if (a < -1e-12 || a > limit_deg + 1e-9) {
      throw std::domain_error("joint angle " + std::to_string(a) + " outside [0, " +
                              std::to_string(limit_deg) + "] deg");
    }
    const double arm = which == Tendon::Frontal ? params.frontal_arm_mm[i] : params.rear_arm_mm[i];
    sum += arm * a * kDegToRad;
  }
  return sum;
}

NonConvergence::NonConvergence(int iterations_, double residual_nmm_)
    : std::runtime_error("equilibrium solve failed to converge after " +
                         std::to_string(iterations_) + " iterations (worst residual " +
                         std::to_string(residual_nmm_) + " N*mm)"),
      iterations(iterations_),
      residual_nmm(residual_nmm_) {}

namespace {

struct FixedTensionModel {
  double frontal_n, rear_n;
  Tensions operator()(double, double) const {
    Tensions t;
    t.frontal = frontal_n;
    t.rear = rear_n;
    return t;
  }
};

struct ElasticTensionModel {
  const TendonDrive* frontal;
  const TendonDrive* rear;
  double stroke_frontal_mm = 0.0;  // contraction + pre-stretch
  double stroke_rear_mm = 0.0;
  bool frontal_active = false;
  bool rear_active = false;

  Tensions operator()(double df, double dr) const {
    Tensions t;
    if (frontal_active) {
      t.frontal = string_tension(*frontal, stroke_frontal_mm - df);
      t.d_frontal_d_path = -string_stiffness(*frontal, stroke_frontal_mm - df);
    }
    if (rear_active) {
      t.rear = string_tension(*rear, stroke_rear_mm + dr);
      t.d_rear_d_path = string_stiffness(*rear, stroke_rear_mm + dr);
    }
    return t;
  }
};

}  // namespace

EquilibriumResult equilibrium(const FingerParams& params, double frontal_tension_n,
                              double rear_tension_n, Orientation orientation,
                              double external_tip_load_n, int max_iterations) {
  if (!(frontal_tension_n >= 0.0) || !(rear_tension_n >= 0.0)) {
    throw std::domain_error("tendon tensions must be non-negative");
  }
  if (!std::isfinite(external_tip_load_n)) {
    throw std::domain_error("external tip load must be finite");
  }
  const FixedTensionModel fixed{frontal_tension_n, rear_tension_n};
  return solve_balance(params, orientation, external_tip_load_n, fixed, max_iterations, nullptr);
}

double string_tension(const TendonDrive& drive, double stretch_mm) {
  if (stretch_mm <= 0.0) return 0.0;
  return drive.elastic_coeff_n_per_mm2 * stretch_mm * stretch_mm;
}

double string_stiffness(const TendonDrive& drive, double stretch_mm) {
  if (stretch_mm <= 0.0) return 0.0;
  return 2.0 * drive.elastic_coeff_n_per_mm2 * stretch_mm;
}

DriveSolution solve_drive(const FingerParams& params, const TendonDrive& frontal,
                          const TendonDrive& rear, const DriveCommand& cmd,
                          Orientation orientation, double external_tip_load_n,
                          int max_iterations) {
  ElasticTensionModel elastic;
  elastic.frontal = &frontal;
  elastic.rear = &rear;
  elastic.frontal_active = cmd.frontal_active;
  elastic.rear_active = cmd.rear_active;
  if (cmd.frontal_active) {
    elastic.stroke_frontal_mm =
        contraction(frontal.tsa, cmd.frontal_twist_rot) + frontal.pre_stretch_mm;
  }
  if (cmd.rear_active) {
    elastic.stroke_rear_mm = contraction(rear.tsa, cmd.rear_twist_rot) + rear.pre_stretch_mm;
  }
  Tensions final_tensions{};
  EquilibriumResult eq = solve_balance(params, orientation, external_tip_load_n, elastic,
                                       max_iterations, &final_tensions);
  DriveSolution sol;
  sol.state = eq.state;
  sol.iterations = eq.iterations;
  sol.frontal_tension_n = final_tensions.frontal;
  sol.rear_tension_n = final_tensions.rear;
  return sol;
}

double lateral_deflection(const FingerParams& params, double lateral_load_n,
                          double frontal_tension_n, double rear_tension_n) {
  if (!(lateral_load_n >= 0.0)) {
    throw std::domain_error("lateral load must be non-negative");
  }
  double lever = 0.0;
  for (double l : params.link_length_mm) lever += l;
  const double stiffness =
      params.lateral_stiffness_nmm_per_rad *
      (1.0 + params.lateral_tension_gain_per_n * (frontal_tension_n + rear_tension_n));
  return lateral_load_n * lever / stiffness * kRadToDeg;
}

HysteresisOperator::HysteresisOperator(const HysteresisParams& params) : params_(params) {
  if (params.play_width_deg < 0.0 || params.lonely_stroke_offset_deg < 0.0) {
    throw std::invalid_argument("hysteresis widths must be non-negative");
  }
}

void HysteresisOperator::reset() {
  primed_ = false;
  last_input_deg_ = 0.0;
  branch_memory_deg_ = 0.0;
  travel_deg_ = 0.0;
}

double HysteresisOperator::apply(double raw_alpha_deg) {
  const double r = 0.5 * params_.play_width_deg;
  if (!primed_) {
    primed_ = true;
    branch_memory_deg_ = raw_alpha_deg;  // start centred in the play band
    last_input_deg_ = raw_alpha_deg;
  } else {
    travel_deg_ += std::abs(raw_alpha_deg - last_input_deg_);
    last_input_deg_ = raw_alpha_deg;
    branch_memory_deg_ =
        std::min(std::max(branch_memory_deg_, raw_alpha_deg - r), raw_alpha_deg + r);
  }
  double offset = 0.0;
  if (params_.lonely_stroke_offset_deg > 0.0 && params_.decay_travel_deg > 0.0) {
    const double remaining = std::max(0.0, 1.0 - travel_deg_ / params_.decay_travel_deg);
    offset = params_.lonely_stroke_offset_deg * remaining;
  }
  return branch_memory_deg_ - offset;
}

}  // namespace tsasim
