// Acceptance suite: runs every headline criterion of the simulator against
// the shipped calibrated configuration and prints one pass/fail line each.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tsasim/actuation.hpp"
#include "tsasim/analysis.hpp"
#include "tsasim/config.hpp"
#include "tsasim/experiments.hpp"
#include "tsasim/finger.hpp"
#include "tsasim/runio.hpp"
#include "tsasim/tsa.hpp"

using namespace tsasim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_s() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// ---- criterion 1: staircase peak bend --------------------------------------

Outcome c1_peak_bend(const GripperConfig& cfg) {
  const double t0 = now_s();
  const Run run = run_protocol(cfg, protocol_from_name("staircase", cfg),
                               Orientation::VerticalUp, 1);
  double peak = 0.0;
  for (const Sample& s : run.samples) peak = std::max(peak, s.alpha_true_deg);
  const double elapsed = now_s() - t0;
  const bool in_band = peak >= 230.6 * 0.95 && peak <= 230.6 * 1.05;
  const bool in_time = elapsed < 10.0;
  return {in_band && in_time,
          "peak " + fmt(peak) + " deg (target 230.6 +-5%), " + fmt(elapsed) + " s"};
}

// ---- criterion 2: blocked force --------------------------------------------

Outcome c2_blocked_force(const GripperConfig& cfg) {
  const double t0 = now_s();
  const double f = blocked_force(cfg);
  const double elapsed = now_s() - t0;
  const bool in_band = f >= 6.8 * 0.85 && f <= 6.8 * 1.15;
  return {in_band && elapsed < 5.0,
          "force " + fmt(f) + " N (target 6.8 +-15%), " + fmt(elapsed) + " s"};
}

// ---- criterion 3: constant deflection --------------------------------------

Outcome c3_constant_deflection(const GripperConfig& cfg) {
  const double t0 = now_s();
  try {
    const auto pts = constant_deflection(cfg, {0, 100, 200, 300, 400, 500}, 1.0);
    bool increasing = true;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (!(pts[i].theta_required_rot > pts[i - 1].theta_required_rot)) increasing = false;
    }
    const double elapsed = now_s() - t0;
    return {increasing && elapsed < 30.0,
            "theta(500g) " + fmt(pts.back().theta_required_rot) + " rot, strictly increasing: " +
                (increasing ? "yes" : "no") + ", " + fmt(elapsed) + " s"};
  } catch (const std::exception& e) {
    return {false, std::string("failed: ") + e.what()};
  }
}

// ---- criterion 4: antagonistic stiffness sweep ------------------------------

Outcome c4_stiffness(const GripperConfig& cfg) {
  const double t0 = now_s();
  try {
    const auto pts = stiffness_sweep(cfg, StiffnessTuning{}, Orientation::HorizontalUp, 4);
    bool non_decreasing = true;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].k_alpha_n_per_deg < pts[i - 1].k_alpha_n_per_deg) non_decreasing = false;
    }
    const double low = std::abs(pts[1].k_alpha_n_per_deg - pts[0].k_alpha_n_per_deg);
    const double high = std::abs(pts[3].k_alpha_n_per_deg - pts[2].k_alpha_n_per_deg);
    const double elapsed = now_s() - t0;
    std::string ks;
    for (const auto& p : pts) ks += fmt(p.k_alpha_n_per_deg) + " ";
    return {non_decreasing && low < high && elapsed < 120.0,
            "K = [ " + ks + "] N/deg, dK(0->8) " + fmt(low) + " < dK(10->15) " + fmt(high) +
                ", " + fmt(elapsed) + " s"};
  } catch (const std::exception& e) {
    return {false, std::string("failed: ") + e.what()};
  }
}

// ---- criterion 5: velocity and jacobian ------------------------------------

Outcome c5_velocity(const GripperConfig& cfg) {
  const Run run = run_protocol(cfg, protocol_from_name("velocity", cfg),
                               Orientation::VerticalUp, 5);
  std::vector<double> theta, t;
  for (const Sample& s : run.samples) {
    theta.push_back(s.theta_meas_rot);
    t.push_back(s.t_s);
  }
  const std::vector<double> smooth = savgol(theta, 11, 3);
  double peak_speed = 0.0;
  for (std::size_t i = 1; i + 1 < smooth.size(); ++i) {
    peak_speed = std::max(peak_speed,
                          std::abs((smooth[i + 1] - smooth[i - 1]) / (t[i + 1] - t[i - 1])));
  }
  const auto series = jacobian_series(run, 11, 3, 0.5);
  std::vector<double> xs, ys;
  for (const auto& p : series) {
    xs.push_back(p.theta_rot);
    ys.push_back(p.jacobian_deg_per_rot);
  }
  const double rho = spearman_rho(xs, ys);
  const bool speed_ok = peak_speed >= 31.37 - 2.0 && peak_speed <= 31.37 + 2.0;
  return {speed_ok && rho > 0.8,
          "peak speed " + fmt(peak_speed) + " rev/s (target 31.37 +-2), spearman rho " +
              fmt(rho) + " (> 0.8), " + std::to_string(series.size()) + " retained samples"};
}

// ---- criterion 6: lonely stroke --------------------------------------------

Outcome c6_lonely_stroke(const GripperConfig& cfg) {
  GripperConfig quiet = cfg;
  quiet.imu.error_bound_deg = 0.0;  // sensor noise disabled
  const Run run = run_protocol(quiet, protocol_from_name("staircase", quiet),
                               Orientation::VerticalUp, 6);
  const double metric = lonely_stroke_metric(run);
  const auto cycles = ascending_cycle_bins(run);
  double later_gap = 0.0;
  bool comparable = cycles.size() >= 4;
  if (comparable) {
    for (std::size_t c = 2; c < 4; ++c) {
      for (const auto& [idx, v] : cycles[1]) {
        auto it = cycles[c].find(idx);
        if (it != cycles[c].end()) later_gap = std::max(later_gap, std::abs(v - it->second));
      }
    }
  }
  return {comparable && metric > 2.0 && later_gap < 1e-6,
          "first-cycle gap " + fmt(metric) + " deg (> 2), later cycles agree to " +
              fmt(later_gap) + " deg (< 1e-6)"};
}

// ---- criterion 7: lateral stiffness ----------------------------------------

Outcome c7_lateral(const GripperConfig& cfg) {
  const auto pts = lateral_stiffness_sweep(cfg, LateralStiffness{});
  bool increasing = pts.size() == 3 && pts[0].k_lateral_n_per_deg < pts[1].k_lateral_n_per_deg &&
                    pts[1].k_lateral_n_per_deg < pts[2].k_lateral_n_per_deg;
  double min_r2 = 1.0;
  for (const auto& p : pts) min_r2 = std::min(min_r2, p.r_squared);
  std::string ks;
  for (const auto& p : pts) ks += fmt(p.k_lateral_n_per_deg) + " ";
  return {increasing && min_r2 > 0.999,
          "K_lat = [ " + ks + "] N/deg increasing, min R^2 " + fmt(min_r2)};
}

// ---- criterion 8: oracle equivalence ----------------------------------------

// Independent brute-force statistics pipeline (own partition, own order
// statistics, own averaging).
double oracle_delta(const Run& run, double q) {
  std::map<std::int64_t, std::vector<double>> bins;
  for (const Sample& s : run.samples) {
    bins[static_cast<std::int64_t>(std::floor(s.theta_meas_rot / 0.1))].push_back(
        s.alpha_meas_deg);
  }
  double total = 0.0;
  for (auto& [idx, values] : bins) {
    auto quant = [&](double level) {
      std::vector<double> sorted(values);
      std::sort(sorted.begin(), sorted.end());
      const double h = level * static_cast<double>(sorted.size() - 1);
      const auto lo = static_cast<std::size_t>(h);
      if (lo + 1 >= sorted.size()) return sorted.back();
      return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
    };
    total += std::abs(quant(q) - quant(0.5));
  }
  return total / static_cast<double>(bins.size());
}

// Independent grid-search energy minimization for the finger equilibrium.
double oracle_grid_alpha(const FingerParams& p, double tf, double tr, Orientation orientation) {
  const double limit = p.effective_joint_limit_rad();
  const double step = std::numbers::pi / 180.0;
  const auto g = gravity_direction(orientation);
  std::vector<double> levels;
  for (double v = 0.0; v < limit; v += step) levels.push_back(v);
  levels.push_back(limit);
  double best = 1e300;
  double best_alpha = 0.0;
  for (double a : levels) {
    for (double b : levels) {
      for (double c : levels) {
        double e = 0.0;
        const double phi[3] = {a, b, c};
        for (int i = 0; i < 3; ++i) {
          e += 0.5 * p.joint_stiffness_nmm_per_rad[i] * phi[i] * phi[i];
          const double eta = std::pow(1.0 - p.tendon_friction_coeff, i);
          e -= (tf * p.frontal_arm_mm[i] - tr * p.rear_arm_mm[i]) * eta * phi[i];
        }
        double heading = 0.0, x = 0.0, y = 0.0;
        for (int link = 1; link <= 4; ++link) {
          if (link >= 2) heading += phi[link - 2];
          const double len = p.link_length_mm[link - 1];
          const double cx = x + 0.5 * len * std::cos(heading);
          const double cy = y + 0.5 * len * std::sin(heading);
          e -= p.link_mass_g[link - 1] * 9.80665e-3 * (g[0] * cx + g[1] * cy);
          x += len * std::cos(heading);
          y += len * std::sin(heading);
        }
        if (e < best) {
          best = e;
          best_alpha = (a + b + c) * 180.0 / std::numbers::pi;
        }
      }
    }
  }
  return best_alpha;
}

Outcome c8_oracles(const GripperConfig& cfg) {
  // (a) statistics pipeline, exact agreement on 50 seeded synthetic datasets
  int pipeline_fail = 0;
  for (int dataset = 0; dataset < 50; ++dataset) {
    Run run;
    const int n = 60 + dataset * 5;
    for (int i = 0; i < n; ++i) {
      Sample s;
      s.theta_meas_rot = 2.6 * seeded_uniform(900 + dataset, i);
      s.alpha_meas_deg = 230.0 * seeded_uniform(950 + dataset, i);
      run.samples.push_back(s);
    }
    const BinnedSeries b = bin_by_motor_angle(run);
    for (double q : {0.0, 0.25, 0.75, 1.0}) {
      if (delta_q(b, q) != oracle_delta(run, q)) ++pipeline_fail;
    }
  }

  // (b) Savitzky-Golay reproduces cubics to 1e-9
  double savgol_err = 0.0;
  {
    std::vector<double> cubic;
    for (int i = 0; i < 99; ++i) {
      const double x = 0.07 * i;
      cubic.push_back(1.5 * x * x * x - 0.4 * x * x + 2.0 * x - 3.0);
    }
    const auto out = savgol(cubic, 11, 3);
    for (std::size_t i = 0; i < cubic.size(); ++i) {
      savgol_err = std::max(savgol_err, std::abs(out[i] - cubic[i]));
    }
  }

  // (c) analytic jacobian vs central differences at 100 random twists
  double jac_err = 0.0;
  {
    const TsaParams& tsa = cfg.finger_primary[0].tsa;
    const double h = 1e-4;
    for (int i = 0; i < 100; ++i) {
      const double t = h + seeded_uniform(999, i) * (tsa.max_twist_rot - 2 * h);
      const double fd = (contraction(tsa, t + h) - contraction(tsa, t - h)) / (2 * h);
      jac_err = std::max(jac_err, std::abs(linear_jacobian(tsa, t) - fd) / std::abs(fd));
    }
  }

  // (d) equilibrium solver vs grid-search energy minimization, 20 cases
  double eq_err = 0.0;
  {
    const FingerParams& finger = cfg.fingers[0];
    for (int i = 0; i < 20; ++i) {
      const double tf = 0.2 + 2.3 * seeded_uniform(777, i);
      const double tr = 0.6 * tf * seeded_uniform(778, i);
      const auto orientation = static_cast<Orientation>(i % 4);
      const auto r = equilibrium(finger, tf, tr, orientation, 0.0);
      const double oracle = oracle_grid_alpha(finger, tf, tr, orientation);
      eq_err = std::max(eq_err, std::abs(r.state.fingertip_angle_deg - oracle));
    }
  }

  const bool pass = pipeline_fail == 0 && savgol_err < 1e-9 && jac_err < 1e-6 && eq_err < 2.0;
  return {pass, "pipeline mismatches " + std::to_string(pipeline_fail) + ", savgol err " +
                    fmt(savgol_err) + ", jacobian rel err " + fmt(jac_err) +
                    ", equilibrium vs grid " + fmt(eq_err) + " deg"};
}

// ---- criterion 9: CLI determinism ------------------------------------------

Outcome c9_determinism(const std::string& config_path) {
  const std::string cli = TSASIM_CLI_PATH;
  fs::remove_all("acc_run_a");
  fs::remove_all("acc_run_b");
  const std::string args = " run --config " + config_path +
                           " --protocol staircase --orientation vu --seed 42 --out ";
  if (std::system((cli + args + "acc_run_a > /dev/null 2>&1").c_str()) != 0 ||
      std::system((cli + args + "acc_run_b > /dev/null 2>&1").c_str()) != 0) {
    return {false, "cli invocation failed"};
  }
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };
  const std::string a = slurp("acc_run_a/run.csv");
  const std::string b = slurp("acc_run_b/run.csv");
  if (a.empty() || a != b) return {false, "run.csv differs between invocations"};

  const Run run = load_run_csv("acc_run_a/run.csv");
  double worst = 0.0;
  for (const Sample& s : run.samples) {
    const double counts = s.theta_meas_rot * 360.0;
    worst = std::max(worst, std::abs(counts - std::round(counts)));
  }
  return {worst < 1e-5, "byte-identical run.csv (" + std::to_string(a.size()) +
                            " bytes), encoder off-grid by " + fmt(worst) + " counts"};
}

// ---- criterion 10: thumb coupling -------------------------------------------

Outcome c10_thumb(const GripperConfig& cfg) {
  const ThumbPose rest = thumb_pose(cfg.thumb, 0.0, 0.0, Orientation::VerticalUp);
  const ThumbPose bent = thumb_pose(cfg.thumb, 18.0, 0.0, Orientation::VerticalUp);
  const ThumbPose rolled = thumb_pose(cfg.thumb, 0.0, 14.0, Orientation::VerticalUp);
  const double bx = std::abs(bent.euler_x_deg - rest.euler_x_deg);
  const double by = std::abs(bent.euler_y_deg - rest.euler_y_deg);
  const double bz = std::abs(bent.euler_z_deg - rest.euler_z_deg);
  const double rx = std::abs(rolled.euler_x_deg - rest.euler_x_deg);
  const double ry = std::abs(rolled.euler_y_deg - rest.euler_y_deg);
  const double rz = std::abs(rolled.euler_z_deg - rest.euler_z_deg);
  bool saturates = false;
  bool capped = true;
  for (double twist = 0.0; twist <= 26.0; twist += 0.5) {
    const double roll = thumb_pose(cfg.thumb, 0.0, twist, Orientation::VerticalUp).roll_angle_deg;
    if (roll == 90.0) saturates = true;
    if (roll > 90.0) capped = false;
  }
  const bool pass = bx > by && bx > bz && ry > rx && ry > rz && rx > 0.05 && rz > 0.05 &&
                    saturates && capped;
  return {pass, "bend dx " + fmt(bx) + " > (" + fmt(by) + ", " + fmt(bz) + "); roll dy " +
                    fmt(ry) + " > (" + fmt(rx) + ", " + fmt(rz) + "); roll saturates at 90: " +
                    (saturates && capped ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::string config_path = std::string(TSASIM_DATA_DIR) + "/default_gripper.cfg";
  GripperConfig cfg;
  try {
    cfg = load_config(config_path);
    cfg.validate();
  } catch (const std::exception& e) {
    std::printf("[FAIL] C0: load calibrated config: %s\n", e.what());
    return 1;
  }

  struct Entry {
    int id;
    const char* name;
    Outcome outcome;
  };
  std::vector<Entry> entries;
  entries.push_back({1, "staircase peak bend 230.6 deg +-5%", c1_peak_bend(cfg)});
  entries.push_back({2, "blocked force 6.8 N +-15%", c2_blocked_force(cfg)});
  entries.push_back({3, "constant deflection through 500 g", c3_constant_deflection(cfg)});
  entries.push_back({4, "stiffness sweep ordering", c4_stiffness(cfg)});
  entries.push_back({5, "velocity peak and jacobian correlation", c5_velocity(cfg)});
  entries.push_back({6, "lonely stroke", c6_lonely_stroke(cfg)});
  entries.push_back({7, "lateral stiffness vs pre-twist", c7_lateral(cfg)});
  entries.push_back({8, "oracle equivalence", c8_oracles(cfg)});
  entries.push_back({9, "run determinism and encoder grid", c9_determinism(config_path)});
  entries.push_back({10, "thumb coupling and roll saturation", c10_thumb(cfg)});

  int failures = 0;
  for (const auto& e : entries) {
    if (!e.outcome.pass) ++failures;
    std::printf("[%s] C%d: %s -- %s\n", e.outcome.pass ? "PASS" : "FAIL", e.id, e.name,
                e.outcome.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(entries.size()) - failures,
              entries.size());
  return failures;
}
