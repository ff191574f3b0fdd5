#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "tsasim/analysis.hpp"
#include "tsasim/calibrate.hpp"
#include "tsasim/config.hpp"
#include "tsasim/experiments.hpp"
#include "tsasim/runio.hpp"
#include "tsasim/svg.hpp"

namespace fs = std::filesystem;
using namespace tsasim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitIo = 4;
constexpr int kExitCalibration = 5;

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string default_out() {
  if (const char* env = std::getenv("TSASIM_OUT")) return env;
  return ".";
}

struct RunJob {
  int finger = 0;
  Orientation orientation = Orientation::VerticalUp;
  std::uint64_t seed = 0;
  std::string file_name;
};

int cmd_run(const std::string& config_path, const std::string& protocol_name,
            const std::string& orientation_arg, const std::string& finger_arg, std::uint64_t seed,
            const std::string& out_dir, unsigned jobs) {
  GripperConfig config;
  Protocol protocol;
  try {
    config = load_config(config_path);
    config.validate();
    protocol = protocol_from_name(protocol_name, config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  std::vector<int> fingers;
  if (finger_arg == "all") {
    fingers = {0, 1, 2, 3};
  } else {
    fingers = {std::stoi(finger_arg)};
  }
  std::vector<Orientation> orientations;
  if (orientation_arg == "all") {
    orientations = {Orientation::VerticalUp, Orientation::VerticalDown,
                    Orientation::HorizontalUp, Orientation::HorizontalDown};
  } else {
    try {
      orientations = {orientation_from_string(orientation_arg)};
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfig;
    }
  }

  std::vector<RunJob> jobs_list;
  const bool single = fingers.size() == 1 && orientations.size() == 1;
  for (int f : fingers) {
    for (Orientation o : orientations) {
      RunJob j;
      j.finger = f;
      j.orientation = o;
      // Stable per-run seeds so suites replay independent of scheduling.
      j.seed = seed + static_cast<std::uint64_t>(f) * 16 +
               static_cast<std::uint64_t>(static_cast<int>(o)) * 4;
      j.file_name = single ? "run.csv"
                           : "run_f" + std::to_string(f) + "_" + to_string(o) + ".csv";
      jobs_list.push_back(j);
    }
  }

  try {
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }

  std::vector<std::string> outputs;
  const unsigned pool = std::max(1u, jobs);
  std::atomic<int> failures{0};
  std::string first_error;
  std::mutex err_mutex;
  for (std::size_t begin = 0; begin < jobs_list.size(); begin += pool) {
    std::vector<std::future<void>> batch;
    const std::size_t end = std::min(jobs_list.size(), begin + pool);
    for (std::size_t i = begin; i < end; ++i) {
      const RunJob& j = jobs_list[i];
      batch.push_back(std::async(std::launch::async, [&, j]() {
        try {
          const Run run = run_protocol(config, protocol, j.orientation, j.seed, j.finger);
          write_file_atomic((fs::path(out_dir) / j.file_name).string(), run_to_csv(run));
        } catch (const std::exception& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (first_error.empty()) first_error = e.what();
          ++failures;
        }
      }));
    }
    for (auto& f : batch) f.get();
  }
  if (failures > 0) {
    std::cerr << "simulation error: " << first_error << "\n";
    return kExitSimulation;
  }
  for (const auto& j : jobs_list) outputs.push_back(j.file_name);

  // Protocol-level summary tables beyond the raw runs.
  try {
    if (std::holds_alternative<StiffnessTuning>(protocol)) {
      std::vector<Run> seg_runs;
      const auto points = stiffness_sweep(config, std::get<StiffnessTuning>(protocol),
                                          orientations[0], seed, &seg_runs, fingers[0]);
      std::ostringstream csv;
      csv << "pretwist_rot,antagonist_twist_rot,k_alpha_N_per_deg\n";
      for (const auto& p : points) {
        csv << csv_number(p.pretwist_rot) << ',' << csv_number(p.antagonist_twist_rot) << ','
            << csv_number(p.k_alpha_n_per_deg) << '\n';
      }
      write_file_atomic((fs::path(out_dir) / "stiffness.csv").string(), csv.str());
      outputs.push_back("stiffness.csv");
      for (std::size_t i = 0; i < seg_runs.size(); ++i) {
        const std::string name = "run_p" + std::to_string(i) + ".csv";
        write_file_atomic((fs::path(out_dir) / name).string(), run_to_csv(seg_runs[i]));
        outputs.push_back(name);
      }
    } else if (std::holds_alternative<LateralStiffness>(protocol)) {
      const auto points =
          lateral_stiffness_sweep(config, std::get<LateralStiffness>(protocol), fingers[0]);
      std::ostringstream csv;
      csv << "pretwist_rot,k_lateral_N_per_deg,r_squared\n";
      for (const auto& p : points) {
        csv << csv_number(p.pretwist_rot) << ',' << csv_number(p.k_lateral_n_per_deg) << ','
            << csv_number(p.r_squared) << '\n';
      }
      write_file_atomic((fs::path(out_dir) / "lateral.csv").string(), csv.str());
      outputs.push_back("lateral.csv");
    } else if (std::holds_alternative<BlockedForce>(protocol)) {
      std::ostringstream csv;
      csv << "blocked_force_N\n" << csv_number(blocked_force(config)) << '\n';
      write_file_atomic((fs::path(out_dir) / "blocked_force.csv").string(), csv.str());
      outputs.push_back("blocked_force.csv");
    } else if (std::holds_alternative<ConstantDeflection>(protocol)) {
      const auto& p = std::get<ConstantDeflection>(protocol);
      const auto points =
          constant_deflection(config, p.masses_g, p.tolerance_deg, orientations[0], fingers[0]);
      std::ostringstream csv;
      csv << "mass_g,theta_required_rot\n";
      for (const auto& d : points) {
        csv << csv_number(d.mass_g) << ',' << csv_number(d.theta_required_rot) << '\n';
      }
      write_file_atomic((fs::path(out_dir) / "deflection.csv").string(), csv.str());
      outputs.push_back("deflection.csv");
    }
  } catch (const Unreachable& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }

  RunManifest manifest;
  manifest.run_id = protocol_name + "_" + finger_arg + "_" + orientation_arg + "_" +
                    std::to_string(seed);
  manifest.utc_timestamp = utc_now();
  manifest.seed = seed;
  manifest.config_hash = config_hash(config);
  manifest.protocol = protocol_name;
  manifest.orientation = orientation_arg;
  manifest.finger_index = fingers[0];
  manifest.outputs = outputs;
  try {
    save_manifest(manifest, (fs::path(out_dir) / "manifest.txt").string());
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}

/// Steady readings at the tail of each constant-mass hold of a run.
struct HoldReading {
  double mass_g = 0.0;
  double alpha_deg = 0.0;
  double tension_antag_n = 0.0;
};

std::vector<HoldReading> hold_readings(const Run& run, std::size_t tail = 100) {
  std::vector<HoldReading> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= run.samples.size(); ++i) {
    if (i == run.samples.size() || run.samples[i].mass_g != run.samples[start].mass_g) {
      const std::size_t lo = i > tail ? i - tail : start;
      double acc = 0.0, ten = 0.0;
      for (std::size_t k = std::max(lo, start); k < i; ++k) {
        acc += run.samples[k].alpha_meas_deg;
        ten += run.samples[k].tension_antag_n;
      }
      const double n = static_cast<double>(i - std::max(lo, start));
      out.push_back({run.samples[start].mass_g, acc / n, ten / n});
      start = i;
    }
  }
  return out;
}

int cmd_analyze(const std::vector<std::string>& run_paths, const std::string& analysis,
                const std::string& out_dir) {
  if (run_paths.empty()) {
    std::cerr << "analyze error: no run files given\n";
    return kExitConfig;
  }
  std::vector<Run> runs;
  for (const auto& p : run_paths) {
    try {
      Run r = load_run_csv(p);
      r.protocol = p;
      runs.push_back(std::move(r));
    } catch (const std::exception& e) {
      std::cerr << "analyze error: " << e.what() << "\n";
      return kExitConfig;
    }
  }
  try {
    fs::create_directories(out_dir);
    if (analysis == "position") {
      BinnedSeries pooled;
      for (const auto& r : runs) pooled.merge(bin_by_motor_angle(r));
      const SummaryStats stats = summarize(pooled);
      std::ostringstream csv;
      csv << "bin_center_rot,count,min_deg,q05_deg,q25_deg,median_deg,q75_deg,q95_deg,max_deg\n";
      std::vector<double> bx, bmin, bmax, bq25, bq75, bmed;
      for (const auto& b : stats.bins) {
        csv << csv_number(b.bin_center_rot) << ',' << b.count << ',' << csv_number(b.min) << ','
            << csv_number(b.q05) << ',' << csv_number(b.q25) << ',' << csv_number(b.median) << ','
            << csv_number(b.q75) << ',' << csv_number(b.q95) << ',' << csv_number(b.max) << '\n';
        bx.push_back(b.bin_center_rot);
        bmin.push_back(b.min);
        bmax.push_back(b.max);
        bq25.push_back(b.q25);
        bq75.push_back(b.q75);
        bmed.push_back(b.median);
      }
      write_file_atomic((fs::path(out_dir) / "stats.csv").string(), csv.str());
      SvgPlot plot("Moving box-and-whisker: fingertip angle vs motor angle", "motor angle (rot)",
                   "fingertip angle (deg)");
      plot.add_band(bx, bmin, bmax, "#9ecae1", 0.35);
      plot.add_band(bx, bq25, bq75, "#4292c6", 0.45);
      plot.add_line(bx, bmed, "#08306b", "median");
      plot.save((fs::path(out_dir) / "stats.svg").string());

      std::ostringstream dcsv;
      dcsv << "run,delta_0_deg,delta_25_deg,delta_75_deg,delta_1_deg\n";
      std::vector<double> idx, d0, d25, d75, d1;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const BinnedSeries b = bin_by_motor_angle(runs[i]);
        dcsv << i << ',' << csv_number(delta_q(b, 0.0)) << ',' << csv_number(delta_q(b, 0.25))
             << ',' << csv_number(delta_q(b, 0.75)) << ',' << csv_number(delta_q(b, 1.0)) << '\n';
        idx.push_back(static_cast<double>(i));
        d0.push_back(delta_q(b, 0.0));
        d25.push_back(delta_q(b, 0.25));
        d75.push_back(delta_q(b, 0.75));
        d1.push_back(delta_q(b, 1.0));
      }
      dcsv << "pooled," << csv_number(stats.delta_0) << ',' << csv_number(stats.delta_25) << ','
           << csv_number(stats.delta_75) << ',' << csv_number(stats.delta_1) << '\n';
      write_file_atomic((fs::path(out_dir) / "delta.csv").string(), dcsv.str());
      SvgPlot dplot("Quantile distances from the median", "run", "delta (deg)");
      dplot.add_line(idx, d0, "#d73027", "delta_0");
      dplot.add_line(idx, d25, "#fc8d59", "delta_0.25");
      dplot.add_line(idx, d75, "#91bfdb", "delta_0.75");
      dplot.add_line(idx, d1, "#4575b4", "delta_1");
      dplot.save((fs::path(out_dir) / "delta.svg").string());
    } else if (analysis == "jacobian") {
      std::ostringstream csv;
      csv << "theta_rot,jacobian_deg_per_rot\n";
      std::vector<double> xs, ys;
      for (const auto& r : runs) {
        for (const auto& pt : jacobian_series(r, 11, 3, 0.5)) {
          csv << csv_number(pt.theta_rot) << ',' << csv_number(pt.jacobian_deg_per_rot) << '\n';
          xs.push_back(pt.theta_rot);
          ys.push_back(pt.jacobian_deg_per_rot);
        }
      }
      write_file_atomic((fs::path(out_dir) / "jacobian.csv").string(), csv.str());
      SvgPlot plot("Jacobian vs motor angle", "motor angle (rot)", "jacobian (deg/rot)");
      plot.add_points(xs, ys, "#2b8cbe", 1.5);
      plot.save((fs::path(out_dir) / "jacobian.svg").string());
    } else if (analysis == "stiffness") {
      std::ostringstream csv;
      csv << "run,k_alpha_N_per_deg,mean_antag_tension_N\n";
      std::vector<double> idx, ks;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto reads = hold_readings(runs[i]);
        // Group into loading passes: ascending mass steps form one pass.
        std::vector<std::vector<HoldReading>> passes;
        for (std::size_t k = 0; k < reads.size(); ++k) {
          if (k == 0 || reads[k].mass_g < reads[k - 1].mass_g) passes.emplace_back();
          if (k == 0 || reads[k].mass_g > reads[k - 1].mass_g || passes.back().empty()) {
            passes.back().push_back(reads[k]);
          }
        }
        // Ascending passes are those that grew; the fit uses the second one.
        std::vector<std::vector<HoldReading>> ascending;
        for (auto& p : passes) {
          if (p.size() >= 2) ascending.push_back(p);
        }
        if (ascending.size() < 2) continue;
        const auto& pass = ascending[1];
        std::vector<double> loads, defl;
        double ten = 0.0;
        for (std::size_t k = 1; k < pass.size(); ++k) {
          loads.push_back(pass[k].mass_g * 9.80665e-3);
          defl.push_back(pass[0].alpha_deg - pass[k].alpha_deg);
          ten += pass[k].tension_antag_n;
        }
        const double k_alpha = fit_stiffness(loads, defl);
        csv << i << ',' << csv_number(k_alpha) << ','
            << csv_number(ten / static_cast<double>(pass.size() - 1)) << '\n';
        idx.push_back(static_cast<double>(i));
        ks.push_back(k_alpha);
      }
      write_file_atomic((fs::path(out_dir) / "stiffness.csv").string(), csv.str());
      SvgPlot plot("Bending stiffness per run", "run", "K_alpha (N/deg)");
      plot.add_points(idx, ks, "#542788", 3.0);
      plot.add_line(idx, ks, "#542788");
      plot.save((fs::path(out_dir) / "stiffness.svg").string());
    } else if (analysis == "lateral") {
      std::ostringstream csv;
      csv << "run,segment,k_lateral_N_per_deg,r_squared\n";
      std::vector<double> idx, ks;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto reads = hold_readings(runs[i]);
        std::vector<std::vector<HoldReading>> segments;
        for (std::size_t k = 0; k < reads.size(); ++k) {
          if (k == 0 || reads[k].mass_g < reads[k - 1].mass_g) segments.emplace_back();
          segments.back().push_back(reads[k]);
        }
        int seg_index = 0;
        for (const auto& seg : segments) {
          std::vector<double> loads, defl;
          for (const auto& r : seg) {
            if (r.mass_g <= 0.0) continue;
            loads.push_back(r.mass_g * 9.80665e-3);
            defl.push_back(r.alpha_deg);
          }
          if (loads.size() < 2) continue;
          const double k_lat = fit_stiffness(loads, defl);
          csv << i << ',' << seg_index << ',' << csv_number(k_lat) << ','
              << csv_number(r_squared_through_origin(defl, loads)) << '\n';
          idx.push_back(static_cast<double>(ks.size()));
          ks.push_back(k_lat);
          ++seg_index;
        }
      }
      write_file_atomic((fs::path(out_dir) / "lateral.csv").string(), csv.str());
      SvgPlot plot("Lateral stiffness per pre-twist segment", "segment", "K_lateral (N/deg)");
      plot.add_points(idx, ks, "#1a9850", 3.0);
      plot.add_line(idx, ks, "#1a9850");
      plot.save((fs::path(out_dir) / "lateral.svg").string());
    } else {
      std::cerr << "analyze error: unknown analysis '" << analysis << "'\n";
      return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "analyze error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& out_path, double target_bend,
                  double target_force, bool no_bend, bool no_force) {
  GripperConfig config;
  try {
    config = load_config(config_path);
    config.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  CalibrationTargets targets;
  if (!no_bend) targets.max_bend_deg = target_bend;
  if (!no_force) targets.blocked_force_n = target_force;
  try {
    const CalibrationResult result = calibrate(config, targets);
    std::ostringstream header;
    header << "gripper configuration";
    if (result.changed) {
      header << ", calibrated " << utc_now() << "\n" << result.notes;
    } else {
      header << " (targets already satisfied; unchanged)";
    }
    save_config(result.config, out_path, header.str());
    std::cout << "max bend: " << evaluate_max_bend_deg(result.config)
              << " deg, blocked force: " << blocked_force(result.config) << " N\n";
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n";
    return kExitCalibration;
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-static simulator and characterization toolkit for a "
               "twisted-string-actuated soft gripper"};
  app.require_subcommand(1);

  std::string config_path, protocol = "staircase", orientation = "vu", finger = "0";
  std::string out_dir = default_out();
  std::uint64_t seed = 42;
  unsigned jobs = 1;

  auto* run = app.add_subcommand("run", "Execute a protocol and persist the run");
  run->add_option("--config", config_path, "gripper config file")->required();
  run->add_option("--protocol", protocol, "one of: staircase random blocked "
                                          "constant-deflection stiffness lateral velocity");
  run->add_option("--orientation", orientation, "vu, vd, hu, hd or all");
  run->add_option("--finger", finger, "finger index 0-3 or all");
  run->add_option("--seed", seed, "run seed");
  run->add_option("--out", out_dir, "output directory (default $TSASIM_OUT or .)");
  run->add_option("--jobs", jobs, "parallel workers for multi-run suites");

  std::vector<std::string> run_paths;
  std::string analysis = "position";
  auto* analyze = app.add_subcommand("analyze", "Compute statistics tables and plots from runs");
  analyze->add_option("runs", run_paths, "run.csv files");
  analyze->add_option("--analysis", analysis, "position, jacobian, stiffness or lateral");
  analyze->add_option("--out", out_dir, "output directory");

  std::string calib_out = "calibrated.cfg";
  double target_bend = 230.6, target_force = 6.8;
  bool no_bend = false, no_force = false;
  auto* calib = app.add_subcommand("calibrate", "Search free parameters to meet the targets");
  calib->add_option("--config", config_path, "gripper config file")->required();
  calib->add_option("--out", calib_out, "calibrated config output path");
  calib->add_option("--target-bend", target_bend, "peak fingertip angle target (deg)");
  calib->add_option("--target-force", target_force, "blocked force target (N)");
  calib->add_flag("--no-bend", no_bend, "skip the bend target");
  calib->add_flag("--no-force", no_force, "skip the force target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) {
    return cmd_run(config_path, protocol, orientation, finger, seed, out_dir, jobs);
  }
  if (analyze->parsed()) {
    return cmd_analyze(run_paths, analysis, out_dir);
  }
  if (calib->parsed()) {
    return cmd_calibrate(config_path, calib_out, target_bend, target_force, no_bend, no_force);
  }
  return kExitConfig;
}
