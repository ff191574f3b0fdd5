#pragma once

#include <string>
#include <vector>

#include "tsasim/run.hpp"

namespace tsasim {

/// Fixed run.csv column order; the file is newline-terminated and numbers
/// carry 9 significant digits.
inline constexpr const char* kRunCsvHeader =
    "t_s,theta_cmd_rot,theta_meas_rot,alpha_true_deg,alpha_meas_deg,"
    "tension_primary_N,tension_antag_N,mass_g";

std::string run_to_csv(const Run& run);

/// Parse a run.csv; metadata comes from the caller (or a manifest). Throws
/// std::runtime_error naming the bad row on malformed input.
Run run_from_csv_text(const std::string& text);
Run load_run_csv(const std::string& path);

/// Whole-file atomic write (temp file + rename).
void write_file_atomic(const std::string& path, const std::string& content);

struct RunManifest {
  std::string run_id;
  std::string utc_timestamp;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string protocol;
  std::string orientation;
  int finger_index = 0;
  std::vector<std::string> outputs;
};

std::string manifest_to_text(const RunManifest& m);
void save_manifest(const RunManifest& m, const std::string& path);

/// Format a double with 9 significant digits, the CSV convention.
std::string csv_number(double v);

}  // namespace tsasim
