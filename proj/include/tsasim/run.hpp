#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tsasim {

/// One 10 ms sample of a simulated experiment. theta_meas_rot is always an
/// encoder-quantized value (an integer number of counts over 360).
struct Sample {
  double t_s = 0.0;
  double theta_cmd_rot = 0.0;
  double theta_meas_rot = 0.0;
  double alpha_true_deg = 0.0;
  double alpha_meas_deg = 0.0;
  double tension_primary_n = 0.0;
  double tension_antag_n = 0.0;
  double mass_g = 0.0;
};

/// Time-stamped record of one simulated experiment.
struct Run {
  std::string protocol;
  std::string orientation;
  int finger_index = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<Sample> samples;
};

}  // namespace tsasim
