#include "tsasim/runio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tsasim {

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string run_to_csv(const Run& run) {
  std::ostringstream out;
  out << kRunCsvHeader << '\n';
  for (const Sample& s : run.samples) {
    out << csv_number(s.t_s) << ',' << csv_number(s.theta_cmd_rot) << ','
        << csv_number(s.theta_meas_rot) << ',' << csv_number(s.alpha_true_deg) << ','
        << csv_number(s.alpha_meas_deg) << ',' << csv_number(s.tension_primary_n) << ','
        << csv_number(s.tension_antag_n) << ',' << csv_number(s.mass_g) << '\n';
  }
  return out.str();
}

Run run_from_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kRunCsvHeader) {
    throw std::runtime_error("run.csv row 1: bad or missing header");
  }
  Run run;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    double v[8];
    std::istringstream ls(line);
    std::string tok;
    for (int i = 0; i < 8; ++i) {
      if (!std::getline(ls, tok, ',')) {
        throw std::runtime_error("run.csv row " + std::to_string(row) + ": expected 8 columns");
      }
      try {
        std::size_t pos = 0;
        v[i] = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw std::runtime_error("run.csv row " + std::to_string(row) + ": bad number '" + tok +
                                 "'");
      }
    }
    if (std::getline(ls, tok, ',')) {
      throw std::runtime_error("run.csv row " + std::to_string(row) + ": too many columns");
    }
    run.samples.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
  }
  return run;
}

Run load_run_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open run file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_from_csv_text(buf.str());
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

std::string manifest_to_text(const RunManifest& m) {
  std::ostringstream out;
  out << "run_id = \"" << m.run_id << "\"\n";
  out << "utc_timestamp = \"" << m.utc_timestamp << "\"\n";
  out << "seed = " << m.seed << "\n";
  out << "config_hash = \"" << m.config_hash << "\"\n";
  out << "protocol = \"" << m.protocol << "\"\n";
  out << "orientation = \"" << m.orientation << "\"\n";
  out << "finger = " << m.finger_index << "\n";
  out << "outputs = [";
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    out << (i ? ", " : "") << '"' << m.outputs[i] << '"';
  }
  out << "]\n";
  return out.str();
}

void save_manifest(const RunManifest& m, const std::string& path) {
  write_file_atomic(path, manifest_to_text(m));
}

}  // namespace tsasim
