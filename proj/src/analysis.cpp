#include "tsasim/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tsasim {

std::size_t BinnedSeries::total_samples() const {
  std::size_t n = 0;
  for (const auto& [idx, values] : bins) n += values.size();
  return n;
}

void BinnedSeries::merge(const BinnedSeries& other) {
  for (const auto& [idx, values] : other.bins) {
    auto& dst = bins[idx];
    dst.insert(dst.end(), values.begin(), values.end());
  }
}

double quantile(std::vector<double> data, double q) {
  if (data.empty()) {
    throw std::domain_error("quantile of empty data");
  }
  if (q < 0.0 || q > 1.0) {
    throw std::domain_error("quantile level must lie in [0, 1]");
  }
  std::sort(data.begin(), data.end());
  const double h = q * static_cast<double>(data.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= data.size()) return data.back();
  const double frac = h - static_cast<double>(lo);
  return data[lo] + frac * (data[lo + 1] - data[lo]);
}

BinnedSeries bin_by_motor_angle(const Run& run) {
  if (run.samples.empty()) {
    throw std::domain_error("cannot bin an empty run");
  }
  BinnedSeries out;
  for (const Sample& s : run.samples) {
    const auto idx = static_cast<std::int64_t>(std::floor(s.theta_meas_rot / kBinWidthRot));
    out.bins[idx].push_back(s.alpha_meas_deg);
  }
  return out;
}

double delta_q(const BinnedSeries& binned, double q) {
  if (q < 0.0 || q > 1.0) {
    throw std::domain_error("quantile level must lie in [0, 1]");
  }
  if (binned.bins.empty()) {
    throw std::domain_error("delta_q of empty binned series");
  }
  double acc = 0.0;
  for (const auto& [idx, values] : binned.bins) {
    acc += std::abs(quantile(values, q) - quantile(values, 0.5));
  }
  return acc / static_cast<double>(binned.bins.size());
}

SummaryStats summarize(const BinnedSeries& binned) {
  SummaryStats out;
  out.bins.reserve(binned.bins.size());
  for (const auto& [idx, values] : binned.bins) {
    BinStats b;
    b.bin_center_rot = (static_cast<double>(idx) + 0.5) * kBinWidthRot;
    b.count = values.size();
    b.min = quantile(values, 0.0);
    b.q05 = quantile(values, 0.05);
    b.q25 = quantile(values, 0.25);
    b.median = quantile(values, 0.5);
    b.q75 = quantile(values, 0.75);
    b.q95 = quantile(values, 0.95);
    b.max = quantile(values, 1.0);
    out.bins.push_back(b);
  }
  out.delta_0 = delta_q(binned, 0.0);
  out.delta_25 = delta_q(binned, 0.25);
  out.delta_75 = delta_q(binned, 0.75);
  out.delta_1 = delta_q(binned, 1.0);
  return out;
}

std::vector<double> savgol(const std::vector<double>& series, int window, int order) {
  if (window < 1 || window % 2 == 0) {
    throw std::invalid_argument("savgol window must be odd and positive");
  }
  if (order < 0 || order >= window) {
    throw std::invalid_argument("savgol order must satisfy 0 <= order < window");
  }
  if (series.size() < static_cast<std::size_t>(window)) {
    throw std::length_error("series shorter than the savgol window");
  }
  const int n = static_cast<int>(series.size());
  const int half = window / 2;

  // Weights for evaluating the window's least-squares polynomial at offset
  // e from the window centre: w(e) = V (V^T V)^{-1} t(e).
  Eigen::MatrixXd vand(window, order + 1);
  for (int i = 0; i < window; ++i) {
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      vand(i, j) = p;
      p *= static_cast<double>(i - half);
    }
  }
  const Eigen::MatrixXd gram = (vand.transpose() * vand).inverse();
  auto weights_at = [&](double offset) {
    Eigen::VectorXd t(order + 1);
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      t(j) = p;
      p *= offset;
    }
    return Eigen::VectorXd(vand * (gram * t));
  };

  const Eigen::VectorXd centre = weights_at(0.0);
  std::vector<double> out(series.size());
  for (int i = 0; i < n; ++i) {
    int start = std::clamp(i - half, 0, n - window);
    const double offset = static_cast<double>(i - start - half);
    const Eigen::VectorXd& w = (offset == 0.0) ? centre : weights_at(offset);
    double acc = 0.0;
    for (int k = 0; k < window; ++k) acc += w(k) * series[start + k];
    out[i] = acc;
  }
  return out;
}

std::vector<JacobianPoint> jacobian_series(const Run& run, int window, int order,
                                           double speed_floor_rps) {
  const std::size_t n = run.samples.size();
  if (n < static_cast<std::size_t>(window)) {
    throw std::length_error("run shorter than the savgol window");
  }
  std::vector<double> theta(n), alpha(n), t(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = run.samples[i].theta_meas_rot;
    alpha[i] = run.samples[i].alpha_meas_deg;
    t[i] = run.samples[i].t_s;
  }
  const std::vector<double> theta_s = savgol(theta, window, order);
  const std::vector<double> alpha_s = savgol(alpha, window, order);

  std::vector<JacobianPoint> out;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dt = t[i + 1] - t[i - 1];
    if (!(dt > 0.0)) continue;
    const double dtheta = (theta_s[i + 1] - theta_s[i - 1]) / dt;
    if (std::abs(dtheta) < speed_floor_rps) continue;
    const double dalpha = (alpha_s[i + 1] - alpha_s[i - 1]) / dt;
    out.push_back({theta_s[i], dalpha / dtheta});
  }
  return out;
}

double fit_stiffness(const std::vector<double>& loads_n,
                     const std::vector<double>& deflections_deg) {
  if (loads_n.size() != deflections_deg.size()) {
    throw std::invalid_argument("fit_stiffness inputs must have equal length");
  }
  if (loads_n.empty()) {
    throw std::invalid_argument("fit_stiffness needs at least one point");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < loads_n.size(); ++i) {
    num += loads_n[i] * deflections_deg[i];
    den += deflections_deg[i] * deflections_deg[i];
  }
  if (den == 0.0) {
    throw std::domain_error("fit_stiffness: all deflections are zero");
  }
  return num / den;
}

std::vector<std::map<std::int64_t, double>> ascending_cycle_bins(const Run& run) {
  // Segment cycles from the commanded angle: a cycle closes when the command
  // returns to its starting value after having left it.
  std::vector<std::map<std::int64_t, double>> cycles;
  std::map<std::int64_t, std::pair<double, std::size_t>> acc;
  const double start_cmd = run.samples.empty() ? 0.0 : run.samples.front().theta_cmd_rot;
  bool left_start = false;
  double prev_cmd = start_cmd;
  auto flush = [&]() {
    std::map<std::int64_t, double> m;
    for (const auto& [idx, sum_count] : acc) {
      m[idx] = sum_count.first / static_cast<double>(sum_count.second);
    }
    if (!m.empty()) cycles.push_back(std::move(m));
    acc.clear();
  };
  for (const Sample& s : run.samples) {
    if (s.theta_cmd_rot != start_cmd) left_start = true;
    if (left_start && s.theta_cmd_rot == start_cmd && prev_cmd != start_cmd) {
      flush();
      left_start = false;
    }
    if (s.theta_cmd_rot >= prev_cmd && s.theta_cmd_rot > start_cmd) {
      const auto idx = static_cast<std::int64_t>(std::floor(s.theta_meas_rot / kBinWidthRot));
      auto& slot = acc[idx];
      slot.first += s.alpha_meas_deg;
      slot.second += 1;
    }
    prev_cmd = s.theta_cmd_rot;
  }
  flush();
  return cycles;
}

double lonely_stroke_metric(const Run& run) {
  const auto cycles = ascending_cycle_bins(run);
  if (cycles.size() < 2) {
    throw std::domain_error("lonely_stroke_metric needs at least two cycles");
  }
  // Mean over later cycles per bin, then mean |cycle1 - mean(rest)| over the
  // bins both traces cover.
  std::map<std::int64_t, std::pair<double, std::size_t>> rest;
  for (std::size_t c = 1; c < cycles.size(); ++c) {
    for (const auto& [idx, v] : cycles[c]) {
      auto& slot = rest[idx];
      slot.first += v;
      slot.second += 1;
    }
  }
  double acc = 0.0;
  std::size_t n = 0;
  for (const auto& [idx, v1] : cycles[0]) {
    auto it = rest.find(idx);
    if (it == rest.end()) continue;
    acc += std::abs(v1 - it->second.first / static_cast<double>(it->second.second));
    ++n;
  }
  if (n == 0) {
    throw std::domain_error("lonely_stroke_metric: cycle traces do not overlap");
  }
  return acc / static_cast<double>(n);
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = mean_rank;
    i = j + 1;
  }
  return r;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}
}  // namespace

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("spearman_rho needs two equal-length series");
  }
  return pearson(ranks(x), ranks(y));
}

double r_squared_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) {
    throw std::invalid_argument("r_squared_through_origin needs equal-length series");
  }
  double sxy = 0, sxx = 0, syy = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sy += y[i];
  }
  if (sxx == 0.0) return 0.0;
  const double slope = sxy / sxx;
  const double my = sy / static_cast<double>(x.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ss_res += (y[i] - slope * x[i]) * (y[i] - slope * x[i]);
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  if (ss_tot == 0.0) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

}  // namespace tsasim
