#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tsasim/run.hpp"

namespace tsasim {

inline constexpr double kBinWidthRot = 0.1;

/// Fingertip-angle samples grouped by discretized motor angle. Bin k covers
/// the half-open interval [k*0.1, (k+1)*0.1) rotations; empty bins are not
/// stored.
struct BinnedSeries {
  std::map<std::int64_t, std::vector<double>> bins;

  std::size_t total_samples() const;
  void merge(const BinnedSeries& other);
};

/// Per-bin order statistics of the fingertip angle.
struct BinStats {
  double bin_center_rot = 0.0;
  std::size_t count = 0;
  double min = 0.0, q05 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q95 = 0.0, max = 0.0;
};

struct SummaryStats {
  std::vector<BinStats> bins;
  double delta_0 = 0.0, delta_25 = 0.0, delta_75 = 0.0, delta_1 = 0.0;
};

/// Linear-interpolation quantile of the data (the common "type 7" rule).
/// q in [0, 1]; data need not be sorted.
double quantile(std::vector<double> data, double q);

/// Group a run's alpha measurements by floor(theta_meas / 0.1).
BinnedSeries bin_by_motor_angle(const Run& run);

/// Mean over bins of |per-bin q-quantile - per-bin median|.
double delta_q(const BinnedSeries& binned, double q);

SummaryStats summarize(const BinnedSeries& binned);

/// Savitzky-Golay smoothing: local least-squares polynomial fit of the
/// given order over an odd window. Edge points use shifted windows, so any
/// polynomial up to the given degree is reproduced over the full series.
std::vector<double> savgol(const std::vector<double>& series, int window, int order);

struct JacobianPoint {
  double theta_rot = 0.0;
  double jacobian_deg_per_rot = 0.0;
};

/// Ratio of fingertip angular velocity to motor shaft velocity along a run.
/// Velocities come from Savitzky-Golay smoothed central differences; samples
/// with |dtheta/dt| below speed_floor are excluded (direction reversals
/// produce unusable ratios there).
std::vector<JacobianPoint> jacobian_series(const Run& run, int window, int order,
                                           double speed_floor_rps);

/// Least-squares slope through the origin of load (N) versus angular
/// deflection (deg): K = sum(F*da) / sum(da^2).
double fit_stiffness(const std::vector<double>& loads_n,
                     const std::vector<double>& deflections_deg);

/// Mean per-bin distance between the first cycle's ascending trace and the
/// mean of the later cycles' ascending traces. Cycles are segmented from
/// the commanded motor angle (each return to the starting command closes a
/// cycle).
double lonely_stroke_metric(const Run& run);

/// Ascending-branch bins of one cycle: bin index -> mean alpha.
std::vector<std::map<std::int64_t, double>> ascending_cycle_bins(const Run& run);

/// Spearman rank correlation (average ranks for ties).
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

/// Coefficient of determination of the best-fit line through the origin.
double r_squared_through_origin(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace tsasim
