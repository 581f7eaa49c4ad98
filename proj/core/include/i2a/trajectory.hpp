#pragma once

#include <Eigen/Dense>
#include <string>

namespace i2a {

/// End-effector position samples on a fixed time grid t_k = k * dt.
struct Trajectory {
  Eigen::Matrix<double, Eigen::Dynamic, 3> samples;  // meters
  double dt = 0.01;                                  // seconds per step

  int size() const { return static_cast<int>(samples.rows()); }
  double duration() const { return dt * (size() - 1); }

  /// Throws unless N >= 2, dt > 0 and all samples are finite.
  void validate() const;
};

// File layout: '#'-prefixed header lines (format tag, dt, axis names, sample
// count), then one "x,y,z" line per sample in time order.
void save_trajectory(const std::string& path, const Trajectory& traj);
Trajectory load_trajectory(const std::string& path);

}  // namespace i2a
