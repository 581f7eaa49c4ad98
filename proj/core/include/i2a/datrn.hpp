#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "i2a/trajectory.hpp"

namespace i2a {

/// External input signal u(t) feeding the second RBF bank.
enum class InputSignal {
  zero,         // u == 0: the second bank is dropped from the fit
  linear_ramp,  // u(t) = 1 - t / T over the demo duration T
};

struct DatrnConfig {
  int n_basis_primary = 25;   // time-indexed bank
  int n_basis_input = 25;     // input-gated bank
  double ridge_lambda = 1e-6;
  InputSignal input = InputSignal::zero;
  std::uint64_t seed = 0;
};

/// First-order discrete dynamics with two Gaussian RBF banks and a tanh goal
/// attractor; weights come from a single ridge-regression solve per axis.
struct RbfTrajectoryModel {
  Eigen::VectorXd centers_primary;  // seconds, sorted ascending
  Eigen::VectorXd centers_input;
  double sigma = 1.0;  // shared kernel width (seconds)
  Eigen::Matrix<double, Eigen::Dynamic, 3> weights_primary;
  Eigen::Matrix<double, Eigen::Dynamic, 3> weights_input;
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  double dt = 0.01;
  double ridge_lambda = 0.0;
  InputSignal input = InputSignal::zero;

  // Per-axis zero-mean/unit-range transform applied to the demo before the
  // fit; rollouts map through it in both directions. Identity by default so
  // hand-built models run in raw coordinates.
  Eigen::Vector3d norm_offset = Eigen::Vector3d::Zero();
  Eigen::Vector3d norm_scale = Eigen::Vector3d::Ones();

  double duration = 0.0;     // demo time span (drives the ramp input)
  double fit_seconds = 0.0;  // wall clock of the last fit
};

/// Speed-weighted K-Means (k-means++ seeding, Lloyd iterations) over the
/// demo's time grid; centers gather where the trajectory moves fastest.
Eigen::VectorXd place_centers(const Trajectory& traj, int n_centers,
                              std::uint64_t seed);

/// Mean gap between consecutive centers; falls back to
/// fallback_duration / n_centers when fewer than two centers exist.
double compute_width(const Eigen::VectorXd& centers, double fallback_duration);

/// Gaussian activations exp(-(t - c)^2 / (2 sigma^2)) for every center.
Eigen::VectorXd activations(double t, const Eigen::VectorXd& centers,
                            double sigma);

RbfTrajectoryModel fit_datrn(const Trajectory& demo, const DatrnConfig& config);

/// Forward-Euler integration of the learned dynamics from y0 toward g. The
/// goal may differ from the fitted one (goal adaptation); note the unforced
/// fixed point solves y = tanh(g - y), not y = g.
Trajectory rollout(const RbfTrajectoryModel& model, const Eigen::Vector3d& y0,
                   const Eigen::Vector3d& goal, int n_steps);

void save_datrn_model(const std::string& path, const RbfTrajectoryModel& m);
RbfTrajectoryModel load_datrn_model(const std::string& path);

}  // namespace i2a
