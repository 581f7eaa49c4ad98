#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "i2a/datrn.hpp"
#include "i2a/trajectory.hpp"

namespace i2a {

struct DmpParams {
  double alpha_y = 25.0;  // transformation-system gain; beta_y = alpha_y / 4
  double alpha_x = 1.0;   // canonical-system decay
  int n_basis = 30;
};

/// Discrete DMP: second-order critically damped attractor plus a phase-driven
/// forcing term, weights fitted by locally weighted regression per axis.
struct DmpModel {
  double alpha_y = 25.0;
  double beta_y = 6.25;
  double alpha_x = 1.0;
  double tau = 1.0;  // demo duration
  Eigen::VectorXd centers;  // in phase space
  Eigen::VectorXd widths;
  Eigen::Matrix<double, Eigen::Dynamic, 3> weights;
  Eigen::Vector3d goal = Eigen::Vector3d::Zero();
  Eigen::Vector3d start = Eigen::Vector3d::Zero();
  double dt = 0.01;
};

DmpModel fit_dmp(const Trajectory& demo, const DmpParams& params);

Trajectory rollout_dmp(const DmpModel& model, const Eigen::Vector3d& y0,
                       const Eigen::Vector3d& goal, int n_steps);

struct GaConfig {
  int population = 20;
  int generations = 15;
  double mutation_rate = 0.2;
  double crossover_rate = 0.7;
  double alpha_y_min = 5.0;
  double alpha_y_max = 60.0;
  int n_basis_min = 5;
  int n_basis_max = 60;
  std::uint64_t seed = 0;
};

struct GaResult {
  DmpParams best;
  double best_fitness = 0.0;  // negative summed per-axis normalized MSE
  double seconds = 0.0;       // wall clock including every candidate fit
  int evaluations = 0;
  std::vector<double> best_history;  // best-so-far fitness per generation
};

/// Tournament selection (size 3), uniform crossover, Gaussian mutation over
/// (alpha_y, n_basis); elitism keeps the best candidate each generation.
GaResult ga_search(const Trajectory& demo, const GaConfig& config);

/// Per-axis reproduction MSE in range-normalized units, shared by the
/// comparison so both methods are scored identically.
Eigen::Vector3d reproduction_mse(const Trajectory& demo,
                                 const Trajectory& rollout);

struct ComparisonReport {
  Eigen::Vector3d datrn_mse;
  Eigen::Vector3d dmp_mse;
  double datrn_fit_seconds = 0.0;
  double dmp_search_seconds = 0.0;
  double time_reduction_ratio = 0.0;  // dmp_search_seconds / datrn_fit_seconds
  DmpParams dmp_best;
  double ga_best_fitness = 0.0;
  int ga_evaluations = 0;
  Trajectory datrn_rollout;
  Trajectory dmp_rollout;

  std::string to_json() const;  // numeric fields only, rollouts excluded
};

ComparisonReport compare_methods(const Trajectory& demo,
                                 const DatrnConfig& datrn_config,
                                 const GaConfig& ga_config);

}  // namespace i2a
