#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

namespace i2a {

struct ControllerGains {
  double kp = 1.0;       // 1/s
  double kd = 0.1;       // dimensionless
  double epsilon = 1e-3; // convergence radius, meters
  double dt = 0.05;      // control step, seconds
  int max_steps = 1000;
  double max_speed = 0.0;  // m/s velocity clamp; 0 disables it
};

struct PdCommand {
  Eigen::Vector3d velocity;
  Eigen::Vector3d error;
};

/// v = kp * e + kd * (e - prev_error) / dt with e = target - ee.
PdCommand pd_step(const ControllerGains& gains, const Eigen::Vector3d& ee,
                  const Eigen::Vector3d& target,
                  const Eigen::Vector3d& prev_error);

struct ServoResult {
  Eigen::Vector3d pose;
  int steps = 0;
  bool converged = false;
};

/// Optional target refinement invoked once after first convergence (used to
/// re-read an object's center before the final approach).
using TargetRefresh = std::function<std::optional<Eigen::Vector3d>()>;

/// Integrates ee += v * dt until ||e|| < epsilon or max_steps; never reports
/// converged with the error still at or above epsilon. Non-convergence is a
/// result, not an exception.
ServoResult servo_to(const ControllerGains& gains, Eigen::Vector3d start,
                     Eigen::Vector3d target,
                     const TargetRefresh& refresh = {});

}  // namespace i2a
