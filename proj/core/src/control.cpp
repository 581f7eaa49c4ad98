#include "i2a/control.hpp"

#include "i2a/errors.hpp"

namespace i2a {

PdCommand pd_step(const ControllerGains& gains, const Eigen::Vector3d& ee,
                  const Eigen::Vector3d& target,
                  const Eigen::Vector3d& prev_error) {
  PdCommand cmd;
  cmd.error = target - ee;
  cmd.velocity =
      gains.kp * cmd.error + gains.kd * (cmd.error - prev_error) / gains.dt;
  if (gains.max_speed > 0.0) {
    double speed = cmd.velocity.norm();
    if (speed > gains.max_speed) cmd.velocity *= gains.max_speed / speed;
  }
  return cmd;
}

ServoResult servo_to(const ControllerGains& gains, Eigen::Vector3d start,
                     Eigen::Vector3d target, const TargetRefresh& refresh) {
  if (!(gains.kp > 0.0) || gains.kd < 0.0 || !(gains.epsilon > 0.0) ||
      !(gains.dt > 0.0))
    throw InputError("invalid controller gains");

  ServoResult result;
  result.pose = start;
  Eigen::Vector3d prev_error = target - result.pose;  // no derivative kick
  bool refreshed = false;
  while (result.steps < gains.max_steps) {
    if ((target - result.pose).norm() < gains.epsilon) {
      if (refresh && !refreshed) {
        refreshed = true;
        if (auto updated = refresh()) {
          target = *updated;
          prev_error = target - result.pose;
          continue;  // final micro-servo onto the refreshed center
        }
      }
      result.converged = true;
      return result;
    }
    PdCommand cmd = pd_step(gains, result.pose, target, prev_error);
    result.pose += cmd.velocity * gains.dt;
    prev_error = cmd.error;
    ++result.steps;
  }
  result.converged = (target - result.pose).norm() < gains.epsilon;
  return result;
}

}  // namespace i2a
