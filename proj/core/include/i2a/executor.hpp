#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "i2a/actions.hpp"
#include "i2a/control.hpp"
#include "i2a/datrn.hpp"
#include "i2a/seqmodel.hpp"
#include "i2a/vision.hpp"

namespace i2a {

struct EpisodeConfig {
  ControllerGains gains{1.0, 0.1, 1e-3, 0.05, 1000, 0.5};
  Eigen::Vector3d home_pose = Eigen::Vector3d(0.30, 0.0, 0.35);
  double grasp_radius = 0.03;
  double approach_offset = 0.02;  // reach stops this far above the object
  double lift_height = 0.15;
  double transport_height = 0.15;
  double place_offset = 0.02;
  double pour_height = 0.10;
  double give_offset = 0.10;
  double tilt_degrees = 90.0;
  int tilt_steps = 20;
  double wipe_width = 0.20;
  double wipe_depth = 0.14;
  int wipe_rows = 4;
  int wipe_cols = 5;
  double wipe_contact_offset = 0.01;
  double stir_radius = 0.05;
  int stir_loops = 2;
  int stir_points = 12;
  double stir_height = 0.05;
  double success_tolerance_factor = 2.0;  // multiplies gains.epsilon
  double wipe_coverage_min = 0.95;
  int rollout_steps = 60;
  double confidence_threshold = 0.5;
  std::uint64_t seed = 0;
};

EpisodeConfig load_episode_config(const std::string& path);
void save_episode_config(const std::string& path, const EpisodeConfig& cfg);

/// Kinematic point-effector state. The held object tracks the effector pose
/// exactly until it is detached.
struct SimState {
  Eigen::Vector3d ee_pose = Eigen::Vector3d::Zero();
  bool gripper_closed = false;
  std::optional<std::string> held;
  double tilt_angle = 0.0;  // radians
  Scene scene;
  double clock = 0.0;  // simulated seconds
};

struct SubActionTarget {
  SubActionKind kind = SubActionKind::pad;
  Eigen::Vector3d pose = Eigen::Vector3d::Zero();
  std::vector<Eigen::Vector3d> path;  // wipe/stir waypoints
  double surface_z = 0.0;             // settle height for detached objects
  bool in_place = false;              // grasp/release do not move
};

using PlanOutcome = std::variant<std::vector<SubActionTarget>, Halted>;

/// Computes every motion target from the initial scene before any motion
/// happens (pick and place decisions are frozen up front). A referenced
/// object that the analyzer cannot confirm halts the episode.
PlanOutcome plan_targets(const ActionSequence& plan, const Scene& scene,
                         const EpisodeConfig& config);

struct SubActionEvent {
  int index = -1;
  std::string kind;
  std::optional<std::string> object;
  std::optional<std::string> destination;
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  double sim_start = 0.0;
  double sim_end = 0.0;
  int pd_steps = 0;
  bool motion = false;
  bool converged = true;
  bool anomaly = false;
  double coverage = 1.0;  // wipe/stir waypoint fraction reached
  std::string fault;      // non-empty when the sub-action failed
};

struct ExecutionModels {
  const InstructionParser* parser = nullptr;
  RbfTrajectoryModel trajectory;
};

/// Trajectory learner used when the episode config names no model file:
/// fitted once on a built-in smooth point-to-point demonstration and reused
/// for every motion through goal adaptation.
RbfTrajectoryModel default_motion_model();

/// Executes one sub-action: motions roll the trajectory model out to the
/// target with the PD loop tracking each waypoint, then servo to
/// convergence; grasp/release mutate the gripper and the scene.
SubActionEvent execute_subaction(SimState& state, const SubAction& action,
                                 const SubActionTarget& target,
                                 const ExecutionModels& models,
                                 const EpisodeConfig& config);

enum class EpisodeOutcome { success, failure, halted };

enum class FailureCause {
  robot_action_network,
  subaction_prediction,
  system_failure,
};

const std::string& outcome_name(EpisodeOutcome o);
const std::string& failure_cause_name(FailureCause c);

struct EpisodeResult {
  EpisodeOutcome outcome = EpisodeOutcome::failure;
  std::optional<FailureCause> failure_cause;
  ActionSequence plan;
  std::vector<SubActionEvent> trace;
  double prediction_seconds = 0.0;  // wall clock
  double execution_seconds = 0.0;   // wall clock
  double sim_seconds = 0.0;         // simulated time
  std::string detail;

  int motion_events() const;
  std::string to_json() const;
};

/// Hash of the deterministic episode content (plan, trace, outcome); wall
/// clock fields are excluded so identical seeded runs hash identically.
std::uint64_t episode_fingerprint(const EpisodeResult& result);

/// Maps a failed trace onto the failure taxonomy: prediction-stage faults,
/// motion/grasp/servo faults, and everything else as system failures.
FailureCause classify_failure(const std::vector<SubActionEvent>& trace);

EpisodeResult run_episode(const std::string& instruction, const Scene& scene,
                          const InstructionParser& parser,
                          const EpisodeConfig& config,
                          const Prompter& prompter = {});

struct TaskSummary {
  std::string task;
  int trials = 0;
  int successes = 0;
  int failures = 0;
  int halted = 0;
  double prediction_seconds_mean = 0.0;
  double prediction_seconds_max = 0.0;
  double execution_seconds_mean = 0.0;
  double sim_seconds_mean = 0.0;
};

struct SuiteReport {
  std::vector<TaskSummary> tasks;
  std::vector<EpisodeResult> episodes;  // ordered by (task, trial)
  std::string to_json() const;
};

/// Canonical instruction used by the evaluation suite for a task name
/// (pick_place, pick_pour, clean, pick_give); throws on unknown names.
const std::string& suite_instruction(const std::string& task);

/// Seeded scene jitter + episode per trial; trials may run on `jobs` threads,
/// results are aggregated in trial order either way.
SuiteReport run_suite(const std::vector<std::string>& tasks, int trials,
                      const Scene& base_scene, const InstructionParser& parser,
                      const EpisodeConfig& config, int jobs = 1);

}  // namespace i2a
