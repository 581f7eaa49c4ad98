#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "i2a/actions.hpp"

namespace i2a {

struct CameraIntrinsics {
  double fx = 600.0;
  double fy = 600.0;
  double cx = 320.0;
  double cy = 240.0;
};

/// Camera-to-base homogeneous transform, validated at construction: the
/// rotation block must be orthonormal with determinant +1 and the last row
/// exactly (0, 0, 0, 1).
class RigidTransform {
 public:
  RigidTransform();  // identity
  explicit RigidTransform(const Eigen::Matrix4d& matrix);
  static RigidTransform translation(const Eigen::Vector3d& t);

  const Eigen::Matrix4d& matrix() const { return matrix_; }
  Eigen::Matrix3d rotation() const { return matrix_.block<3, 3>(0, 0); }
  Eigen::Vector3d offset() const { return matrix_.block<3, 1>(0, 3); }
  RigidTransform inverse() const;

 private:
  Eigen::Matrix4d matrix_;
};

struct Detection {
  std::string label;
  double u = 0.0;  // bounding-box center, pixels
  double v = 0.0;
  double depth = 0.0;  // meters, > 0
  double confidence = 0.0;
};

enum class NotFoundReason { absent, low_confidence, behind_camera };

using AnalyzeOutcome = std::variant<Detection, NotFoundReason>;

struct SceneObject {
  std::string label;
  Eigen::Vector3d pose = Eigen::Vector3d::Zero();  // base frame, meters
  double confidence = 1.0;
};

struct DetectionNoise {
  double sigma_px = 0.0;
  double sigma_depth = 0.0;
  std::uint64_t seed = 0;
};

struct WorkspaceBounds {
  Eigen::Vector3d min = Eigen::Vector3d(-1.0, -1.0, -1.0);
  Eigen::Vector3d max = Eigen::Vector3d(1.0, 1.0, 1.0);
  bool contains(const Eigen::Vector3d& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

struct Scene {
  std::vector<SceneObject> objects;
  CameraIntrinsics camera;
  RigidTransform camera_to_base;
  WorkspaceBounds workspace;
  DetectionNoise noise;

  const SceneObject* find(const std::string& label) const;
  /// Labels unique, poses inside the workspace, confidences in [0, 1].
  void validate() const;
};

/// Pixel + depth to camera-frame point: X = (u - cx) / fx * d, etc.
Eigen::Vector3d back_project(double u, double v, double depth,
                             const CameraIntrinsics& intr);

/// Camera-frame point to pixel + depth; requires Z > 0.
Detection project(const Eigen::Vector3d& p_cam, const CameraIntrinsics& intr);

/// Homogeneous transform of a camera-frame point into the base frame.
Eigen::Vector3d to_base(const Eigen::Vector3d& p_cam, const RigidTransform& T);

/// Synthesizes the detection an object detector would report for `label`,
/// projecting the stored base-frame pose through the camera model. Missing
/// label, low confidence or a pose behind the camera give a NotFoundReason.
AnalyzeOutcome analyze_scene(const Scene& scene, const std::string& label,
                             double confidence_threshold = 0.5);

/// Answers a slot query with an object label, or nullopt to give up.
struct SlotQuery {
  std::size_t action_index = 0;
  SubActionKind kind = SubActionKind::pad;
  bool wants_destination = false;  // otherwise the object slot
};
using Prompter = std::function<std::optional<std::string>(const SlotQuery&)>;

enum class HaltReason { not_found, prompt_error };

struct Halted {
  HaltReason reason = HaltReason::not_found;
  std::string detail;
};

using GroundingOutcome = std::variant<ActionSequence, Halted>;

/// Fills unresolved slots by querying the prompter once per missing slot.
/// An answer naming a visible object grounds every action sharing the slot;
/// anything else terminates the episode. Fully grounded plans pass through
/// untouched and the prompter is never called.
GroundingOutcome resolve_missing(const ActionSequence& plan,
                                 const Scene& scene, const Prompter& prompter,
                                 double confidence_threshold = 0.5);

void save_scene(const std::string& path, const Scene& scene);
Scene load_scene(const std::string& path);

}  // namespace i2a
