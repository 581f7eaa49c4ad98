#include "i2a/vision.hpp"

#include <fstream>
#include <set>

#include "json.hpp"

#include "i2a/errors.hpp"
#include "i2a/hashing.hpp"
#include "i2a/rng.hpp"

namespace i2a {

RigidTransform::RigidTransform() : matrix_(Eigen::Matrix4d::Identity()) {}

RigidTransform::RigidTransform(const Eigen::Matrix4d& matrix)
    : matrix_(matrix) {
  Eigen::Matrix3d r = matrix.block<3, 3>(0, 0);
  if (((r.transpose() * r) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() >
      1e-9)
    throw InputError("transform rotation block is not orthonormal");
  if (std::abs(r.determinant() - 1.0) > 1e-9)
    throw InputError("transform rotation must have determinant +1");
  Eigen::RowVector4d last = matrix.row(3);
  if ((last - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff() > 1e-12)
    throw InputError("transform last row must be (0, 0, 0, 1)");
}

RigidTransform RigidTransform::translation(const Eigen::Vector3d& t) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.block<3, 1>(0, 3) = t;
  return RigidTransform(m);
}

RigidTransform RigidTransform::inverse() const {
  Eigen::Matrix4d inv = Eigen::Matrix4d::Identity();
  Eigen::Matrix3d rt = rotation().transpose();
  inv.block<3, 3>(0, 0) = rt;
  inv.block<3, 1>(0, 3) = -rt * offset();
  return RigidTransform(inv);
}

const SceneObject* Scene::find(const std::string& label) const {
  for (const SceneObject& obj : objects)
    if (obj.label == label) return &obj;
  return nullptr;
}

void Scene::validate() const {
  if (!(camera.fx > 0.0) || !(camera.fy > 0.0))
    throw InputError("camera focal lengths must be positive");
  std::set<std::string> seen;
  for (const SceneObject& obj : objects) {
    if (!seen.insert(obj.label).second)
      throw InputError("duplicate scene object label: " + obj.label);
    if (!workspace.contains(obj.pose))
      throw InputError("object outside workspace bounds: " + obj.label);
    if (obj.confidence < 0.0 || obj.confidence > 1.0)
      throw InputError("confidence outside [0, 1] for " + obj.label);
  }
}

Eigen::Vector3d back_project(double u, double v, double depth,
                             const CameraIntrinsics& intr) {
  if (!(depth > 0.0)) throw InputError("depth must be positive");
  return {(u - intr.cx) / intr.fx * depth, (v - intr.cy) / intr.fy * depth,
          depth};
}

Detection project(const Eigen::Vector3d& p_cam, const CameraIntrinsics& intr) {
  if (!(p_cam.z() > 0.0))
    throw InputError("cannot project a point at or behind the camera");
  Detection d;
  d.u = p_cam.x() / p_cam.z() * intr.fx + intr.cx;
  d.v = p_cam.y() / p_cam.z() * intr.fy + intr.cy;
  d.depth = p_cam.z();
  return d;
}

Eigen::Vector3d to_base(const Eigen::Vector3d& p_cam,
                        const RigidTransform& T) {
  return T.rotation() * p_cam + T.offset();
}

AnalyzeOutcome analyze_scene(const Scene& scene, const std::string& label,
                             double confidence_threshold) {
  const SceneObject* obj = scene.find(label);
  if (!obj) return NotFoundReason::absent;
  if (obj->confidence < confidence_threshold)
    return NotFoundReason::low_confidence;

  Eigen::Vector3d p_cam =
      scene.camera_to_base.rotation().transpose() *
      (obj->pose - scene.camera_to_base.offset());
  if (!(p_cam.z() > 0.0)) return NotFoundReason::behind_camera;

  Detection det = project(p_cam, scene.camera);
  det.label = label;
  det.confidence = obj->confidence;
  if (scene.noise.sigma_px > 0.0 || scene.noise.sigma_depth > 0.0) {
    SplitMix64 rng(derive_seed(scene.noise.seed, fnv1a64(label)));
    det.u += rng.gaussian(0.0, scene.noise.sigma_px);
    det.v += rng.gaussian(0.0, scene.noise.sigma_px);
    det.depth = std::max(1e-6, det.depth + rng.gaussian(0.0, scene.noise.sigma_depth));
  }
  return det;
}

GroundingOutcome resolve_missing(const ActionSequence& plan,
                                 const Scene& scene, const Prompter& prompter,
                                 double confidence_threshold) {
  ActionSequence grounded = plan;

  auto visible = [&](const std::string& label) {
    return std::holds_alternative<Detection>(
        analyze_scene(scene, label, confidence_threshold));
  };

  std::size_t seg_start = 0;
  while (seg_start < grounded.size()) {
    std::size_t seg_end = seg_start + 1;
    while (seg_end < grounded.size() &&
           grounded[seg_end].kind != SubActionKind::reach)
      ++seg_end;

    // One query per missing slot role in the segment; the answer fills every
    // action that shares the slot.
    for (int role = 0; role < 2; ++role) {
      const bool want_dest = role == 1;
      std::optional<std::size_t> missing_at;
      for (std::size_t i = seg_start; i < seg_end; ++i) {
        const SubAction& a = grounded[i];
        const bool surface_like = a.kind == SubActionKind::wipe ||
                                  a.kind == SubActionKind::stir;
        if (!want_dest && kind_takes_object(a.kind) && !surface_like &&
            !a.object) {
          missing_at = i;
          break;
        }
        if (want_dest &&
            ((kind_takes_destination(a.kind) && !a.destination) ||
             (surface_like && !a.object))) {
          missing_at = i;
          break;
        }
      }
      if (!missing_at) continue;

      SlotQuery query;
      query.action_index = *missing_at;
      query.kind = grounded[*missing_at].kind;
      query.wants_destination = want_dest;
      std::optional<std::string> answer;
      try {
        answer = prompter ? prompter(query) : std::nullopt;
      } catch (const std::exception& e) {
        return Halted{HaltReason::prompt_error, e.what()};
      }
      if (!answer)
        return Halted{HaltReason::prompt_error,
                      "no answer for missing slot"};
      if (!visible(*answer))
        return Halted{HaltReason::not_found,
                      "answer names an object not in view: " + *answer};

      for (std::size_t i = seg_start; i < seg_end; ++i) {
        SubAction& a = grounded[i];
        const bool surface_like = a.kind == SubActionKind::wipe ||
                                  a.kind == SubActionKind::stir;
        if (!want_dest && kind_takes_object(a.kind) && !surface_like &&
            !a.object)
          a.object = *answer;
        if (want_dest) {
          if (kind_takes_destination(a.kind) && !a.destination)
            a.destination = *answer;
          if (surface_like && !a.object) a.object = *answer;
        }
      }
    }
    seg_start = seg_end;
  }
  return grounded;
}

namespace {

using nlohmann::json;

json vec3_to_json(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Eigen::Vector3d vec3_from_json(const json& j) {
  if (j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void save_scene(const std::string& path, const Scene& scene) {
  scene.validate();
  json j;
  j["format"] = "i2a-scene";
  j["version"] = 1;
  j["camera"] = {{"fx", scene.camera.fx},
                 {"fy", scene.camera.fy},
                 {"cx", scene.camera.cx},
                 {"cy", scene.camera.cy}};
  json t = json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) t.push_back(scene.camera_to_base.matrix()(r, c));
  j["camera"]["transform"] = std::move(t);  // row-major
  j["workspace"] = {{"min", vec3_to_json(scene.workspace.min)},
                    {"max", vec3_to_json(scene.workspace.max)}};
  j["noise"] = {{"sigma_px", scene.noise.sigma_px},
                {"sigma_depth", scene.noise.sigma_depth},
                {"seed", scene.noise.seed}};
  j["objects"] = json::array();
  for (const SceneObject& obj : scene.objects)
    j["objects"].push_back({{"label", obj.label},
                            {"pose", vec3_to_json(obj.pose)},
                            {"confidence", obj.confidence}});
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
  if (!os) throw FormatError("write failed: " + path);
}

Scene load_scene(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open scene file: " + path);
  Scene scene;
  try {
    json j = json::parse(is);
    if (j.at("format") != "i2a-scene" || j.at("version") != 1)
      throw FormatError("not an i2a-scene v1 file: " + path);
    const json& cam = j.at("camera");
    scene.camera.fx = cam.at("fx").get<double>();
    scene.camera.fy = cam.at("fy").get<double>();
    scene.camera.cx = cam.at("cx").get<double>();
    scene.camera.cy = cam.at("cy").get<double>();
    const json& t = cam.at("transform");
    if (t.size() != 16) throw FormatError("transform must have 16 entries");
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m(r, c) = t[r * 4 + c].get<double>();
    scene.camera_to_base = RigidTransform(m);
    scene.workspace.min = vec3_from_json(j.at("workspace").at("min"));
    scene.workspace.max = vec3_from_json(j.at("workspace").at("max"));
    if (j.contains("noise")) {
      scene.noise.sigma_px = j["noise"].value("sigma_px", 0.0);
      scene.noise.sigma_depth = j["noise"].value("sigma_depth", 0.0);
      scene.noise.seed = j["noise"].value("seed", std::uint64_t{0});
    }
    for (const json& o : j.at("objects")) {
      SceneObject obj;
      obj.label = o.at("label").get<std::string>();
      obj.pose = vec3_from_json(o.at("pose"));
      obj.confidence = o.at("confidence").get<double>();
      scene.objects.push_back(std::move(obj));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("scene parse error: ") + e.what());
  }
  scene.validate();
  return scene;
}

}  // namespace i2a
