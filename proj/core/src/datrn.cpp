#include "i2a/datrn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "i2a/errors.hpp"
#include "i2a/rng.hpp"

namespace i2a {

namespace {

// Weighted draw proportional to `weights`; assumes total > 0.
std::size_t weighted_pick(const Eigen::VectorXd& weights, double total,
                          SplitMix64& rng) {
  double r = rng.uniform01() * total;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (r < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(weights.size() - 1);
}

}  // namespace

Eigen::VectorXd place_centers(const Trajectory& traj, int n_centers,
                              std::uint64_t seed) {
  traj.validate();
  const int n_points = traj.size() - 1;  // one speed sample per interval
  if (n_centers < 1) throw InputError("need at least one center");
  if (n_centers > n_points)
    throw InputError("more centers than distinct time points");

  Eigen::VectorXd points(n_points);
  Eigen::VectorXd weights(n_points);
  for (int k = 0; k < n_points; ++k) {
    points[k] = k * traj.dt;
    weights[k] = (traj.samples.row(k + 1) - traj.samples.row(k)).norm();
  }
  double total = weights.sum();
  if (total <= 0.0) {
    weights.setOnes();  // stationary demo: fall back to uniform weighting
    total = n_points;
  }

  SplitMix64 rng(derive_seed(seed, 0xC3));

  // k-means++ seeding over the weighted 1-D points.
  std::vector<double> centers;
  centers.reserve(n_centers);
  centers.push_back(points[weighted_pick(weights, total, rng)]);
  Eigen::VectorXd dist2(n_points);
  while (static_cast<int>(centers.size()) < n_centers) {
    for (int k = 0; k < n_points; ++k) {
      double best = std::numeric_limits<double>::max();
      for (double c : centers)
        best = std::min(best, (points[k] - c) * (points[k] - c));
      dist2[k] = best * weights[k];
    }
    double mass = dist2.sum();
    if (mass > 0.0) {
      centers.push_back(points[weighted_pick(dist2, mass, rng)]);
    } else {
      // All mass already covered; take the first point not yet a center.
      for (int k = 0; k < n_points; ++k) {
        if (std::find(centers.begin(), centers.end(), points[k]) ==
            centers.end()) {
          centers.push_back(points[k]);
          break;
        }
      }
    }
  }

  // Lloyd iterations with weighted means; ties go to the lowest center index.
  std::vector<int> assign(n_points, -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (int k = 0; k < n_points; ++k) {
      int best = 0;
      double best_d = std::abs(points[k] - centers[0]);
      for (std::size_t c = 1; c < centers.size(); ++c) {
        double d = std::abs(points[k] - centers[c]);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      if (assign[k] != best) {
        assign[k] = best;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      double mass = 0.0, moment = 0.0;
      for (int k = 0; k < n_points; ++k) {
        if (assign[k] != static_cast<int>(c)) continue;
        mass += weights[k];
        moment += weights[k] * points[k];
      }
      if (mass > 0.0) centers[c] = moment / mass;
    }
  }

  std::sort(centers.begin(), centers.end());
  return Eigen::Map<Eigen::VectorXd>(centers.data(),
                                     static_cast<Eigen::Index>(centers.size()));
}

double compute_width(const Eigen::VectorXd& centers,
                     double fallback_duration) {
  if (centers.size() >= 2) {
    double gap_sum = 0.0;
    for (Eigen::Index i = 1; i < centers.size(); ++i)
      gap_sum += centers[i] - centers[i - 1];
    double sigma = gap_sum / static_cast<double>(centers.size() - 1);
    if (sigma > 0.0) return sigma;
  }
  double sigma = fallback_duration / std::max<Eigen::Index>(centers.size(), 1);
  if (!(sigma > 0.0))
    throw NumericError("cannot derive a positive kernel width");
  return sigma;
}

Eigen::VectorXd activations(double t, const Eigen::VectorXd& centers,
                            double sigma) {
  if (!(sigma > 0.0)) throw InputError("sigma must be positive");
  return (-(centers.array() - t).square() / (2.0 * sigma * sigma)).exp();
}

RbfTrajectoryModel fit_datrn(const Trajectory& demo,
                             const DatrnConfig& config) {
  auto t_begin = std::chrono::steady_clock::now();
  demo.validate();
  if (config.ridge_lambda < 0.0)
    throw ConfigError("ridge_lambda must be non-negative");

  const int n = demo.size();
  RbfTrajectoryModel model;
  model.dt = demo.dt;
  model.duration = demo.duration();
  model.ridge_lambda = config.ridge_lambda;
  model.input = config.input;

  // Zero-mean, unit-range normalization per axis keeps the tanh attractor in
  // a consistent operating range regardless of workspace units.
  Trajectory norm = demo;
  for (int a = 0; a < 3; ++a) {
    double lo = demo.samples.col(a).minCoeff();
    double hi = demo.samples.col(a).maxCoeff();
    model.norm_offset[a] = demo.samples.col(a).mean();
    model.norm_scale[a] = (hi - lo) > 1e-12 ? (hi - lo) : 1.0;
    norm.samples.col(a) =
        (demo.samples.col(a).array() - model.norm_offset[a]) /
        model.norm_scale[a];
  }
  model.goal = norm.samples.row(n - 1).transpose();

  model.centers_primary =
      place_centers(norm, config.n_basis_primary, derive_seed(config.seed, 1));
  const bool use_input_bank = config.input != InputSignal::zero;
  if (use_input_bank)
    model.centers_input =
        place_centers(norm, config.n_basis_input, derive_seed(config.seed, 2));
  model.sigma = compute_width(model.centers_primary, model.duration);

  // Regression target from the dynamics rearranged so the RBF banks explain
  // what the decay and attractor terms do not:
  //   target_k = (y_{k+1} - y_k)/dt + y_k - tanh(g - y_k)
  const int rows = n - 1;
  const int c1 = static_cast<int>(model.centers_primary.size());
  const int c2 = use_input_bank ? static_cast<int>(model.centers_input.size())
                                : 0;
  Eigen::MatrixXd design(rows, c1 + c2);
  Eigen::MatrixXd target(rows, 3);
  for (int k = 0; k < rows; ++k) {
    double t = k * demo.dt;
    design.row(k).head(c1) =
        activations(t, model.centers_primary, model.sigma).transpose();
    if (use_input_bank) {
      double u = 1.0 - t / model.duration;
      design.row(k).tail(c2) =
          u * activations(t, model.centers_input, model.sigma).transpose();
    }
    for (int a = 0; a < 3; ++a) {
      double y = norm.samples(k, a);
      double y_next = norm.samples(k + 1, a);
      target(k, a) = (y_next - y) / demo.dt + y - std::tanh(model.goal[a] - y);
    }
  }

  Eigen::MatrixXd weights;
  if (config.ridge_lambda > 0.0) {
    // Ridge as an augmented least-squares problem [Phi; sqrt(l) I] solved by
    // Householder QR; equivalent to (Phi'Phi + l I)^-1 Phi' t without ever
    // forming the inverse.
    const int cols = c1 + c2;
    Eigen::MatrixXd aug(rows + cols, cols);
    aug.topRows(rows) = design;
    aug.bottomRows(cols) = std::sqrt(config.ridge_lambda) *
                           Eigen::MatrixXd::Identity(cols, cols);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(rows + cols, 3);
    rhs.topRows(rows) = target;
    weights = aug.householderQr().solve(rhs);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < c1 + c2)
      throw NumericError(
          "singular RBF system; refit with ridge_lambda > 0");
    weights = qr.solve(target);
  }

  model.weights_primary = weights.topRows(c1);
  if (use_input_bank) {
    model.weights_input = weights.bottomRows(c2);
  } else {
    model.weights_input.resize(0, 3);
    model.centers_input.resize(0);
  }

  model.fit_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_begin)
                          .count();
  return model;
}

Trajectory rollout(const RbfTrajectoryModel& model, const Eigen::Vector3d& y0,
                   const Eigen::Vector3d& goal, int n_steps) {
  if (n_steps < 1) throw InputError("rollout needs at least one step");
  if (!(model.sigma > 0.0)) throw InputError("model sigma must be positive");

  Eigen::Vector3d y =
      (y0 - model.norm_offset).cwiseQuotient(model.norm_scale);
  Eigen::Vector3d g =
      (goal - model.norm_offset).cwiseQuotient(model.norm_scale);

  Trajectory out;
  out.dt = model.dt;
  out.samples.resize(n_steps + 1, 3);
  out.samples.row(0) =
      (y.cwiseProduct(model.norm_scale) + model.norm_offset).transpose();

  const bool has_input_bank = model.centers_input.size() > 0 &&
                              model.input != InputSignal::zero;
  for (int k = 0; k < n_steps; ++k) {
    double t = k * model.dt;
    Eigen::Vector3d forcing = Eigen::Vector3d::Zero();
    if (model.centers_primary.size() > 0) {
      Eigen::VectorXd phi = activations(t, model.centers_primary, model.sigma);
      forcing += model.weights_primary.transpose() * phi;
    }
    if (has_input_bank) {
      double u = model.duration > 0.0 ? 1.0 - t / model.duration : 0.0;
      Eigen::VectorXd phi = activations(t, model.centers_input, model.sigma);
      forcing += u * (model.weights_input.transpose() * phi);
    }
    Eigen::Vector3d attract = (g - y).array().tanh();
    y += model.dt * (-y + forcing + attract);
    if (!y.allFinite())
      throw NumericError("rollout diverged at step " + std::to_string(k + 1));
    out.samples.row(k + 1) =
        (y.cwiseProduct(model.norm_scale) + model.norm_offset).transpose();
  }
  return out;
}

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json weights_to_json(const Eigen::Matrix<double, Eigen::Dynamic, 3>& w) {
  json j = json::array();
  for (int a = 0; a < 3; ++a) j.push_back(vec_to_json(w.col(a)));
  return j;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> weights_from_json(const json& j) {
  if (j.size() != 3) throw FormatError("expected 3 weight columns");
  Eigen::Matrix<double, Eigen::Dynamic, 3> w(j[0].size(), 3);
  for (int a = 0; a < 3; ++a) w.col(a) = vec_from_json(j[a]);
  return w;
}

}  // namespace

void save_datrn_model(const std::string& path, const RbfTrajectoryModel& m) {
  json j;
  j["format"] = "i2a-datrn";
  j["version"] = 1;
  j["centers_primary"] = vec_to_json(m.centers_primary);
  j["centers_input"] = vec_to_json(m.centers_input);
  j["sigma"] = m.sigma;
  j["weights_primary"] = weights_to_json(m.weights_primary);
  j["weights_input"] = weights_to_json(m.weights_input);
  j["goal"] = {m.goal.x(), m.goal.y(), m.goal.z()};
  j["dt"] = m.dt;
  j["ridge_lambda"] = m.ridge_lambda;
  j["input"] = m.input == InputSignal::zero ? "zero" : "linear_ramp";
  j["norm_offset"] = {m.norm_offset.x(), m.norm_offset.y(), m.norm_offset.z()};
  j["norm_scale"] = {m.norm_scale.x(), m.norm_scale.y(), m.norm_scale.z()};
  j["duration"] = m.duration;
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open for writing: " + path);
  os << j.dump(2) << "\n";
  if (!os) throw FormatError("write failed: " + path);
}

RbfTrajectoryModel load_datrn_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open model file: " + path);
  RbfTrajectoryModel m;
  try {
    json j = json::parse(is);
    if (j.at("format") != "i2a-datrn" || j.at("version") != 1)
      throw FormatError("not an i2a-datrn v1 file: " + path);
    m.centers_primary = vec_from_json(j.at("centers_primary"));
    m.centers_input = vec_from_json(j.at("centers_input"));
    m.sigma = j.at("sigma").get<double>();
    m.weights_primary = weights_from_json(j.at("weights_primary"));
    m.weights_input = weights_from_json(j.at("weights_input"));
    for (int a = 0; a < 3; ++a) {
      m.goal[a] = j.at("goal")[a].get<double>();
      m.norm_offset[a] = j.at("norm_offset")[a].get<double>();
      m.norm_scale[a] = j.at("norm_scale")[a].get<double>();
    }
    m.dt = j.at("dt").get<double>();
    m.ridge_lambda = j.at("ridge_lambda").get<double>();
    m.input = j.at("input") == "zero" ? InputSignal::zero
                                      : InputSignal::linear_ramp;
    m.duration = j.at("duration").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("model parse error: ") + e.what());
  }
  return m;
}

}  // namespace i2a
