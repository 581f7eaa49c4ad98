#include "i2a/dmp.hpp"

#include <chrono>
#include <cmath>

#include "json.hpp"

#include "i2a/errors.hpp"
#include "i2a/rng.hpp"

namespace i2a {

DmpModel fit_dmp(const Trajectory& demo, const DmpParams& params) {
  demo.validate();
  if (demo.size() < 3) throw InputError("DMP fit needs at least 3 samples");
  if (params.alpha_y <= 0 || params.alpha_x <= 0)
    throw ConfigError("DMP gains must be positive");
  if (params.n_basis < 1) throw ConfigError("DMP needs at least one basis");

  const int n = demo.size();
  DmpModel model;
  model.alpha_y = params.alpha_y;
  model.beta_y = params.alpha_y / 4.0;  // critical damping
  model.alpha_x = params.alpha_x;
  model.tau = demo.duration();
  if (!(model.tau > 0.0)) throw InputError("zero-duration demo");
  model.dt = demo.dt;
  model.start = demo.samples.row(0).transpose();
  model.goal = demo.samples.row(n - 1).transpose();

  // Basis centers equally spaced in time, mapped through the canonical decay;
  // widths shrink with the centers so late-phase kernels stay selective.
  const int nb = params.n_basis;
  model.centers.resize(nb);
  model.widths.resize(nb);
  for (int i = 0; i < nb; ++i) {
    double s = nb > 1 ? static_cast<double>(i) / (nb - 1) : 0.0;
    model.centers[i] = std::exp(-model.alpha_x * s);
    model.widths[i] =
        nb * std::sqrt(static_cast<double>(nb)) / (model.alpha_x * model.centers[i]);
  }

  // Central-difference derivatives (one-sided at the ends).
  Eigen::MatrixXd vel(n, 3), acc(n, 3);
  for (int a = 0; a < 3; ++a) {
    for (int k = 0; k < n; ++k) {
      int lo = std::max(0, k - 1), hi = std::min(n - 1, k + 1);
      vel(k, a) =
          (demo.samples(hi, a) - demo.samples(lo, a)) / ((hi - lo) * demo.dt);
    }
    for (int k = 0; k < n; ++k) {
      int lo = std::max(0, k - 1), hi = std::min(n - 1, k + 1);
      acc(k, a) = (vel(hi, a) - vel(lo, a)) / ((hi - lo) * demo.dt);
    }
  }

  // Locally weighted regression of the forcing term per axis.
  model.weights.resize(nb, 3);
  Eigen::VectorXd phase(n);
  for (int k = 0; k < n; ++k)
    phase[k] = std::exp(-model.alpha_x * (k * demo.dt) / model.tau);
  for (int a = 0; a < 3; ++a) {
    double span = model.goal[a] - model.start[a];
    for (int i = 0; i < nb; ++i) {
      double num = 0.0, den = 0.0;
      for (int k = 0; k < n; ++k) {
        double psi = std::exp(-model.widths[i] *
                              (phase[k] - model.centers[i]) *
                              (phase[k] - model.centers[i]));
        double xi = phase[k] * span;
        double f_target = model.tau * model.tau * acc(k, a) -
                          model.alpha_y * (model.beta_y *
                                               (model.goal[a] -
                                                demo.samples(k, a)) -
                                           model.tau * vel(k, a));
        num += psi * xi * f_target;
        den += psi * xi * xi;
      }
      model.weights(i, a) = den > 1e-12 ? num / den : 0.0;
    }
  }
  return model;
}

Trajectory rollout_dmp(const DmpModel& model, const Eigen::Vector3d& y0,
                       const Eigen::Vector3d& goal, int n_steps) {
  if (n_steps < 1) throw InputError("rollout needs at least one step");
  Trajectory out;
  out.dt = model.dt;
  out.samples.resize(n_steps + 1, 3);
  out.samples.row(0) = y0.transpose();

  Eigen::Vector3d y = y0;
  Eigen::Vector3d z = Eigen::Vector3d::Zero();  // scaled velocity tau * ydot
  double x = 1.0;
  const int nb = static_cast<int>(model.centers.size());
  for (int k = 0; k < n_steps; ++k) {
    double psi_sum = 0.0;
    Eigen::Vector3d f = Eigen::Vector3d::Zero();
    for (int i = 0; i < nb; ++i) {
      double psi = std::exp(-model.widths[i] * (x - model.centers[i]) *
                            (x - model.centers[i]));
      psi_sum += psi;
      for (int a = 0; a < 3; ++a)
        f[a] += psi * model.weights(i, a) * x * (goal[a] - model.start[a]);
    }
    if (psi_sum > 1e-12) f /= psi_sum;

    for (int a = 0; a < 3; ++a) {
      double zdot =
          (model.alpha_y * (model.beta_y * (goal[a] - y[a]) - z[a]) + f[a]) /
          model.tau;
      z[a] += model.dt * zdot;
      y[a] += model.dt * z[a] / model.tau;
    }
    x += model.dt * (-model.alpha_x * x) / model.tau;
    if (!y.allFinite())
      throw NumericError("DMP rollout diverged at step " +
                         std::to_string(k + 1));
    out.samples.row(k + 1) = y.transpose();
  }
  return out;
}

Eigen::Vector3d reproduction_mse(const Trajectory& demo,
                                 const Trajectory& roll) {
  const int n = std::min(demo.size(), roll.size());
  Eigen::Vector3d mse = Eigen::Vector3d::Zero();
  for (int a = 0; a < 3; ++a) {
    double range =
        demo.samples.col(a).maxCoeff() - demo.samples.col(a).minCoeff();
    if (range <= 1e-12) range = 1.0;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      double e = (roll.samples(k, a) - demo.samples(k, a)) / range;
      sum += e * e;
    }
    mse[a] = sum / n;
  }
  return mse;
}

namespace {

struct Candidate {
  double alpha_y = 0.0;
  int n_basis = 0;
  double fitness = -std::numeric_limits<double>::infinity();
};

double evaluate_candidate(const Trajectory& demo, const Candidate& c) {
  DmpParams p;
  p.alpha_y = c.alpha_y;
  p.n_basis = c.n_basis;
  DmpModel model = fit_dmp(demo, p);
  Trajectory roll = rollout_dmp(model, model.start, model.goal,
                                demo.size() - 1);
  return -reproduction_mse(demo, roll).sum();
}

}  // namespace

GaResult ga_search(const Trajectory& demo, const GaConfig& cfg) {
  auto t_begin = std::chrono::steady_clock::now();
  demo.validate();
  if (cfg.population < 2)
    throw ConfigError("GA population must be at least 2 for crossover");
  if (cfg.generations < 1) throw ConfigError("GA needs at least 1 generation");
  if (cfg.mutation_rate < 0 || cfg.mutation_rate > 1 ||
      cfg.crossover_rate < 0 || cfg.crossover_rate > 1)
    throw ConfigError("GA rates must lie in [0, 1]");
  if (cfg.alpha_y_min > cfg.alpha_y_max || cfg.n_basis_min > cfg.n_basis_max ||
      cfg.alpha_y_min <= 0 || cfg.n_basis_min < 1)
    throw ConfigError("empty or invalid GA search ranges");

  SplitMix64 rng(derive_seed(cfg.seed, 0x6A));
  const double alpha_range = cfg.alpha_y_max - cfg.alpha_y_min;
  const int basis_range = cfg.n_basis_max - cfg.n_basis_min;
  auto clamp_candidate = [&](Candidate& c) {
    c.alpha_y = std::clamp(c.alpha_y, cfg.alpha_y_min, cfg.alpha_y_max);
    c.n_basis = std::clamp(c.n_basis, cfg.n_basis_min, cfg.n_basis_max);
  };

  GaResult result;
  std::vector<Candidate> pop(cfg.population);
  for (Candidate& c : pop) {
    c.alpha_y = rng.uniform(cfg.alpha_y_min, cfg.alpha_y_max);
    c.n_basis =
        cfg.n_basis_min + static_cast<int>(rng.index(basis_range + 1));
    c.fitness = evaluate_candidate(demo, c);
    ++result.evaluations;
  }

  // Lower index wins fitness ties, so selection is fully deterministic.
  auto best_of = [](const std::vector<Candidate>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i].fitness > v[best].fitness) best = i;
    return best;
  };
  auto tournament = [&](const std::vector<Candidate>& v) -> const Candidate& {
    std::size_t best = rng.index(v.size());
    for (int k = 1; k < 3; ++k) {
      std::size_t i = rng.index(v.size());
      if (v[i].fitness > v[best].fitness) best = i;
    }
    return v[best];
  };

  Candidate best = pop[best_of(pop)];
  result.best_history.push_back(best.fitness);

  for (int gen = 0; gen < cfg.generations; ++gen) {
    std::vector<Candidate> next;
    next.reserve(cfg.population);
    next.push_back(best);  // elitism
    while (static_cast<int>(next.size()) < cfg.population) {
      const Candidate& p1 = tournament(pop);
      const Candidate& p2 = tournament(pop);
      Candidate child = p1;
      if (rng.uniform01() < cfg.crossover_rate) {
        if (rng.uniform01() < 0.5) child.alpha_y = p2.alpha_y;
        if (rng.uniform01() < 0.5) child.n_basis = p2.n_basis;
      }
      if (rng.uniform01() < cfg.mutation_rate)
        child.alpha_y += rng.gaussian(0.0, 0.1 * std::max(alpha_range, 1e-9));
      if (rng.uniform01() < cfg.mutation_rate)
        child.n_basis += static_cast<int>(std::lround(
            rng.gaussian(0.0, 0.1 * std::max(basis_range, 1))));
      clamp_candidate(child);
      child.fitness = evaluate_candidate(demo, child);
      ++result.evaluations;
      next.push_back(child);
    }
    pop = std::move(next);
    const Candidate& gen_best = pop[best_of(pop)];
    if (gen_best.fitness > best.fitness) best = gen_best;
    result.best_history.push_back(best.fitness);
  }

  result.best.alpha_y = best.alpha_y;
  result.best.n_basis = best.n_basis;
  result.best_fitness = best.fitness;
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t_begin)
                       .count();
  return result;
}

ComparisonReport compare_methods(const Trajectory& demo,
                                 const DatrnConfig& datrn_config,
                                 const GaConfig& ga_config) {
  demo.validate();
  ComparisonReport report;

  RbfTrajectoryModel datrn = fit_datrn(demo, datrn_config);
  Eigen::Vector3d y0 = demo.samples.row(0).transpose();
  Eigen::Vector3d g = demo.samples.row(demo.size() - 1).transpose();
  report.datrn_rollout = rollout(datrn, y0, g, demo.size() - 1);
  report.datrn_mse = reproduction_mse(demo, report.datrn_rollout);
  report.datrn_fit_seconds = datrn.fit_seconds;

  auto t_begin = std::chrono::steady_clock::now();
  GaResult ga = ga_search(demo, ga_config);
  DmpModel dmp = fit_dmp(demo, ga.best);
  report.dmp_search_seconds = std::chrono::duration<double>(
                                  std::chrono::steady_clock::now() - t_begin)
                                  .count();
  report.dmp_rollout = rollout_dmp(dmp, y0, g, demo.size() - 1);
  report.dmp_mse = reproduction_mse(demo, report.dmp_rollout);
  report.dmp_best = ga.best;
  report.ga_best_fitness = ga.best_fitness;
  report.ga_evaluations = ga.evaluations;
  report.time_reduction_ratio =
      report.datrn_fit_seconds > 0.0
          ? report.dmp_search_seconds / report.datrn_fit_seconds
          : 0.0;
  return report;
}

std::string ComparisonReport::to_json() const {
  nlohmann::json j;
  j["datrn"]["mse"] = {datrn_mse.x(), datrn_mse.y(), datrn_mse.z()};
  j["datrn"]["fit_seconds"] = datrn_fit_seconds;
  j["dmp"]["mse"] = {dmp_mse.x(), dmp_mse.y(), dmp_mse.z()};
  j["dmp"]["search_seconds"] = dmp_search_seconds;
  j["dmp"]["alpha_y"] = dmp_best.alpha_y;
  j["dmp"]["n_basis"] = dmp_best.n_basis;
  j["dmp"]["ga_best_fitness"] = ga_best_fitness;
  j["dmp"]["ga_evaluations"] = ga_evaluations;
  j["time_reduction_ratio"] = time_reduction_ratio;
  return j.dump(2);
}

}  // namespace i2a
