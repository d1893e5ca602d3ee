#include "bearing_forms/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Eigenvalues>

#include "bearing_forms/bearing.hpp"

namespace bearing_forms {

namespace {

double largest_laplacian_eigenvalue(const FormationGraph& graph) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(graph.laplacian(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

// Per-agent measurement views for the distributed laws: each agent sees only
// bearings to its neighbors and the matching desired relative positions.
struct LocalMeasurements {
  std::vector<Eigen::VectorXd> bearings;
  std::vector<Eigen::VectorXd> desired_relative;
};

class ClosedLoop {
 public:
  ClosedLoop(const FormationGraph& graph, const Trajectory& desired)
      : graph_(graph), desired_(desired), n_(graph.vertex_count()), d_(graph.dimension()) {}

  // Gathers agent-local data at (t, p); returns false on a sub-tolerance edge
  // separation and reports the offending edge.
  bool gather(double t, const Eigen::VectorXd& positions, int* lost_edge) {
    desired_config_ = desired_.positions(t);
    if (locals_.empty()) locals_.resize(static_cast<size_t>(n_));
    for (auto& local : locals_) {
      local.bearings.clear();
      local.desired_relative.clear();
    }
    const auto& edges = graph_.edges();
    for (size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      const Eigen::VectorXd relative =
          positions.segment((e.head - 1) * d_, d_) - positions.segment((e.tail - 1) * d_, d_);
      const double separation = relative.norm();
      if (separation <= kCoincidentTolerance) {
        if (lost_edge != nullptr) *lost_edge = static_cast<int>(k);
        return false;
      }
      const Eigen::VectorXd unit = relative / separation;
      const Eigen::VectorXd desired_relative =
          desired_config_.agent(e.head) - desired_config_.agent(e.tail);
      auto& tail_local = locals_[static_cast<size_t>(e.tail - 1)];
      auto& head_local = locals_[static_cast<size_t>(e.head - 1)];
      tail_local.bearings.push_back(unit);
      tail_local.desired_relative.push_back(desired_relative);
      head_local.bearings.push_back(-unit);
      head_local.desired_relative.push_back(-desired_relative);
    }
    return true;
  }

  const LocalMeasurements& local(int agent) const {
    return locals_[static_cast<size_t>(agent - 1)];
  }

  double min_edge_separation(const Eigen::VectorXd& positions) const {
    double best = std::numeric_limits<double>::infinity();
    for (const Edge& e : graph_.edges()) {
      const double separation = (positions.segment((e.head - 1) * d_, d_) -
                                 positions.segment((e.tail - 1) * d_, d_))
                                    .norm();
      best = std::min(best, separation);
    }
    return best;
  }

 private:
  const FormationGraph& graph_;
  const Trajectory& desired_;
  int n_;
  int d_;
  Configuration desired_config_;
  std::vector<LocalMeasurements> locals_;
};

Eigen::VectorXd centroid(const Eigen::VectorXd& stacked, int n, int d) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) mean += stacked.segment(i * d, d);
  return mean / n;
}

Eigen::VectorXd remove_centroid(const Eigen::VectorXd& stacked, int n, int d) {
  const Eigen::VectorXd mean = centroid(stacked, n, d);
  Eigen::VectorXd out = stacked;
  for (int i = 0; i < n; ++i) out.segment(i * d, d) -= mean;
  return out;
}

}  // namespace

GainCheck validate_gains(const FormationGraph& graph, double kp, double kd) {
  GainCheck check;
  check.incidence_norm_sq = largest_laplacian_eigenvalue(graph);
  check.required_kd = kp / 4.0 * check.incidence_norm_sq + 1.0;
  check.margin = kd - check.required_kd;
  check.ok = kp > 0.0 && kd > check.required_kd;
  return check;
}

Eigen::VectorXd control_single(const std::vector<Eigen::VectorXd>& bearings,
                               const std::vector<Eigen::VectorXd>& desired_relative,
                               const Eigen::VectorXd& desired_velocity, double kp) {
  Eigen::VectorXd command = desired_velocity;
  for (size_t j = 0; j < bearings.size(); ++j) {
    const Eigen::VectorXd& g = bearings[j];
    const Eigen::VectorXd& target = desired_relative[j];
    command -= kp * (target - g * g.dot(target));
  }
  return command;
}

Eigen::VectorXd control_double(const std::vector<Eigen::VectorXd>& bearings,
                               const std::vector<Eigen::VectorXd>& desired_relative,
                               const Eigen::VectorXd& velocity_error,
                               const Eigen::VectorXd& desired_acceleration, double kp,
                               double kd) {
  Eigen::VectorXd command = desired_acceleration - kd * velocity_error;
  for (size_t j = 0; j < bearings.size(); ++j) {
    const Eigen::VectorXd& g = bearings[j];
    const Eigen::VectorXd& target = desired_relative[j];
    command -= kp * (target - g * g.dot(target));
  }
  return command;
}

Eigen::VectorXd observer_rhs(const FormationGraph& graph, const Configuration& actual,
                             const Eigen::VectorXd& actual_velocity,
                             const Eigen::VectorXd& estimate) {
  const BearingState state = bearing_laplacian(graph, actual);
  return actual_velocity - state.laplacian * estimate;
}

SimTrace simulate_single(const FormationGraph& graph, const Trajectory& desired,
                         const Eigen::VectorXd& initial_positions, double kp, double dt,
                         double horizon) {
  const int n = graph.vertex_count();
  const int d = graph.dimension();
  if (initial_positions.size() != n * d) {
    throw Error(ErrorKind::InvalidInput, "initial positions have the wrong size");
  }
  if (dt <= 0.0 || horizon <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "dt and horizon must be positive");
  }

  ClosedLoop loop(graph, desired);
  SimTrace trace;
  trace.dt = dt;

  const Eigen::VectorXd initial_error = initial_positions - desired.positions(0.0).stacked;
  const double basin = basin_radius_single(graph, desired, horizon);
  if (initial_error.norm() >= basin) {
    trace.warnings.push_back("initial error " + std::to_string(initial_error.norm()) +
                             " outside the basin estimate " + std::to_string(basin));
  }

  auto rhs = [&](double t, const Eigen::VectorXd& p, Eigen::VectorXd* out, int* lost) {
    if (!loop.gather(t, p, lost)) return false;
    const Eigen::VectorXd vstar = desired.velocities(t);
    out->resize(n * d);
    for (int i = 1; i <= n; ++i) {
      const auto& local = loop.local(i);
      out->segment((i - 1) * d, d) =
          control_single(local.bearings, local.desired_relative, vstar.segment((i - 1) * d, d), kp);
    }
    return true;
  };

  const int steps = static_cast<int>(std::round(horizon / dt));
  Eigen::VectorXd p = initial_positions;
  Eigen::VectorXd k1, k2, k3, k4;

  auto record = [&](double t, const Eigen::VectorXd& state, const Eigen::VectorXd& control) {
    const Eigen::VectorXd error = state - desired.positions(t).stacked;
    const Eigen::VectorXd q0 = centroid(error, n, d);
    trace.time.push_back(t);
    trace.positions.push_back(state);
    trace.controls.push_back(control);
    trace.err_position.push_back(error.norm());
    trace.err_orthogonal.push_back(remove_centroid(error, n, d).norm());
    trace.err_velocity.push_back((control - desired.velocities(t)).norm());
    trace.min_separation.push_back(loop.min_edge_separation(state));
    trace.centroid_error.push_back(q0);
  };

  int lost = -1;
  for (int step = 0; step <= steps; ++step) {
    const double t = step * dt;
    if (!rhs(t, p, &k1, &lost)) {
      trace.bearing_loss = true;
      trace.loss_time = t;
      trace.loss_edge = lost;
      break;
    }
    record(t, p, k1);
    if (step == steps) break;
    const bool ok = rhs(t + dt / 2, p + (dt / 2) * k1, &k2, &lost) &&
                    rhs(t + dt / 2, p + (dt / 2) * k2, &k3, &lost) &&
                    rhs(t + dt, p + dt * k3, &k4, &lost);
    if (!ok) {
      trace.bearing_loss = true;
      trace.loss_time = t;
      trace.loss_edge = lost;
      break;
    }
    p += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return trace;
}

SimTrace simulate_double(const FormationGraph& graph, const Trajectory& desired,
                         const Eigen::VectorXd& initial_positions,
                         const Eigen::VectorXd& initial_velocities, const GainSet& gains,
                         double dt, double horizon) {
  const int n = graph.vertex_count();
  const int d = graph.dimension();
  const int dn = n * d;
  if (initial_positions.size() != dn || initial_velocities.size() != dn) {
    throw Error(ErrorKind::InvalidInput, "initial state has the wrong size");
  }
  if (dt <= 0.0 || horizon <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "dt and horizon must be positive");
  }

  ClosedLoop loop(graph, desired);
  SimTrace trace;
  trace.dt = dt;

  const GainCheck gain_check = validate_gains(graph, gains.kp, gains.kd);
  if (!gain_check.ok) {
    trace.warnings.push_back("gain condition violated: kd " + std::to_string(gains.kd) +
                             " <= required " + std::to_string(gain_check.required_kd));
  }
  if (gains.kd > 1.0) {
    const DoubleBasin basin = basin_radius_double(graph, desired, gains.kd, horizon);
    Eigen::VectorXd stacked_error(2 * dn);
    stacked_error.head(dn) = initial_positions - desired.positions(0.0).stacked;
    stacked_error.tail(dn) = initial_velocities - desired.velocities(0.0);
    if (stacked_error.norm() >= basin.radius) {
      trace.warnings.push_back("initial error " + std::to_string(stacked_error.norm()) +
                               " outside the basin estimate " + std::to_string(basin.radius));
    }
  }

  auto rhs = [&](double t, const Eigen::VectorXd& p, const Eigen::VectorXd& v,
                 Eigen::VectorXd* dv, int* lost) {
    if (!loop.gather(t, p, lost)) return false;
    const Eigen::VectorXd vstar = desired.velocities(t);
    const Eigen::VectorXd ustar = desired.accelerations(t);
    dv->resize(dn);
    for (int i = 1; i <= n; ++i) {
      const auto& local = loop.local(i);
      dv->segment((i - 1) * d, d) = control_double(
          local.bearings, local.desired_relative,
          v.segment((i - 1) * d, d) - vstar.segment((i - 1) * d, d),
          ustar.segment((i - 1) * d, d), gains.kp, gains.kd);
    }
    return true;
  };

  const int steps = static_cast<int>(std::round(horizon / dt));
  Eigen::VectorXd p = initial_positions;
  Eigen::VectorXd v = initial_velocities;
  Eigen::VectorXd a1, a2, a3, a4;

  auto record = [&](double t, const Eigen::VectorXd& pos, const Eigen::VectorXd& vel,
                    const Eigen::VectorXd& control) {
    const Eigen::VectorXd error = pos - desired.positions(t).stacked;
    const Eigen::VectorXd velocity_error = vel - desired.velocities(t);
    trace.time.push_back(t);
    trace.positions.push_back(pos);
    trace.velocities.push_back(vel);
    trace.controls.push_back(control);
    trace.err_position.push_back(error.norm());
    trace.err_orthogonal.push_back(remove_centroid(error, n, d).norm());
    trace.err_velocity.push_back(velocity_error.norm());
    trace.min_separation.push_back(loop.min_edge_separation(pos));
    trace.centroid_error.push_back(centroid(error, n, d));
    trace.centroid_error_rate.push_back(centroid(velocity_error, n, d));
  };

  int lost = -1;
  for (int step = 0; step <= steps; ++step) {
    const double t = step * dt;
    if (!rhs(t, p, v, &a1, &lost)) {
      trace.bearing_loss = true;
      trace.loss_time = t;
      trace.loss_edge = lost;
      break;
    }
    record(t, p, v, a1);
    if (step == steps) break;
    const bool ok =
        rhs(t + dt / 2, p + (dt / 2) * v, v + (dt / 2) * a1, &a2, &lost) &&
        rhs(t + dt / 2, p + (dt / 2) * v + (dt * dt / 4) * a1, v + (dt / 2) * a2, &a3, &lost) &&
        rhs(t + dt, p + dt * v + (dt * dt / 2) * a2, v + dt * a3, &a4, &lost);
    if (!ok) {
      trace.bearing_loss = true;
      trace.loss_time = t;
      trace.loss_edge = lost;
      break;
    }
    const Eigen::VectorXd v1 = v;
    const Eigen::VectorXd v2 = v + (dt / 2) * a1;
    const Eigen::VectorXd v3 = v + (dt / 2) * a2;
    const Eigen::VectorXd v4 = v + dt * a3;
    p += dt / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
    v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
  }
  return trace;
}

ObserverTrace simulate_observer(const FormationGraph& graph, const Trajectory& actual,
                                const Eigen::VectorXd& initial_estimate, double dt,
                                double horizon) {
  const int n = graph.vertex_count();
  const int d = graph.dimension();
  if (initial_estimate.size() != n * d) {
    throw Error(ErrorKind::InvalidInput, "initial estimate has the wrong size");
  }
  if (dt <= 0.0 || horizon <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "dt and horizon must be positive");
  }

  ObserverTrace trace;
  trace.dt = dt;

  auto rhs = [&](double t, const Eigen::VectorXd& estimate) {
    try {
      return observer_rhs(graph, actual.positions(t), actual.velocities(t), estimate);
    } catch (const CoincidentAgentsError& e) {
      throw BearingLossError(t, e.edge(),
                             "actual motion lost a bearing at t=" + std::to_string(t));
    }
  };

  const Eigen::VectorXd initial_offset =
      centroid(initial_estimate - actual.positions(0.0).stacked, n, d);

  const int steps = static_cast<int>(std::round(horizon / dt));
  Eigen::VectorXd estimate = initial_estimate;
  for (int step = 0; step <= steps; ++step) {
    const double t = step * dt;
    const Configuration actual_config = actual.positions(t);
    const Eigen::VectorXd error = estimate - actual_config.stacked;

    trace.time.push_back(t);
    trace.estimates.push_back(estimate);
    trace.err_estimate.push_back(error.norm());
    trace.err_orthogonal.push_back(remove_centroid(error, n, d).norm());
    trace.centroid_drift.push_back((centroid(error, n, d) - initial_offset).norm());
    double min_sep = std::numeric_limits<double>::infinity();
    for (const Edge& e : graph.edges()) {
      min_sep = std::min(min_sep,
                         (actual_config.agent(e.head) - actual_config.agent(e.tail)).norm());
    }
    trace.min_separation.push_back(min_sep);

    if (step == steps) break;
    const Eigen::VectorXd k1 = rhs(t, estimate);
    const Eigen::VectorXd k2 = rhs(t + dt / 2, estimate + (dt / 2) * k1);
    const Eigen::VectorXd k3 = rhs(t + dt / 2, estimate + (dt / 2) * k2);
    const Eigen::VectorXd k4 = rhs(t + dt, estimate + dt * k3);
    estimate += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return trace;
}

double basin_radius_single(const FormationGraph& graph, const Trajectory& desired,
                           double horizon, double sample_step) {
  double min_separation = std::numeric_limits<double>::infinity();
  const int samples = std::max(1, static_cast<int>(std::round(horizon / sample_step)));
  for (int k = 0; k <= samples; ++k) {
    const double t = horizon * k / samples;
    const Configuration config = desired.positions(t);
    for (const Edge& e : graph.edges()) {
      min_separation =
          std::min(min_separation, (config.agent(e.head) - config.agent(e.tail)).norm());
    }
  }
  return min_separation / 2.0;
}

DoubleBasin basin_radius_double(const FormationGraph& graph, const Trajectory& desired,
                                double kd, double horizon, double sample_step) {
  if (kd <= 1.0) {
    throw Error(ErrorKind::InvalidGain, "the storage matrix is positive definite only for kd > 1");
  }
  DoubleBasin basin;
  const double split = std::sqrt((kd - 1.0) * (kd - 1.0) + 4.0);
  basin.p_eigen_max = (kd + 1.0 + split) / 4.0;
  basin.p_eigen_min = (kd + 1.0 - split) / 4.0;
  basin.amplification = std::max(std::sqrt(basin.p_eigen_max / basin.p_eigen_min), std::sqrt(2.0));
  basin.radius = basin_radius_single(graph, desired, horizon, sample_step) / basin.amplification;
  return basin;
}

StabilityBound exponential_rate_bound(double lambda1, double lambda2, double lambda_sigma,
                                      double gamma, double mu, double window,
                                      double dissipation) {
  if (lambda1 <= 0 || lambda2 <= 0 || lambda_sigma <= 0 || gamma <= 0 || mu <= 0 ||
      window <= 0 || dissipation <= 0) {
    throw Error(ErrorKind::InvalidInput, "rate bound inputs must be positive");
  }
  if (mu > lambda_sigma) {
    throw Error(ErrorKind::InvalidInput, "mu cannot exceed the comparison norm bound");
  }
  StabilityBound bound;
  bound.lambda1 = lambda1;
  bound.lambda2 = lambda2;
  bound.lambda_sigma = lambda_sigma;
  bound.gamma = gamma;
  bound.mu = mu;
  bound.window = window;
  bound.dissipation = dissipation;
  bound.rho = lambda2 / (mu * window * gamma);
  bound.sigma = 1.0 / (1.0 + bound.rho) /
                (1.0 + bound.rho * dissipation * window * window * gamma * lambda_sigma);
  bound.decay_exponent = bound.sigma / (2.0 * window);
  bound.decay_coefficient = std::log(1.0 / (1.0 - bound.sigma)) / window;
  bound.amplitude = std::sqrt(lambda2 / (lambda1 * (1.0 - bound.sigma)));
  return bound;
}

double min_storage_dissipation(const FormationGraph& graph, double kp, double kd) {
  const double norm_sq = largest_laplacian_eigenvalue(graph);
  if (kd <= kp / 4.0 * norm_sq + 1.0) {
    throw Error(ErrorKind::GainConditionViolated,
                "kd must exceed kp/4 * |H|^2 + 1 = " + std::to_string(kp / 4.0 * norm_sq + 1.0));
  }
  return (kp * (kd - 1.0) - kp * kp / 4.0 * norm_sq) / (kd - 1.0 + kp);
}

double min_dissipation_constant(const FormationGraph& graph, double kp, double kd) {
  const double norm_sq = largest_laplacian_eigenvalue(graph);
  if (kd <= kp / 4.0 * norm_sq + 1.0) {
    throw Error(ErrorKind::GainConditionViolated,
                "kd must exceed kp/4 * |H|^2 + 1 = " + std::to_string(kp / 4.0 * norm_sq + 1.0));
  }

  const double floor_c = std::max(kp * norm_sq, (kd * kd + 1.0) / (kd - 1.0));
  const double a = kp * kd - kp - kp * kp / 4.0 * norm_sq;
  const double b = kp * kd * kd + kp - kp * kp * norm_sq;
  const double c0 = kp * kp * norm_sq;
  auto quadratic = [&](double c) { return a * c * c - b * c + c0; };

  double result = floor_c;
  if (quadratic(floor_c) < 0.0) {
    const double disc = b * b - 4.0 * a * c0;
    result = (b + std::sqrt(disc)) / (2.0 * a);
  }

  const int dm = graph.dimension() * graph.edge_count();
  const int dn = graph.dimension() * graph.vertex_count();
  const Eigen::MatrixXd lifted = graph.lifted_incidence();
  Eigen::MatrixXd mq = Eigen::MatrixXd::Zero(dm + dn, dm + dn);
  mq.topLeftCorner(dm, dm) = kp * Eigen::MatrixXd::Identity(dm, dm);
  mq.topRightCorner(dm, dn) = kp / 2.0 * lifted;
  mq.bottomLeftCorner(dn, dm) = kp / 2.0 * lifted.transpose();
  mq.bottomRightCorner(dn, dn) = (kd - 1.0) * Eigen::MatrixXd::Identity(dn, dn);

  Eigen::MatrixXd ma = Eigen::MatrixXd::Zero(dm + dn, dm + dn);
  ma.topLeftCorner(dm, dm) = kp * kp * lifted * lifted.transpose();
  ma.topRightCorner(dm, dn) = kp * kd * lifted;
  ma.bottomLeftCorner(dn, dm) = kp * kd * lifted.transpose();
  ma.bottomRightCorner(dn, dn) = (1.0 + kd * kd) * Eigen::MatrixXd::Identity(dn, dn);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(result * mq - ma, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw Error(ErrorKind::InvalidInput,
                "dissipation constant failed the positive semidefiniteness check");
  }
  return result;
}

RateFit fit_exponential_rate(const std::vector<double>& time, const std::vector<double>& values,
                             double t_begin, double t_end) {
  if (time.size() != values.size()) {
    throw Error(ErrorKind::InvalidInput, "time and value series differ in length");
  }
  double sum_t = 0, sum_y = 0, sum_tt = 0, sum_ty = 0, sum_yy = 0;
  int count = 0;
  for (size_t i = 0; i < time.size(); ++i) {
    if (time[i] < t_begin || time[i] > t_end) continue;
    if (values[i] <= 0.0) {
      throw Error(ErrorKind::NonPositiveSamples,
                  "non-positive sample at t=" + std::to_string(time[i]));
    }
    const double y = std::log(values[i]);
    sum_t += time[i];
    sum_y += y;
    sum_tt += time[i] * time[i];
    sum_ty += time[i] * y;
    sum_yy += y * y;
    ++count;
  }
  if (count < 2) {
    throw Error(ErrorKind::InvalidInput, "need at least two samples in the fit window");
  }

  const double denom = count * sum_tt - sum_t * sum_t;
  const double slope = (count * sum_ty - sum_t * sum_y) / denom;
  const double intercept = (sum_y - slope * sum_t) / count;

  const double ss_tot = sum_yy - sum_y * sum_y / count;
  double ss_res = 0.0;
  for (size_t i = 0; i < time.size(); ++i) {
    if (time[i] < t_begin || time[i] > t_end) continue;
    const double predicted = slope * time[i] + intercept;
    const double residual = std::log(values[i]) - predicted;
    ss_res += residual * residual;
  }

  RateFit fit;
  fit.rate = -slope;
  fit.count = count;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace bearing_forms
