#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "bearing_forms/graph.hpp"
#include "bearing_forms/trajectory.hpp"

namespace bearing_forms {

/// Controller gains; kd is only meaningful for double-integrator runs.
struct GainSet {
  double kp = 1.0;
  double kd = 0.0;
};

/// Double-integrator gain condition kd > kp/4 * |H_lifted|^2 + 1, where the
/// squared spectral norm equals the largest Laplacian eigenvalue.
struct GainCheck {
  bool ok = false;
  double required_kd = 0.0;
  double margin = 0.0;  ///< kd - required_kd
  double incidence_norm_sq = 0.0;
};

GainCheck validate_gains(const FormationGraph& graph, double kp, double kd);

/// Velocity command of one agent from its own measurements: bearings to its
/// neighbors, the desired relative positions to the same neighbors (same
/// order), and its own feedforward velocity. No global state is used.
Eigen::VectorXd control_single(const std::vector<Eigen::VectorXd>& bearings,
                               const std::vector<Eigen::VectorXd>& desired_relative,
                               const Eigen::VectorXd& desired_velocity, double kp);

/// Acceleration command of one agent; additionally uses the agent's own
/// velocity error and feedforward acceleration.
Eigen::VectorXd control_double(const std::vector<Eigen::VectorXd>& bearings,
                               const std::vector<Eigen::VectorXd>& desired_relative,
                               const Eigen::VectorXd& velocity_error,
                               const Eigen::VectorXd& desired_acceleration, double kp, double kd);

/// Right side of the configuration observer driven by measured bearings and
/// velocities of the actual motion.
Eigen::VectorXd observer_rhs(const FormationGraph& graph, const Configuration& actual,
                             const Eigen::VectorXd& actual_velocity,
                             const Eigen::VectorXd& estimate);

/// Time-indexed record of a closed-loop run. The grid is uniform; when a run
/// aborts on bearing loss the recorded prefix is kept and the flag is set.
struct SimTrace {
  double dt = 0.0;
  std::vector<double> time;
  std::vector<Eigen::VectorXd> positions;
  std::vector<Eigen::VectorXd> velocities;  ///< empty for single-integrator runs
  std::vector<Eigen::VectorXd> controls;
  std::vector<double> err_position;      ///< |p - p*|
  std::vector<double> err_orthogonal;    ///< |p - p* - U q0|
  std::vector<double> err_velocity;      ///< |v - v*|
  std::vector<double> min_separation;    ///< min edge separation
  std::vector<Eigen::VectorXd> centroid_error;       ///< q0
  std::vector<Eigen::VectorXd> centroid_error_rate;  ///< dq0/dt (double only)
  bool bearing_loss = false;
  double loss_time = 0.0;
  int loss_edge = -1;
  std::vector<std::string> warnings;
};

/// Classical fixed-step RK4 on the single-integrator closed loop; each agent
/// is driven only through control_single on its local measurements. Initial
/// conditions outside the basin estimate produce a warning, not an error.
SimTrace simulate_single(const FormationGraph& graph, const Trajectory& desired,
                         const Eigen::VectorXd& initial_positions, double kp, double dt,
                         double horizon);

/// RK4 on the double-integrator closed loop via control_double. A failed gain
/// condition produces a warning (the caller decides whether to refuse).
SimTrace simulate_double(const FormationGraph& graph, const Trajectory& desired,
                         const Eigen::VectorXd& initial_positions,
                         const Eigen::VectorXd& initial_velocities, const GainSet& gains,
                         double dt, double horizon);

/// Record of an observer run against a known actual motion.
struct ObserverTrace {
  double dt = 0.0;
  std::vector<double> time;
  std::vector<Eigen::VectorXd> estimates;
  std::vector<double> err_estimate;    ///< |estimate - actual|
  std::vector<double> err_orthogonal;  ///< |zeta|: estimate error with the centroid removed
  std::vector<double> centroid_drift;  ///< |xi0(t) - xi0(0)|
  std::vector<double> min_separation;  ///< of the actual motion
};

ObserverTrace simulate_observer(const FormationGraph& graph, const Trajectory& actual,
                                const Eigen::VectorXd& initial_estimate, double dt,
                                double horizon);

/// Half the smallest desired edge separation over the sampled horizon: the
/// initial-error radius inside which the single-integrator law stays defined.
/// The value is horizon-dependent for aperiodic trajectories.
double basin_radius_single(const FormationGraph& graph, const Trajectory& desired,
                           double horizon, double sample_step = 1e-2);

/// Basin data for the double-integrator law.
struct DoubleBasin {
  double radius = 0.0;         ///< of the stacked [position error, velocity error]
  double amplification = 0.0;  ///< b: worst transient growth of the position error
  double p_eigen_max = 0.0;    ///< extreme eigenvalues of the storage matrix
  double p_eigen_min = 0.0;
};

/// Requires kd > 1 (InvalidGain otherwise).
DoubleBasin basin_radius_double(const FormationGraph& graph, const Trajectory& desired,
                                double kd, double horizon, double sample_step = 1e-2);

/// Certified per-window contraction and decay rate from the averaged-system
/// constants. All quantities echo the inputs that produced them.
struct StabilityBound {
  double lambda1 = 0.0, lambda2 = 0.0;  ///< storage-function bounds
  double lambda_sigma = 0.0;            ///< bound on the comparison matrix norm
  double gamma = 0.0;                   ///< dissipation coefficient
  double mu = 0.0;                      ///< excitation level against the identity
  double window = 0.0;                  ///< T
  double dissipation = 0.0;             ///< c: dynamics-vs-dissipation constant
  double rho = 0.0;
  double sigma = 0.0;             ///< per-window contraction, in (0,1)
  double decay_exponent = 0.0;    ///< sigma / (2T)
  double decay_coefficient = 0.0; ///< ln(1/(1-sigma)) / T, always above sigma/T
  double amplitude = 0.0;         ///< sqrt(lambda2 / (lambda1 (1-sigma)))
};

/// Raises InvalidInput unless every argument is positive and mu <= lambda_sigma.
StabilityBound exponential_rate_bound(double lambda1, double lambda2, double lambda_sigma,
                                      double gamma, double mu, double window,
                                      double dissipation);

/// Smallest c for which c * Q dominates A^T A in the double-integrator error
/// system: takes the larger quadratic root when the analytic floor
/// max(kp |H|^2, (kd^2+1)/(kd-1)) does not already satisfy the inequality,
/// and verifies positive semidefiniteness of the assembled pencil.
/// Requires kd > kp/4 |H|^2 + 1 (GainConditionViolated).
double min_dissipation_constant(const FormationGraph& graph, double kp, double kd);

/// Smallest ratio between the double-integrator storage dissipation and the
/// excitation comparison form: (kp(kd-1) - kp^2 |H|^2 / 4) / (kd - 1 + kp).
/// Positive exactly when the gain condition holds; scaled by the squared
/// worst-case edge-length ratio it gives the gamma that the rate bound
/// consumes. Requires kd > kp/4 |H|^2 + 1 (GainConditionViolated).
double min_storage_dissipation(const FormationGraph& graph, double kp, double kd);

/// Least-squares slope of log(values) against time over [t_begin, t_end].
struct RateFit {
  double rate = 0.0;  ///< positive for decay
  double r_squared = 0.0;
  int count = 0;
};

/// Raises NonPositiveSamples when a value in the window is <= 0, and
/// InvalidInput when fewer than two samples fall inside it.
RateFit fit_exponential_rate(const std::vector<double>& time, const std::vector<double>& values,
                             double t_begin, double t_end);

}  // namespace bearing_forms
