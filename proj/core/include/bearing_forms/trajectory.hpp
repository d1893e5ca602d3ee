#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "bearing_forms/bearing.hpp"

namespace bearing_forms {

/// Uniform scale factor s(t) > 0 with analytic derivatives.
class ScaleLaw {
 public:
  static ScaleLaw constant(double value);
  /// s(t) = amplitude * sin(frequency * t) + offset, frequency in rad/s.
  static ScaleLaw sinusoid(double amplitude, double frequency, double offset);

  double value(double t) const;
  double rate(double t) const;
  double acceleration(double t) const;
  /// Analytic lower bound of s over all t.
  double minimum() const;

 private:
  ScaleLaw() = default;
  bool sinusoid_ = false;
  double amplitude_ = 0.0;
  double frequency_ = 0.0;
  double offset_ = 1.0;
};

/// Rotation R(t) in SO(d) with R(0) = I and analytic derivatives, described
/// by a constant angular velocity (d = 2 or 3) or user-supplied callables.
class RotationLaw {
 public:
  static RotationLaw identity(int dimension);
  /// Planar rotation at a constant rate (rad/s), d = 2.
  static RotationLaw planar(double rate);
  /// Rotation about a fixed unit axis at a constant rate (rad/s), d = 3.
  static RotationLaw about_axis(const Eigen::Vector3d& axis, double rate);
  /// Arbitrary dimension: caller supplies R(t), dR/dt, d2R/dt2.
  static RotationLaw custom(int dimension,
                            std::function<Eigen::MatrixXd(double)> matrix,
                            std::function<Eigen::MatrixXd(double)> derivative,
                            std::function<Eigen::MatrixXd(double)> second_derivative);

  int dimension() const noexcept { return d_; }
  Eigen::MatrixXd matrix(double t) const;
  Eigen::MatrixXd derivative(double t) const;
  Eigen::MatrixXd second_derivative(double t) const;

 private:
  RotationLaw() = default;
  int d_ = 0;
  // Constant-rate laws: R(t) = exp(t W); custom laws use the callables.
  Eigen::MatrixXd generator_;  // W, d x d skew-symmetric
  bool custom_ = false;
  std::function<Eigen::MatrixXd(double)> matrix_fn_, derivative_fn_, second_fn_;
};

/// Convenience matching the scenario grammar: d = 2 uses the planar law
/// (axis ignored), d = 3 rotates about the given axis. Other dimensions must
/// use RotationLaw::custom and raise UnsupportedDimension here.
RotationLaw rotation_about_axis(int dimension, const Eigen::VectorXd& axis, double rate);

/// Translation c(t) as a per-axis polynomial in t.
class TranslationLaw {
 public:
  static TranslationLaw zero(int dimension);
  /// c(t) = velocity * t.
  static TranslationLaw linear(const Eigen::VectorXd& velocity);
  /// c(t) = sum_k coefficients[k] * t^k.
  static TranslationLaw polynomial(std::vector<Eigen::VectorXd> coefficients, int dimension);

  Eigen::VectorXd value(double t) const;
  Eigen::VectorXd rate(double t) const;
  Eigen::VectorXd acceleration(double t) const;

 private:
  TranslationLaw() = default;
  int d_ = 0;
  std::vector<Eigen::VectorXd> coefficients_;  // ascending powers of t
};

/// Time-parameterized desired configuration with analytic derivatives.
class Trajectory {
 public:
  virtual ~Trajectory() = default;

  virtual int agent_count() const = 0;
  virtual int dimension() const = 0;
  virtual Configuration positions(double t) const = 0;
  virtual Eigen::VectorXd velocities(double t) const = 0;
  virtual Eigen::VectorXd accelerations(double t) const = 0;

  /// Period of the bearing data, when the desired bearings are periodic.
  virtual std::optional<double> period() const { return std::nullopt; }
  virtual double horizon() const { return std::numeric_limits<double>::infinity(); }

 protected:
  void check_time(double t) const;
};

/// Similarity-transform family: p_i(t) = s(t) R(t)^T b_i + c(t) over a base
/// configuration b. Velocities and accelerations are exact derivatives of the
/// transform, never finite differences.
class SimilarityTrajectory final : public Trajectory {
 public:
  /// base is n x d (one row per agent). Raises InvalidInput when the scale law
  /// is not strictly positive or the rotation dimension disagrees with base.
  SimilarityTrajectory(Eigen::MatrixXd base, ScaleLaw scale, RotationLaw rotation,
                       TranslationLaw translation,
                       std::optional<double> period = std::nullopt,
                       double horizon = std::numeric_limits<double>::infinity());

  int agent_count() const override { return static_cast<int>(base_.rows()); }
  int dimension() const override { return static_cast<int>(base_.cols()); }
  Configuration positions(double t) const override;
  Eigen::VectorXd velocities(double t) const override;
  Eigen::VectorXd accelerations(double t) const override;
  std::optional<double> period() const override { return period_; }
  double horizon() const override { return horizon_; }

  const Eigen::MatrixXd& base() const noexcept { return base_; }
  const ScaleLaw& scale() const noexcept { return scale_; }
  const RotationLaw& rotation() const noexcept { return rotation_; }
  const TranslationLaw& translation() const noexcept { return translation_; }

 private:
  Eigen::MatrixXd base_;
  ScaleLaw scale_;
  RotationLaw rotation_;
  TranslationLaw translation_;
  std::optional<double> period_;
  double horizon_;
};

/// A base trajectory extended with one appended agent whose position is an
/// arbitrary callable. Velocities/accelerations for the appended agent are
/// optional; asking for them without supplying them raises InvalidInput.
class AugmentedTrajectory final : public Trajectory {
 public:
  AugmentedTrajectory(std::shared_ptr<const Trajectory> base,
                      std::function<Eigen::VectorXd(double)> position,
                      std::function<Eigen::VectorXd(double)> velocity = {},
                      std::function<Eigen::VectorXd(double)> acceleration = {});

  int agent_count() const override { return base_->agent_count() + 1; }
  int dimension() const override { return base_->dimension(); }
  Configuration positions(double t) const override;
  Eigen::VectorXd velocities(double t) const override;
  Eigen::VectorXd accelerations(double t) const override;
  std::optional<double> period() const override { return base_->period(); }
  double horizon() const override { return base_->horizon(); }

 private:
  std::shared_ptr<const Trajectory> base_;
  std::function<Eigen::VectorXd(double)> position_, velocity_, acceleration_;
};

/// Desired bearing of an oriented edge at time t.
Eigen::VectorXd desired_bearing(const Trajectory& trajectory, const Edge& edge, double t);

}  // namespace bearing_forms
