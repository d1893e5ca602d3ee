#include "bearing_forms/trajectory.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace bearing_forms {

// ---------------------------------------------------------------------------
// ScaleLaw

ScaleLaw ScaleLaw::constant(double value) {
  if (value <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "scale must be positive, got " + std::to_string(value));
  }
  ScaleLaw law;
  law.offset_ = value;
  return law;
}

ScaleLaw ScaleLaw::sinusoid(double amplitude, double frequency, double offset) {
  if (offset - std::abs(amplitude) <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "sinusoidal scale is not strictly positive");
  }
  ScaleLaw law;
  law.sinusoid_ = true;
  law.amplitude_ = amplitude;
  law.frequency_ = frequency;
  law.offset_ = offset;
  return law;
}

double ScaleLaw::value(double t) const {
  return sinusoid_ ? amplitude_ * std::sin(frequency_ * t) + offset_ : offset_;
}

double ScaleLaw::rate(double t) const {
  return sinusoid_ ? amplitude_ * frequency_ * std::cos(frequency_ * t) : 0.0;
}

double ScaleLaw::acceleration(double t) const {
  return sinusoid_ ? -amplitude_ * frequency_ * frequency_ * std::sin(frequency_ * t) : 0.0;
}

double ScaleLaw::minimum() const {
  return sinusoid_ ? offset_ - std::abs(amplitude_) : offset_;
}

// ---------------------------------------------------------------------------
// RotationLaw

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

}  // namespace

RotationLaw RotationLaw::identity(int dimension) {
  RotationLaw law;
  law.d_ = dimension;
  law.generator_ = Eigen::MatrixXd::Zero(dimension, dimension);
  return law;
}

RotationLaw RotationLaw::planar(double rate) {
  RotationLaw law;
  law.d_ = 2;
  law.generator_ = Eigen::MatrixXd::Zero(2, 2);
  law.generator_ << 0.0, -rate, rate, 0.0;
  return law;
}

RotationLaw RotationLaw::about_axis(const Eigen::Vector3d& axis, double rate) {
  const double norm = axis.norm();
  if (norm <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "rotation axis must be nonzero");
  }
  RotationLaw law;
  law.d_ = 3;
  law.generator_ = rate * skew(axis / norm);
  return law;
}

RotationLaw RotationLaw::custom(int dimension,
                                std::function<Eigen::MatrixXd(double)> matrix,
                                std::function<Eigen::MatrixXd(double)> derivative,
                                std::function<Eigen::MatrixXd(double)> second_derivative) {
  RotationLaw law;
  law.d_ = dimension;
  law.custom_ = true;
  law.matrix_fn_ = std::move(matrix);
  law.derivative_fn_ = std::move(derivative);
  law.second_fn_ = std::move(second_derivative);
  return law;
}

Eigen::MatrixXd RotationLaw::matrix(double t) const {
  if (custom_) return matrix_fn_(t);
  // R(t) = exp(t W) for the constant-generator laws; closed forms below.
  if (d_ == 2) {
    const double rate = generator_(1, 0);
    const double angle = rate * t;
    Eigen::Matrix2d r;
    r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    return r;
  }
  if (d_ == 3) {
    const Eigen::Vector3d omega(generator_(2, 1), generator_(0, 2), generator_(1, 0));
    const double rate = omega.norm();
    if (rate == 0.0) return Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d k = skew(omega / rate);
    const double angle = rate * t;
    return Eigen::Matrix3d::Identity() + std::sin(angle) * k +
           (1.0 - std::cos(angle)) * (k * k);
  }
  if (generator_.isZero(0.0)) return Eigen::MatrixXd::Identity(d_, d_);
  throw Error(ErrorKind::UnsupportedDimension,
              "constant-rate rotations are implemented for d = 2 and 3 only; "
              "supply RotationLaw::custom for d = " + std::to_string(d_));
}

Eigen::MatrixXd RotationLaw::derivative(double t) const {
  if (custom_) return derivative_fn_(t);
  return generator_ * matrix(t);
}

Eigen::MatrixXd RotationLaw::second_derivative(double t) const {
  if (custom_) return second_fn_(t);
  return generator_ * generator_ * matrix(t);
}

RotationLaw rotation_about_axis(int dimension, const Eigen::VectorXd& axis, double rate) {
  if (dimension == 2) return RotationLaw::planar(rate);
  if (dimension == 3) {
    if (axis.size() != 3) {
      throw Error(ErrorKind::InvalidInput, "3-D rotation needs a 3-vector axis");
    }
    return RotationLaw::about_axis(Eigen::Vector3d(axis), rate);
  }
  throw Error(ErrorKind::UnsupportedDimension,
              "rotation_about_axis supports d in {2,3}; use RotationLaw::custom otherwise");
}

// ---------------------------------------------------------------------------
// TranslationLaw

TranslationLaw TranslationLaw::zero(int dimension) {
  TranslationLaw law;
  law.d_ = dimension;
  return law;
}

TranslationLaw TranslationLaw::linear(const Eigen::VectorXd& velocity) {
  TranslationLaw law;
  law.d_ = static_cast<int>(velocity.size());
  law.coefficients_ = {Eigen::VectorXd::Zero(velocity.size()), velocity};
  return law;
}

TranslationLaw TranslationLaw::polynomial(std::vector<Eigen::VectorXd> coefficients,
                                          int dimension) {
  for (const auto& c : coefficients) {
    if (c.size() != dimension) {
      throw Error(ErrorKind::InvalidInput, "translation coefficient dimension mismatch");
    }
  }
  TranslationLaw law;
  law.d_ = dimension;
  law.coefficients_ = std::move(coefficients);
  return law;
}

Eigen::VectorXd TranslationLaw::value(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
  double power = 1.0;
  for (const auto& c : coefficients_) {
    out += power * c;
    power *= t;
  }
  return out;
}

Eigen::VectorXd TranslationLaw::rate(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
  double power = 1.0;
  for (size_t k = 1; k < coefficients_.size(); ++k) {
    out += static_cast<double>(k) * power * coefficients_[k];
    power *= t;
  }
  return out;
}

Eigen::VectorXd TranslationLaw::acceleration(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d_);
  double power = 1.0;
  for (size_t k = 2; k < coefficients_.size(); ++k) {
    out += static_cast<double>(k) * static_cast<double>(k - 1) * power * coefficients_[k];
    power *= t;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory

void Trajectory::check_time(double t) const {
  if (t < 0.0 || t > horizon()) {
    throw Error(ErrorKind::OutsideHorizon,
                "time " + std::to_string(t) + " outside the declared horizon [0, " +
                    std::to_string(horizon()) + "]");
  }
}

SimilarityTrajectory::SimilarityTrajectory(Eigen::MatrixXd base, ScaleLaw scale,
                                           RotationLaw rotation, TranslationLaw translation,
                                           std::optional<double> period, double horizon)
    : base_(std::move(base)),
      scale_(scale),
      rotation_(rotation),
      translation_(translation),
      period_(period),
      horizon_(horizon) {
  if (base_.rows() < 2 || base_.cols() < 2) {
    throw Error(ErrorKind::InvalidInput, "base configuration must be n x d with n, d >= 2");
  }
  if (rotation_.dimension() != base_.cols()) {
    throw Error(ErrorKind::InvalidInput, "rotation dimension does not match the base");
  }
  if (scale_.minimum() <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "scale law is not strictly positive");
  }
}

Configuration SimilarityTrajectory::positions(double t) const {
  check_time(t);
  const int n = agent_count();
  const int d = dimension();
  const double s = scale_.value(t);
  const Eigen::MatrixXd rt = rotation_.matrix(t).transpose();
  const Eigen::VectorXd c = translation_.value(t);

  Eigen::VectorXd stacked(n * d);
  for (int i = 0; i < n; ++i) {
    stacked.segment(i * d, d) = s * (rt * base_.row(i).transpose()) + c;
  }
  return Configuration(std::move(stacked), n, d);
}

Eigen::VectorXd SimilarityTrajectory::velocities(double t) const {
  check_time(t);
  const int n = agent_count();
  const int d = dimension();
  const double s = scale_.value(t);
  const double s_dot = scale_.rate(t);
  const Eigen::MatrixXd rt = rotation_.matrix(t).transpose();
  const Eigen::MatrixXd rt_dot = rotation_.derivative(t).transpose();
  const Eigen::VectorXd c_dot = translation_.rate(t);

  Eigen::VectorXd stacked(n * d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd b = base_.row(i).transpose();
    stacked.segment(i * d, d) = s_dot * (rt * b) + s * (rt_dot * b) + c_dot;
  }
  return stacked;
}

Eigen::VectorXd SimilarityTrajectory::accelerations(double t) const {
  check_time(t);
  const int n = agent_count();
  const int d = dimension();
  const double s = scale_.value(t);
  const double s_dot = scale_.rate(t);
  const double s_ddot = scale_.acceleration(t);
  const Eigen::MatrixXd rt = rotation_.matrix(t).transpose();
  const Eigen::MatrixXd rt_dot = rotation_.derivative(t).transpose();
  const Eigen::MatrixXd rt_ddot = rotation_.second_derivative(t).transpose();
  const Eigen::VectorXd c_ddot = translation_.acceleration(t);

  Eigen::VectorXd stacked(n * d);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd b = base_.row(i).transpose();
    stacked.segment(i * d, d) =
        s_ddot * (rt * b) + 2.0 * s_dot * (rt_dot * b) + s * (rt_ddot * b) + c_ddot;
  }
  return stacked;
}

AugmentedTrajectory::AugmentedTrajectory(std::shared_ptr<const Trajectory> base,
                                         std::function<Eigen::VectorXd(double)> position,
                                         std::function<Eigen::VectorXd(double)> velocity,
                                         std::function<Eigen::VectorXd(double)> acceleration)
    : base_(std::move(base)),
      position_(std::move(position)),
      velocity_(std::move(velocity)),
      acceleration_(std::move(acceleration)) {
  if (!base_ || !position_) {
    throw Error(ErrorKind::InvalidInput, "augmented trajectory needs a base and a position");
  }
}

Configuration AugmentedTrajectory::positions(double t) const {
  const Configuration base = base_->positions(t);
  const int d = dimension();
  Eigen::VectorXd stacked(base.stacked.size() + d);
  stacked.head(base.stacked.size()) = base.stacked;
  stacked.tail(d) = position_(t);
  return Configuration(std::move(stacked), agent_count(), d);
}

Eigen::VectorXd AugmentedTrajectory::velocities(double t) const {
  if (!velocity_) {
    throw Error(ErrorKind::InvalidInput, "appended agent has no velocity callable");
  }
  const Eigen::VectorXd base = base_->velocities(t);
  const int d = dimension();
  Eigen::VectorXd stacked(base.size() + d);
  stacked.head(base.size()) = base;
  stacked.tail(d) = velocity_(t);
  return stacked;
}

Eigen::VectorXd AugmentedTrajectory::accelerations(double t) const {
  if (!acceleration_) {
    throw Error(ErrorKind::InvalidInput, "appended agent has no acceleration callable");
  }
  const Eigen::VectorXd base = base_->accelerations(t);
  const int d = dimension();
  Eigen::VectorXd stacked(base.size() + d);
  stacked.head(base.size()) = base;
  stacked.tail(d) = acceleration_(t);
  return stacked;
}

Eigen::VectorXd desired_bearing(const Trajectory& trajectory, const Edge& edge, double t) {
  const Configuration config = trajectory.positions(t);
  return bearing(config.agent(edge.tail), config.agent(edge.head));
}

}  // namespace bearing_forms
