#include <doctest.h>

#include <cmath>

#include <bearing_forms/scenario.hpp>
#include <bearing_forms/trajectory.hpp>

using namespace bearing_forms;

namespace {

Eigen::VectorXd central_difference(const Trajectory& traj, double t, double h) {
  return (traj.positions(t + h).stacked - traj.positions(t - h).stacked) / (2.0 * h);
}

Eigen::VectorXd second_difference(const Trajectory& traj, double t, double h) {
  return (traj.positions(t + h).stacked - 2.0 * traj.positions(t).stacked +
          traj.positions(t - h).stacked) /
         (h * h);
}

}  // namespace

TEST_CASE("identity transform holds positions constant") {
  Eigen::MatrixXd base(2, 2);
  base << 0, 0, 1, 0;
  const SimilarityTrajectory traj(base, ScaleLaw::constant(1.0), RotationLaw::identity(2),
                                  TranslationLaw::zero(2));
  CHECK((traj.positions(3.7).stacked - traj.positions(0.0).stacked).norm() == 0.0);
  CHECK(traj.velocities(1.2).norm() == 0.0);
  CHECK(traj.accelerations(1.2).norm() == 0.0);
}

TEST_CASE("cube fixture matches its stated numbers") {
  const Scenario cube = scenario_cube8_3d();
  CHECK(cube.gains.kp == 1.0);
  CHECK(cube.dynamics == DynamicsKind::Single);

  // Base corners as listed; the scale law starts at 1.5, so the desired
  // configuration at t=0 is exactly 1.5x the corner list.
  const double s2 = std::sqrt(2.0);
  CHECK(cube.trajectory->base()(0, 0) == doctest::Approx(s2).epsilon(1e-15));
  CHECK(cube.trajectory->base()(7, 1) == doctest::Approx(-s2).epsilon(1e-15));
  const Configuration at0 = cube.trajectory->positions(0.0);
  for (int i = 0; i < 8; ++i) {
    CHECK((at0.agent(i + 1) - 1.5 * cube.trajectory->base().row(i).transpose()).norm() < 1e-12);
  }

  // Actual initial condition of agent 8 from the scenario fixture.
  REQUIRE(cube.initial.positions.has_value());
  const Eigen::VectorXd p8 = cube.initial.positions->segment(7 * 3, 3);
  CHECK(p8(0) == 2.0);
  CHECK(p8(1) == 0.0);
  CHECK(p8(2) == -2.0);
}

TEST_CASE("square fixture numbers") {
  const Scenario square = scenario_square4_2d();
  CHECK(square.gains.kp == 8.0);
  CHECK(square.gains.kd == 11.0);
  REQUIRE(square.initial.velocities.has_value());
  const Eigen::VectorXd v4 = square.initial.velocities->segment(3 * 2, 2);
  CHECK(v4(0) == 0.0);
  CHECK(v4(1) == -1.0);
  CHECK(square.trajectory->period() == doctest::Approx(6.0));
}

TEST_CASE("pyramid fixture numbers") {
  const Scenario pyramid = scenario_pyramid4_3d();
  CHECK(pyramid.gains.kp == 7.0);
  CHECK(pyramid.gains.kd == 10.0);
  const Eigen::VectorXd p3 = pyramid.trajectory->positions(0.0).agent(3);
  CHECK(p3(0) == doctest::Approx(0.5));
  CHECK(p3(1) == doctest::Approx(-std::sqrt(3.0) / 2.0));
  CHECK(p3(2) == doctest::Approx(0.0));
}

TEST_CASE("velocities match finite differences") {
  const Scenario cube = scenario_cube8_3d();
  for (const double t : {0.5, 3.0, 7.25, 11.0}) {
    const Eigen::VectorXd analytic = cube.trajectory->velocities(t);
    const Eigen::VectorXd numeric = central_difference(*cube.trajectory, t, 1e-5);
    CHECK((analytic - numeric).norm() <= 1e-8 * std::max(1.0, analytic.norm()));
  }
}

TEST_CASE("accelerations match second differences") {
  const Scenario square = scenario_square4_2d();
  for (const double t : {0.5, 2.0, 4.75}) {
    const Eigen::VectorXd analytic = square.trajectory->accelerations(t);
    const Eigen::VectorXd numeric = second_difference(*square.trajectory, t, 1e-4);
    CHECK((analytic - numeric).norm() <= 1e-6 * std::max(1.0, analytic.norm()));
  }
}

TEST_CASE("planar rotation by half a turn") {
  const RotationLaw law = RotationLaw::planar(M_PI / 3.0);
  const Eigen::MatrixXd r = law.matrix(3.0);
  CHECK((r + Eigen::Matrix2d::Identity()).norm() < 1e-14);
}

TEST_CASE("x-axis rotation closes after a full period") {
  const RotationLaw law = RotationLaw::about_axis(Eigen::Vector3d::UnitX(), M_PI / 3.0);
  CHECK((law.matrix(6.0) - Eigen::Matrix3d::Identity()).norm() < 1e-13);
  CHECK((law.matrix(0.0) - Eigen::Matrix3d::Identity()).norm() == 0.0);
}

TEST_CASE("rotations stay orthogonal on a dense grid") {
  const RotationLaw law = RotationLaw::about_axis(Eigen::Vector3d(1, 2, 2).normalized(), 0.73);
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.17 * k;
    const Eigen::MatrixXd r = law.matrix(t);
    CHECK((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("rotation derivative matches its generator") {
  const RotationLaw law = RotationLaw::about_axis(Eigen::Vector3d::UnitZ(), M_PI / 4.0);
  for (const double t : {0.0, 0.9, 2.5}) {
    const double h = 1e-6;
    const Eigen::MatrixXd numeric = (law.matrix(t + h) - law.matrix(t - h)) / (2.0 * h);
    CHECK((law.derivative(t) - numeric).norm() < 1e-8);
  }
}

TEST_CASE("unsupported rotation dimension") {
  CHECK_THROWS_AS(rotation_about_axis(4, Eigen::VectorXd::Ones(4), 1.0), Error);
}

TEST_CASE("desired bearings rotate with the transform") {
  // Under a pure similarity motion the desired bearings are the rotated
  // initial bearings (the translation and scale drop out). The composition
  // must match what positions() itself produces.
  for (const auto& scenario :
       {scenario_cube8_3d(), scenario_square4_2d(), scenario_pyramid4_3d()}) {
    const auto& traj = *scenario.trajectory;
    for (const Edge& edge : scenario.graph.edges()) {
      const Eigen::VectorXd g0 = desired_bearing(traj, edge, 0.0);
      for (const double t : {0.8, 2.4, 5.1}) {
        const Eigen::VectorXd expected = traj.rotation().matrix(t).transpose() * g0;
        CHECK((desired_bearing(traj, edge, t) - expected).norm() < 1e-10);
      }
    }
  }
}

TEST_CASE("shipped scenarios keep desired edges separated") {
  for (const auto& scenario :
       {scenario_cube8_3d(), scenario_square4_2d(), scenario_pyramid4_3d()}) {
    double min_separation = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 300; ++k) {
      const double t = scenario.integrator.horizon * k / 300.0;
      const Configuration config = scenario.trajectory->positions(t);
      for (const Edge& e : scenario.graph.edges()) {
        min_separation =
            std::min(min_separation, (config.agent(e.head) - config.agent(e.tail)).norm());
      }
    }
    CHECK(min_separation > 0.5);
  }
}

TEST_CASE("horizon is enforced") {
  Eigen::MatrixXd base(2, 2);
  base << 0, 0, 1, 0;
  const SimilarityTrajectory traj(base, ScaleLaw::constant(1.0), RotationLaw::identity(2),
                                  TranslationLaw::zero(2), std::nullopt, 10.0);
  CHECK_NOTHROW(traj.positions(10.0));
  CHECK_THROWS_AS(traj.positions(10.5), Error);
  CHECK_THROWS_AS(traj.positions(-0.1), Error);
}

TEST_CASE("scale must stay positive") {
  Eigen::MatrixXd base(2, 2);
  base << 0, 0, 1, 0;
  CHECK_THROWS_AS(ScaleLaw::sinusoid(1.5, 1.0, 1.0), Error);
  CHECK_NOTHROW(SimilarityTrajectory(base, ScaleLaw::sinusoid(0.5, 1.0, 1.5),
                                     RotationLaw::identity(2), TranslationLaw::zero(2)));
}

TEST_CASE("augmented trajectory appends an agent") {
  Eigen::MatrixXd base(2, 2);
  base << 0, 0, 1, 0;
  auto inner = std::make_shared<SimilarityTrajectory>(base, ScaleLaw::constant(1.0),
                                                      RotationLaw::planar(1.0),
                                                      TranslationLaw::zero(2));
  const AugmentedTrajectory traj(
      inner, [](double t) { return Eigen::Vector2d(std::cos(t), 3.0 + std::sin(t)); });
  CHECK(traj.agent_count() == 3);
  const Configuration config = traj.positions(0.0);
  CHECK(config.agent(3)(1) == doctest::Approx(3.0));
  CHECK_THROWS_AS(traj.velocities(0.0), Error);
}
