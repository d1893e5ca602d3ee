#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bearing_forms/graph.hpp"
#include "bearing_forms/pe.hpp"
#include "bearing_forms/sim.hpp"
#include "bearing_forms/trajectory.hpp"

namespace bearing_forms {

enum class DynamicsKind { Single, Double, Observer };

/// Seeded random initial condition: a uniform draw from the ball of radius
/// fraction * basin radius around the desired initial state.
struct PerturbSpec {
  std::uint64_t seed = 0;
  double fraction = 1.0;
};

struct InitialSpec {
  std::optional<Eigen::VectorXd> positions;   ///< stacked, dn
  std::optional<Eigen::VectorXd> velocities;  ///< stacked, dn (double dynamics)
  std::optional<PerturbSpec> perturb;
};

struct IntegratorSpec {
  double dt = 1e-3;
  double horizon = 30.0;
};

struct PESpec {
  double window = 0.0;  ///< 0: use the trajectory period
  double mu_min = 1e-3;
  double step = 0.0;     ///< 0: window / 200
  double horizon = 0.0;  ///< 0: period snap / 3 windows
};

/// A fully described run: graph, desired motion, gains, dynamics, initial
/// conditions, integrator settings, and excitation-scan parameters.
struct Scenario {
  std::string name;
  FormationGraph graph;
  std::shared_ptr<const SimilarityTrajectory> trajectory;
  DynamicsKind dynamics = DynamicsKind::Single;
  GainSet gains;
  InitialSpec initial;
  IntegratorSpec integrator;
  PESpec pe;
  std::string source;  ///< original scenario text
};

/// Parses scenario text (see the README for the grammar). Throws ParseError
/// with line/column for syntax problems and Error for semantic ones.
Scenario parse_scenario(const std::string& text, const std::string& name = "scenario");

Scenario load_scenario(const std::filesystem::path& path);

/// Built-in scenario fixtures, stored as scenario text so that exporting and
/// re-loading them is byte-exact.
std::vector<std::string> builtin_scenario_names();
const std::string& builtin_scenario_source(const std::string& name);
Scenario builtin_scenario(const std::string& name);

Scenario scenario_cube8_3d();
Scenario scenario_square4_2d();
Scenario scenario_pyramid4_3d();

/// Concrete initial state after resolving explicit values, defaults, and
/// perturbation sampling. For observer scenarios the positions are the
/// initial estimate.
struct InitialState {
  Eigen::VectorXd positions;
  Eigen::VectorXd velocities;
};

InitialState resolve_initial_state(const Scenario& scenario);

/// The PE options a scenario implies (window defaulting to the period).
PEOptions pe_options(const Scenario& scenario);

}  // namespace bearing_forms
