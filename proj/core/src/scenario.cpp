#include "bearing_forms/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "bearing_forms/minitoml.hpp"

namespace bearing_forms {

namespace {

using minitoml::Value;

Eigen::VectorXd parse_vector(const Value& value, int expected) {
  const auto& array = value.as_array();
  if (expected >= 0 && static_cast<int>(array.size()) != expected) {
    throw Error(ErrorKind::ParseError,
                "expected a vector of length " + std::to_string(expected));
  }
  Eigen::VectorXd out(array.size());
  for (size_t i = 0; i < array.size(); ++i) out(static_cast<Eigen::Index>(i)) = array[i].as_real();
  return out;
}

Eigen::MatrixXd parse_matrix(const Value& value, int rows, int cols) {
  const auto& array = value.as_array();
  if (rows >= 0 && static_cast<int>(array.size()) != rows) {
    throw Error(ErrorKind::ParseError, "expected " + std::to_string(rows) + " rows");
  }
  Eigen::MatrixXd out(array.size(), cols);
  for (size_t r = 0; r < array.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = parse_vector(array[r], cols).transpose();
  }
  return out;
}

Eigen::VectorXd parse_stacked(const Value& value, int n, int d) {
  const Eigen::MatrixXd rows = parse_matrix(value, n, d);
  Eigen::VectorXd stacked(n * d);
  for (int i = 0; i < n; ++i) stacked.segment(i * d, d) = rows.row(i).transpose();
  return stacked;
}

const Value* find(const std::map<std::string, Value>& table, const std::string& key) {
  const auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

const Value& require(const std::map<std::string, Value>& table, const std::string& key,
                     const std::string& context) {
  const Value* value = find(table, key);
  if (value == nullptr) {
    throw Error(ErrorKind::ParseError, "missing '" + key + "' in " + context);
  }
  return *value;
}

ScaleLaw parse_scale(const Value* value) {
  if (value == nullptr) return ScaleLaw::constant(1.0);
  const auto& table = value->as_table();
  const std::string kind = require(table, "kind", "scale").as_string();
  if (kind == "const") {
    return ScaleLaw::constant(require(table, "value", "scale").as_real());
  }
  if (kind == "sin") {
    return ScaleLaw::sinusoid(require(table, "amp", "scale").as_real(),
                              require(table, "freq", "scale").as_real(),
                              require(table, "offset", "scale").as_real());
  }
  throw Error(ErrorKind::ParseError, "unknown scale kind '" + kind + "'");
}

RotationLaw parse_rotation(const Value* value, int d) {
  if (value == nullptr) return RotationLaw::identity(d);
  const auto& table = value->as_table();
  const double rate = require(table, "rate", "rotation").as_real();
  if (d == 2) return RotationLaw::planar(rate);
  const Eigen::VectorXd axis = parse_vector(require(table, "axis", "rotation"), d);
  return rotation_about_axis(d, axis, rate);
}

TranslationLaw parse_translation(const Value* value, int d) {
  if (value == nullptr) return TranslationLaw::zero(d);
  const auto& table = value->as_table();
  if (const Value* velocity = find(table, "velocity")) {
    return TranslationLaw::linear(parse_vector(*velocity, d));
  }
  if (const Value* coeffs = find(table, "coeffs")) {
    std::vector<Eigen::VectorXd> coefficients;
    for (const Value& row : coeffs->as_array()) coefficients.push_back(parse_vector(row, d));
    return TranslationLaw::polynomial(std::move(coefficients), d);
  }
  throw Error(ErrorKind::ParseError, "translation needs 'velocity' or 'coeffs'");
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& name) {
  const minitoml::Document document = minitoml::parse(text);

  Scenario scenario;
  scenario.source = text;
  scenario.name = name;
  if (const Value* declared = find(document, "name")) scenario.name = declared->as_string();

  const std::string dynamics =
      find(document, "dynamics") ? find(document, "dynamics")->as_string() : "single";
  if (dynamics == "single") {
    scenario.dynamics = DynamicsKind::Single;
  } else if (dynamics == "double") {
    scenario.dynamics = DynamicsKind::Double;
  } else if (dynamics == "observer") {
    scenario.dynamics = DynamicsKind::Observer;
  } else {
    throw Error(ErrorKind::ParseError, "unknown dynamics '" + dynamics + "'");
  }

  // [graph]
  const auto& graph_table = require(document, "graph", "scenario").as_table();
  const int n = static_cast<int>(require(graph_table, "n", "[graph]").as_integer());
  const int d = static_cast<int>(require(graph_table, "d", "[graph]").as_integer());
  std::vector<std::pair<int, int>> edges;
  for (const Value& pair : require(graph_table, "edges", "[graph]").as_array()) {
    const auto& endpoints = pair.as_array();
    if (endpoints.size() != 2) {
      throw Error(ErrorKind::ParseError, "edges must be two-element pairs");
    }
    edges.emplace_back(static_cast<int>(endpoints[0].as_integer()),
                       static_cast<int>(endpoints[1].as_integer()));
  }
  scenario.graph = build_graph(n, edges, d);

  // [trajectory]
  const auto& traj_table = require(document, "trajectory", "scenario").as_table();
  const std::string type = require(traj_table, "type", "[trajectory]").as_string();
  if (type != "similarity") {
    throw Error(ErrorKind::ParseError, "unknown trajectory type '" + type + "'");
  }
  const Eigen::MatrixXd base = parse_matrix(require(traj_table, "base", "[trajectory]"), n, d);
  std::optional<double> period;
  if (const Value* declared = find(traj_table, "period")) period = declared->as_real();
  double horizon = std::numeric_limits<double>::infinity();
  if (const Value* declared = find(traj_table, "horizon")) horizon = declared->as_real();
  scenario.trajectory = std::make_shared<SimilarityTrajectory>(
      base, parse_scale(find(traj_table, "scale")), parse_rotation(find(traj_table, "rotation"), d),
      parse_translation(find(traj_table, "translation"), d), period, horizon);

  // [gains]
  if (const Value* gains = find(document, "gains")) {
    const auto& table = gains->as_table();
    scenario.gains.kp = require(table, "kp", "[gains]").as_real();
    if (const Value* kd = find(table, "kd")) scenario.gains.kd = kd->as_real();
  }
  if (scenario.gains.kp <= 0.0) {
    throw Error(ErrorKind::InvalidGain, "kp must be positive");
  }
  if (scenario.dynamics == DynamicsKind::Double && scenario.gains.kd <= 0.0) {
    throw Error(ErrorKind::InvalidGain, "double-integrator dynamics needs kd > 0");
  }

  // [initial]
  if (const Value* initial = find(document, "initial")) {
    const auto& table = initial->as_table();
    if (const Value* positions = find(table, "positions")) {
      scenario.initial.positions = parse_stacked(*positions, n, d);
    }
    if (const Value* velocities = find(table, "velocities")) {
      scenario.initial.velocities = parse_stacked(*velocities, n, d);
    }
    if (const Value* perturb = find(table, "perturb")) {
      const auto& spec = perturb->as_table();
      PerturbSpec sampled;
      sampled.seed = static_cast<std::uint64_t>(require(spec, "seed", "perturb").as_integer());
      sampled.fraction = require(spec, "fraction", "perturb").as_real();
      if (sampled.fraction <= 0.0 || sampled.fraction > 1.0) {
        throw Error(ErrorKind::InvalidInput, "perturbation fraction must lie in (0, 1]");
      }
      scenario.initial.perturb = sampled;
    }
  }
  if (!scenario.initial.positions && !scenario.initial.perturb) {
    throw Error(ErrorKind::InvalidInput, "scenario gives neither positions nor a perturbation");
  }
  if (scenario.dynamics == DynamicsKind::Double && !scenario.initial.velocities &&
      !scenario.initial.perturb) {
    throw Error(ErrorKind::InvalidInput, "double-integrator dynamics needs initial velocities");
  }

  // [integrator]
  if (const Value* integrator = find(document, "integrator")) {
    const auto& table = integrator->as_table();
    if (const Value* dt = find(table, "dt")) scenario.integrator.dt = dt->as_real();
    if (const Value* hor = find(table, "horizon")) scenario.integrator.horizon = hor->as_real();
  }
  if (scenario.integrator.dt <= 0.0 || scenario.integrator.horizon <= 0.0) {
    throw Error(ErrorKind::InvalidInput, "integrator dt and horizon must be positive");
  }

  // [pe]
  if (const Value* pe = find(document, "pe")) {
    const auto& table = pe->as_table();
    if (const Value* window = find(table, "window")) scenario.pe.window = window->as_real();
    if (const Value* mu = find(table, "mu_min")) scenario.pe.mu_min = mu->as_real();
    if (const Value* step = find(table, "step")) scenario.pe.step = step->as_real();
    if (const Value* hor = find(table, "horizon")) scenario.pe.horizon = hor->as_real();
  }
  if (scenario.pe.window <= 0.0) {
    if (!scenario.trajectory->period()) {
      throw Error(ErrorKind::InvalidInput,
                  "scenario needs [pe] window when the trajectory declares no period");
    }
    scenario.pe.window = *scenario.trajectory->period();
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw Error(ErrorKind::InvalidInput, "cannot open scenario file " + path.string());
  }
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  return parse_scenario(buffer.str(), path.stem().string());
}

PEOptions pe_options(const Scenario& scenario) {
  PEOptions options;
  options.window = scenario.pe.window;
  options.mu_min = scenario.pe.mu_min;
  options.step = scenario.pe.step;
  options.horizon = scenario.pe.horizon;
  return options;
}

// ---------------------------------------------------------------------------
// Built-in scenarios. The edge sets are reconstructions: each file says so.

namespace {

const std::string kCube = R"(# 8-agent cube in R^3, single-integrator bearing control.
# The desired cube breathes in scale, rotates about the x axis, and drifts
# along y. Edge set: reconstructed spanning tree (star at agent 2); every
# desired bearing stays persistently exciting under the x-axis rotation.
name = "cube8_3d"
dynamics = "single"

[graph]
n = 8
d = 3
edges = [[1,2],[2,3],[2,4],[2,5],[2,6],[2,7],[2,8]]

[trajectory]
type = "similarity"
period = 6.0
scale = {kind = "sin", amp = 0.5, freq = 0.5235987755982988, offset = 1.5}
rotation = {axis = [1.0, 0.0, 0.0], rate = 1.0471975511965976}
translation = {velocity = [0.0, 0.2, 0.0]}
base = [
  [1.4142135623730951, 0.0, -1.0],
  [0.0, 1.4142135623730951, -1.0],
  [-1.4142135623730951, 0.0, -1.0],
  [0.0, -1.4142135623730951, -1.0],
  [1.4142135623730951, 0.0, 1.0],
  [0.0, 1.4142135623730951, 1.0],
  [-1.4142135623730951, 0.0, 1.0],
  [0.0, -1.4142135623730951, 1.0],
]

[gains]
kp = 1.0

[initial]
positions = [
  [1.0, 0.0, 0.0],
  [-1.0, 2.5, 1.0],
  [-2.0, -1.0, -1.0],
  [-0.5, 0.5, 1.0],
  [1.5, 0.0, 1.0],
  [-1.0, 0.0, 1.0],
  [0.0, -1.0, -1.0],
  [2.0, 0.0, -2.0],
]

[integrator]
dt = 0.001
horizon = 50.0

[pe]
window = 6.0
mu_min = 0.001
)";

const std::string kSquare = R"(# 4-agent square in R^2, double-integrator bearing control.
# The desired square spins in place at rate pi/3. Edge set: reconstructed
# path tree along the corners.
name = "square4_2d"
dynamics = "double"

[graph]
n = 4
d = 2
edges = [[1,2],[2,3],[3,4]]

[trajectory]
type = "similarity"
period = 6.0
rotation = {rate = 1.0471975511965976}
base = [
  [0.5, 0.5],
  [0.5, -0.5],
  [-0.5, -0.5],
  [-0.5, 0.5],
]

[gains]
kp = 8.0
kd = 11.0

[initial]
positions = [
  [-1.0, 1.5],
  [-1.0, 2.0],
  [-2.0, -1.0],
  [1.0, -1.0],
]
velocities = [
  [0.0, 0.0],
  [0.0, 1.0],
  [1.0, 0.0],
  [0.0, -1.0],
]

[integrator]
dt = 0.001
horizon = 30.0

[pe]
window = 6.0
mu_min = 0.001
)";

const std::string kPyramid = R"(# 4-agent pyramid in R^3, double-integrator bearing control.
# The desired shape rotates about the z axis through agent 1 at rate pi/4.
# Edge set: reconstructed path tree 4-1-2-3. It routes the apex through the
# strongest excited edge; agents 1 and 3 start at the same point, so any
# tree containing edge {1,3} would begin coincident.
name = "pyramid4_3d"
dynamics = "double"

[graph]
n = 4
d = 3
edges = [[1,2],[1,4],[2,3]]

[trajectory]
type = "similarity"
period = 8.0
rotation = {axis = [0.0, 0.0, 1.0], rate = 0.7853981633974483}
base = [
  [0.0, 0.0, 0.0],
  [1.0, 0.0, 0.0],
  [0.5, -0.8660254037844386, 0.0],
  [0.8660254037844386, -0.5, 1.0],
]

[gains]
kp = 7.0
kd = 10.0

[initial]
positions = [
  [-2.0, -1.0, -1.0],
  [-1.0, 2.0, 1.0],
  [-2.0, -1.0, -1.0],
  [-0.5, -0.5, 1.0],
]
velocities = [
  [0.0, 0.0, -1.0],
  [0.0, 1.0, 0.0],
  [1.0, 0.0, 0.0],
  [1.0, 0.0, -1.0],
]

[integrator]
dt = 0.001
horizon = 30.0

[pe]
window = 8.0
mu_min = 0.001
)";

const std::map<std::string, const std::string*> kBuiltins = {
    {"cube8_3d", &kCube},
    {"square4_2d", &kSquare},
    {"pyramid4_3d", &kPyramid},
};

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  names.reserve(kBuiltins.size());
  for (const auto& [name, text] : kBuiltins) names.push_back(name);
  return names;
}

const std::string& builtin_scenario_source(const std::string& name) {
  const auto it = kBuiltins.find(name);
  if (it == kBuiltins.end()) {
    throw Error(ErrorKind::InvalidInput, "unknown built-in scenario '" + name + "'");
  }
  return *it->second;
}

Scenario builtin_scenario(const std::string& name) {
  return parse_scenario(builtin_scenario_source(name), name);
}

Scenario scenario_cube8_3d() { return builtin_scenario("cube8_3d"); }
Scenario scenario_square4_2d() { return builtin_scenario("square4_2d"); }
Scenario scenario_pyramid4_3d() { return builtin_scenario("pyramid4_3d"); }

// ---------------------------------------------------------------------------
// Initial-state resolution

namespace {

// Deterministic uniform draw from the unit ball, independent of standard
// library distribution implementations.
Eigen::VectorXd unit_ball_sample(std::mt19937_64& rng, int dims) {
  auto uniform = [&rng]() { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  Eigen::VectorXd gaussian(dims);
  for (int i = 0; i < dims; i += 2) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    gaussian(i) = radius * std::cos(2.0 * M_PI * u2);
    if (i + 1 < dims) gaussian(i + 1) = radius * std::sin(2.0 * M_PI * u2);
  }
  const double scale = std::pow(uniform(), 1.0 / dims) / gaussian.norm();
  return scale * gaussian;
}

}  // namespace

InitialState resolve_initial_state(const Scenario& scenario) {
  const int dn = scenario.graph.vertex_count() * scenario.graph.dimension();
  InitialState state;
  state.positions = scenario.trajectory->positions(0.0).stacked;
  state.velocities = scenario.trajectory->velocities(0.0);

  if (scenario.initial.positions) state.positions = *scenario.initial.positions;
  if (scenario.initial.velocities) state.velocities = *scenario.initial.velocities;

  if (scenario.initial.perturb) {
    const PerturbSpec& perturb = *scenario.initial.perturb;
    std::mt19937_64 rng(perturb.seed);
    const double sample_horizon =
        scenario.trajectory->period().value_or(scenario.integrator.horizon);
    if (scenario.dynamics == DynamicsKind::Double) {
      const DoubleBasin basin = basin_radius_double(scenario.graph, *scenario.trajectory,
                                                    scenario.gains.kd, sample_horizon);
      const Eigen::VectorXd offset =
          perturb.fraction * basin.radius * unit_ball_sample(rng, 2 * dn);
      state.positions = scenario.trajectory->positions(0.0).stacked + offset.head(dn);
      state.velocities = scenario.trajectory->velocities(0.0) + offset.tail(dn);
    } else {
      const double basin =
          basin_radius_single(scenario.graph, *scenario.trajectory, sample_horizon);
      state.positions = scenario.trajectory->positions(0.0).stacked +
                        perturb.fraction * basin * unit_ball_sample(rng, dn);
    }
  }
  return state;
}

}  // namespace bearing_forms
