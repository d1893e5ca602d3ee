#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <bearing_forms/io.hpp>
#include <bearing_forms/pe.hpp>
#include <bearing_forms/scenario.hpp>
#include <bearing_forms/sim.hpp>

namespace bearing_forms::cli {

namespace fs = std::filesystem;

namespace {

Scenario resolve_scenario(const std::string& ref) {
  if (fs::exists(ref)) return load_scenario(ref);
  const auto names = builtin_scenario_names();
  if (std::find(names.begin(), names.end(), ref) != names.end()) return builtin_scenario(ref);
  throw Error(ErrorKind::InvalidInput,
              "'" + ref + "' is neither a scenario file nor a built-in name");
}

fs::path run_directory(const std::string& out_dir, const Scenario& scenario) {
  const fs::path dir = fs::path(out_dir) / scenario.name;
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream stream(path, std::ios::binary);
  stream << contents;
}

std::string hash_label(const Scenario& scenario) {
  std::ostringstream out;
  out << std::hex << fnv1a(scenario.source);
  return out.str();
}

double sample_horizon(const Scenario& scenario) {
  return scenario.trajectory->period().value_or(scenario.integrator.horizon);
}

void apply_overrides(Scenario& scenario, const RunOverrides& overrides) {
  if (overrides.dt) scenario.integrator.dt = *overrides.dt;
  if (overrides.horizon) scenario.integrator.horizon = *overrides.horizon;
  if (overrides.seed) {
    if (scenario.initial.perturb) {
      scenario.initial.perturb->seed = *overrides.seed;
    } else {
      std::cerr << "note: --seed ignored, the scenario has explicit initial conditions\n";
    }
  }
}

std::optional<RateFit> tail_rate(const std::vector<double>& time,
                                 const std::vector<double>& values) {
  if (time.size() < 4) return std::nullopt;
  const double t_end = time.back();
  try {
    return fit_exponential_rate(time, values, t_end / 2.0, t_end);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

int cmd_analyze(const std::string& scenario_ref, const std::string& out_dir) {
  const Scenario scenario = resolve_scenario(scenario_ref);
  const FormationGraph& graph = scenario.graph;
  const int n = graph.vertex_count();
  const int d = graph.dimension();
  const int m = graph.edge_count();

  std::ostringstream csv;
  csv << "key,value\n";
  auto emit = [&csv](const std::string& key, const std::string& value) {
    csv << key << "," << value << "\n";
    std::cout << key << ": " << value << "\n";
  };

  emit("scenario", scenario.name);
  emit("hash", hash_label(scenario));
  emit("agents", std::to_string(n));
  emit("dimension", std::to_string(d));
  emit("edges", std::to_string(m));

  const bool connected = graph.has_spanning_tree();
  emit("connected", connected ? "true" : "false");
  emit("acyclic", graph.is_acyclic() ? "true" : "false");
  emit("min_rigid_edges", std::to_string(min_rigid_edge_count(n, d)));
  if (connected) {
    emit("pe_bearing_lower_bound", std::to_string(min_pe_bearing_lower_bound(m, n, d)));
  }

  if (!connected) {
    emit("bpe", "false");
    emit("note", "graph is disconnected");
    write_file(run_directory(out_dir, scenario) / "analysis.csv", csv.str());
    return kExitAnalysisNegative;
  }

  // Rank history of the desired motion across one period (or the horizon).
  const double span = sample_horizon(scenario);
  int rank_min = std::numeric_limits<int>::max();
  int rank_max = 0;
  const int samples = 24;
  for (int k = 0; k <= samples; ++k) {
    const double t = span * k / samples;
    const RankAnalysis rank =
        bearing_laplacian_rank(bearing_laplacian(graph, scenario.trajectory->positions(t)));
    rank_min = std::min(rank_min, rank.rank);
    rank_max = std::max(rank_max, rank.rank);
  }
  emit("rank_min", std::to_string(rank_min));
  emit("rank_max", std::to_string(rank_max));
  emit("rank_max_possible", std::to_string(d * n - d - 1));

  const PEOptions options = pe_options(scenario);
  const BpeVerdict verdict = is_bpe(graph, *scenario.trajectory, options);
  emit("pe_window", format_value(verdict.certificate->window));
  emit("pe_step", format_value(verdict.certificate->step));
  emit("pe_windows_scanned", std::to_string(verdict.certificate->windows.size()));
  emit("pe_mu", format_value(verdict.certificate->mu));
  emit("pe_mu_min", format_value(verdict.certificate->mu_min));
  emit("pe_horizon_certified", verdict.certificate->snapped_to_period
                                   ? "one period"
                                   : format_value(verdict.certificate->scan_horizon) + " s");

  for (int k = 0; k < m; ++k) {
    const Edge& e = graph.edges()[static_cast<size_t>(k)];
    auto direction = [&scenario, e](double t) {
      return desired_bearing(*scenario.trajectory, e, t);
    };
    const PECertificate edge_cert =
        certify_direction_pe(direction, d, options, scenario.trajectory->period());
    emit("edge_mu_" + std::to_string(e.tail) + "_" + std::to_string(e.head),
         format_value(edge_cert.mu));
  }

  emit("bpe", verdict.bpe ? "true" : "false");
  write_file(run_directory(out_dir, scenario) / "analysis.csv", csv.str());
  return verdict.bpe ? kExitOk : kExitAnalysisNegative;
}

namespace {

int run_closed_loop(Scenario scenario, const std::string& out_dir, bool force, int stride) {
  const fs::path dir = run_directory(out_dir, scenario);
  const InitialState initial = resolve_initial_state(scenario);

  std::cout << "scenario: " << scenario.name << " (hash " << hash_label(scenario) << ")\n";

  if (scenario.dynamics == DynamicsKind::Double) {
    const GainCheck gains = validate_gains(scenario.graph, scenario.gains.kp, scenario.gains.kd);
    std::cout << "gain check: required kd > " << format_value(gains.required_kd)
              << ", margin " << format_value(gains.margin) << "\n";
    if (!gains.ok && !force) {
      std::cerr << "gain condition violated (use --force to run anyway)\n";
      return kExitGainViolation;
    }
    const DoubleBasin basin = basin_radius_double(scenario.graph, *scenario.trajectory,
                                                  scenario.gains.kd, sample_horizon(scenario));
    std::cout << "basin radius: " << format_value(basin.radius) << " (amplification "
              << format_value(basin.amplification) << ")\n";
  } else {
    std::cout << "basin radius: "
              << format_value(basin_radius_single(scenario.graph, *scenario.trajectory,
                                                  sample_horizon(scenario)))
              << "\n";
  }

  SimTrace trace;
  if (scenario.dynamics == DynamicsKind::Single) {
    trace = simulate_single(scenario.graph, *scenario.trajectory, initial.positions,
                            scenario.gains.kp, scenario.integrator.dt,
                            scenario.integrator.horizon);
  } else {
    trace = simulate_double(scenario.graph, *scenario.trajectory, initial.positions,
                            initial.velocities, scenario.gains, scenario.integrator.dt,
                            scenario.integrator.horizon);
  }
  for (const auto& warning : trace.warnings) std::cout << "warning: " << warning << "\n";

  std::ostringstream csv;
  write_trace_csv(csv, trace, scenario.graph.vertex_count(), scenario.graph.dimension(), stride);
  write_file(dir / "trace.csv", csv.str());

  std::vector<std::pair<std::string, std::vector<double>>> series = {
      {"err_p", trace.err_position}, {"err_delta", trace.err_orthogonal}};
  if (scenario.dynamics == DynamicsKind::Double) series.push_back({"err_v", trace.err_velocity});
  write_file(dir / "errors.svg",
             render_error_svg(trace.time, series, scenario.name + " error norms"));
  write_file(dir / "trajectory.svg",
             render_trajectory_svg(trace.positions, scenario.graph.vertex_count(),
                                   scenario.graph.dimension(), scenario.graph.edges(),
                                   scenario.name + " agent paths"));

  std::cout << "trace: " << (dir / "trace.csv").string() << " ("
            << std::to_string(trace.time.size()) << " rows, hash " << std::hex
            << fnv1a(csv.str()) << std::dec << ")\n";
  std::cout << "plots: " << (dir / "errors.svg").string() << ", "
            << (dir / "trajectory.svg").string() << "\n";

  if (trace.bearing_loss) {
    std::cerr << "bearing loss at t=" << format_value(trace.loss_time) << " on edge index "
              << trace.loss_edge << "; partial trace written\n";
    return kExitBearingLoss;
  }

  std::cout << "terminal err_p: " << format_value(trace.err_position.back()) << "\n";
  std::cout << "terminal err_delta: " << format_value(trace.err_orthogonal.back()) << "\n";
  std::cout << "terminal err_v: " << format_value(trace.err_velocity.back()) << "\n";
  if (const auto fit = tail_rate(trace.time, trace.err_orthogonal)) {
    std::cout << "fitted err_delta decay rate: " << format_value(fit->rate)
              << " 1/s (r^2 " << format_value(fit->r_squared) << ")\n";
  }
  return kExitOk;
}

}  // namespace

int cmd_simulate(const std::string& scenario_ref, const std::string& out_dir,
                 const RunOverrides& overrides, bool force, int stride) {
  Scenario scenario = resolve_scenario(scenario_ref);
  apply_overrides(scenario, overrides);
  if (scenario.dynamics == DynamicsKind::Observer) {
    return cmd_observe(scenario_ref, out_dir, overrides, stride);
  }
  return run_closed_loop(std::move(scenario), out_dir, force, stride);
}

int cmd_observe(const std::string& scenario_ref, const std::string& out_dir,
                const RunOverrides& overrides, int stride) {
  Scenario scenario = resolve_scenario(scenario_ref);
  apply_overrides(scenario, overrides);
  const fs::path dir = run_directory(out_dir, scenario);

  // The scenario's trajectory is the actual motion; the initial block is the
  // initial estimate.
  const InitialState initial = resolve_initial_state(scenario);
  std::cout << "scenario: " << scenario.name << " (hash " << hash_label(scenario) << ")\n";

  const ObserverTrace trace =
      simulate_observer(scenario.graph, *scenario.trajectory, initial.positions,
                        scenario.integrator.dt, scenario.integrator.horizon);

  std::ostringstream csv;
  write_observer_csv(csv, trace, scenario.graph.vertex_count(), scenario.graph.dimension(),
                     stride);
  write_file(dir / "observer.csv", csv.str());
  write_file(dir / "observer_errors.svg",
             render_error_svg(trace.time,
                              {{"zeta", trace.err_orthogonal},
                               {"xi0 drift", trace.centroid_drift}},
                              scenario.name + " observer errors"));

  std::cout << "trace: " << (dir / "observer.csv").string() << "\n";
  std::cout << "initial |zeta|: " << format_value(trace.err_orthogonal.front()) << "\n";
  std::cout << "final |zeta|: " << format_value(trace.err_orthogonal.back()) << "\n";
  if (trace.err_orthogonal.front() > 0.0) {
    std::cout << "contraction: "
              << format_value(trace.err_orthogonal.back() / trace.err_orthogonal.front())
              << "\n";
  }
  const double drift =
      *std::max_element(trace.centroid_drift.begin(), trace.centroid_drift.end());
  std::cout << "max centroid-offset drift: " << format_value(drift) << "\n";
  return kExitOk;
}

int cmd_scenarios_list() {
  for (const auto& name : builtin_scenario_names()) {
    const Scenario scenario = builtin_scenario(name);
    const char* kind = scenario.dynamics == DynamicsKind::Single ? "single" : "double";
    std::cout << name << "  (n=" << scenario.graph.vertex_count()
              << ", d=" << scenario.graph.dimension() << ", " << kind << ")\n";
  }
  return kExitOk;
}

int cmd_scenarios_export(const std::string& name) {
  std::cout << builtin_scenario_source(name);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

namespace {

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorKind::InvalidInput, "grid spec '" + spec + "' is not name=v1,v2,...");
  }
  SweepAxis axis;
  axis.name = spec.substr(0, eq);
  if (axis.name != "kp" && axis.name != "kd" && axis.name != "fraction" && axis.name != "dt" &&
      axis.name != "seed") {
    throw Error(ErrorKind::InvalidInput,
                "unknown sweep parameter '" + axis.name + "' (kp, kd, fraction, dt, seed)");
  }
  std::stringstream values(spec.substr(eq + 1));
  std::string token;
  while (std::getline(values, token, ',')) {
    if (!token.empty()) axis.values.push_back(std::stod(token));
  }
  if (axis.values.empty()) {
    throw Error(ErrorKind::InvalidInput, "grid spec '" + spec + "' has no values");
  }
  return axis;
}

struct SweepPoint {
  double kp, kd, fraction, dt;
  std::uint64_t seed;
  bool has_fraction = false;
};

struct SweepRow {
  SweepPoint point;
  bool gain_ok = true;
  std::string status = "ok";
  bool converged = false;
  double err_delta = 0.0;
  double err_v = 0.0;
  double rate = 0.0;
  double r_squared = 0.0;
};

SweepRow run_point(const Scenario& base, const SweepPoint& point) {
  SweepRow row;
  row.point = point;
  try {
    Scenario scenario = base;
    scenario.gains.kp = point.kp;
    scenario.gains.kd = point.kd;
    scenario.integrator.dt = point.dt;
    if (point.has_fraction) {
      scenario.initial.perturb = PerturbSpec{point.seed, point.fraction};
    } else if (scenario.initial.perturb) {
      scenario.initial.perturb->seed = point.seed;
    }

    if (scenario.dynamics == DynamicsKind::Double) {
      row.gain_ok = validate_gains(scenario.graph, point.kp, point.kd).ok;
    }

    const InitialState initial = resolve_initial_state(scenario);
    SimTrace trace;
    if (scenario.dynamics == DynamicsKind::Single) {
      trace = simulate_single(scenario.graph, *scenario.trajectory, initial.positions, point.kp,
                              point.dt, scenario.integrator.horizon);
    } else {
      trace = simulate_double(scenario.graph, *scenario.trajectory, initial.positions,
                              initial.velocities, scenario.gains, point.dt,
                              scenario.integrator.horizon);
    }
    if (trace.bearing_loss) {
      row.status = "bearing_loss";
      return row;
    }
    row.err_delta = trace.err_orthogonal.back();
    row.err_v = trace.err_velocity.back();
    row.converged = row.err_delta < 1e-2;
    if (const auto fit = tail_rate(trace.time, trace.err_orthogonal)) {
      row.rate = fit->rate;
      row.r_squared = fit->r_squared;
    }
  } catch (const Error& e) {
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

}  // namespace

int cmd_sweep(const std::string& scenario_ref, const std::string& out_dir,
              const std::vector<std::string>& grid_specs, int jobs) {
  const Scenario base = resolve_scenario(scenario_ref);

  // Canonical axis order keeps the output row order independent of the flag
  // order and of the thread schedule.
  SweepAxis axes[5] = {{"kp", {base.gains.kp}},
                       {"kd", {base.gains.kd}},
                       {"fraction", {}},
                       {"dt", {base.integrator.dt}},
                       {"seed", {}}};
  if (base.initial.perturb) {
    axes[2].values = {base.initial.perturb->fraction};
    axes[4].values = {static_cast<double>(base.initial.perturb->seed)};
  } else {
    axes[2].values = {-1.0};  // keep explicit initial conditions
    axes[4].values = {0.0};
  }
  bool fraction_given = false;
  for (const auto& spec : grid_specs) {
    const SweepAxis axis = parse_axis(spec);
    for (auto& slot : axes) {
      if (slot.name == axis.name) slot.values = axis.values;
    }
    if (axis.name == "fraction") fraction_given = true;
  }

  std::vector<SweepPoint> points;
  for (const double kp : axes[0].values) {
    for (const double kd : axes[1].values) {
      for (const double fraction : axes[2].values) {
        for (const double dt : axes[3].values) {
          for (const double seed : axes[4].values) {
            SweepPoint point;
            point.kp = kp;
            point.kd = kd;
            point.fraction = fraction;
            point.dt = dt;
            point.seed = static_cast<std::uint64_t>(seed);
            point.has_fraction = fraction_given || base.initial.perturb.has_value();
            points.push_back(point);
          }
        }
      }
    }
  }

  std::vector<SweepRow> rows(points.size());
  std::atomic<size_t> next{0};
  const int workers = std::max(1, jobs);
  auto worker = [&]() {
    while (true) {
      const size_t index = next.fetch_add(1);
      if (index >= points.size()) break;
      rows[index] = run_point(base, points[index]);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& thread : pool) thread.join();

  std::ostringstream csv;
  csv << "kp,kd,fraction,dt,seed,gain_ok,status,converged,terminal_err_delta,terminal_err_v,"
         "fitted_rate,fit_r2\n";
  for (const SweepRow& row : rows) {
    csv << format_value(row.point.kp) << "," << format_value(row.point.kd) << ","
        << format_value(row.point.fraction) << "," << format_value(row.point.dt) << ","
        << row.point.seed << "," << (row.gain_ok ? "true" : "false") << "," << row.status << ","
        << (row.converged ? "true" : "false") << "," << format_value(row.err_delta) << ","
        << format_value(row.err_v) << "," << format_value(row.rate) << ","
        << format_value(row.r_squared) << "\n";
  }

  const fs::path dir = run_directory(out_dir, base);
  write_file(dir / "sweep.csv", csv.str());
  std::cout << "sweep rows: " << rows.size() << "\n";
  std::cout << "sweep: " << (dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

}  // namespace bearing_forms::cli
