#include "bearing_forms/pe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Eigenvalues>

namespace bearing_forms {

namespace {

struct ScanGrid {
  double step = 0.0;        // quadrature step and window-start stride
  int nodes_per_window = 0; // even Simpson interval count
  int window_count = 0;     // number of scanned starts
  bool snapped = false;
};

ScanGrid make_grid(const PEOptions& options, std::optional<double> period) {
  if (options.window <= 0.0) {
    throw Error(ErrorKind::InvalidWindow, "window must be positive");
  }
  double step = options.step > 0.0 ? options.step : options.window / 200.0;
  if (step > options.window / 10.0) {
    throw Error(ErrorKind::InvalidWindow,
                "quadrature step " + std::to_string(step) + " exceeds window/10");
  }
  ScanGrid grid;
  int intervals = static_cast<int>(std::ceil(options.window / step - 1e-12));
  if (intervals % 2 != 0) ++intervals;
  grid.nodes_per_window = intervals;
  grid.step = options.window / intervals;

  // Window starts at k * step; periodic scans cover starts in [0, period),
  // aperiodic ones cover [0, horizon - window].
  double start_span = 0.0;
  if (options.horizon <= 0.0 && period && *period > 0.0) {
    grid.snapped = true;
    start_span = *period;
  } else {
    const double scan = options.horizon > 0.0 ? options.horizon : 3.0 * options.window;
    if (scan < options.window) {
      throw Error(ErrorKind::InvalidWindow, "scan horizon is shorter than the window");
    }
    start_span = scan - options.window;
  }
  grid.window_count = std::max(1, static_cast<int>(std::floor(start_span / grid.step + 1e-9)));
  if (!grid.snapped) grid.window_count += 1;  // include the start at 0
  return grid;
}

// Shared scan: sample M(t) once on the global grid (window starts and Simpson
// nodes coincide because the stride equals the quadrature step), then reduce
// each window average with the supplied eigenvalue functional.
PECertificate scan_certificate(const std::function<Eigen::MatrixXd(double)>& sample,
                               const std::function<double(const Eigen::MatrixXd&)>& min_eigen,
                               const PEOptions& options, std::optional<double> period) {
  const ScanGrid grid = make_grid(options, period);
  const int total_nodes = grid.window_count - 1 + grid.nodes_per_window + 1;

  std::vector<Eigen::MatrixXd> samples;
  samples.reserve(static_cast<size_t>(total_nodes));
  for (int k = 0; k < total_nodes; ++k) {
    samples.push_back(sample(k * grid.step));
  }

  PECertificate cert;
  cert.window = options.window;
  cert.mu_min = options.mu_min;
  cert.step = grid.step;
  cert.snapped_to_period = grid.snapped;
  cert.scan_horizon = (grid.window_count - 1) * grid.step + options.window;
  cert.windows.reserve(static_cast<size_t>(grid.window_count));

  double worst = std::numeric_limits<double>::infinity();
  for (int w = 0; w < grid.window_count; ++w) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(samples[0].rows(), samples[0].cols());
    for (int k = 0; k <= grid.nodes_per_window; ++k) {
      const double weight = (k == 0 || k == grid.nodes_per_window) ? 1.0
                            : (k % 2 == 1)                         ? 4.0
                                                                   : 2.0;
      acc += weight * samples[static_cast<size_t>(w + k)];
    }
    acc *= grid.step / 3.0 / options.window;
    const double value = min_eigen(acc);
    cert.windows.push_back({w * grid.step, value});
    worst = std::min(worst, value);
  }
  cert.mu = std::max(0.0, worst);
  cert.pe = cert.mu >= options.mu_min;
  return cert;
}

Eigen::VectorXd checked_unit(const Eigen::VectorXd& y) {
  const double norm = y.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw Error(ErrorKind::NotUnitVector,
                "direction norm " + std::to_string(norm) + " is not within 1e-9 of 1");
  }
  return y / norm;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

Eigen::MatrixXd window_average(const std::function<Eigen::MatrixXd(double)>& matrix,
                               double start, double window, double step) {
  if (window <= 0.0) {
    throw Error(ErrorKind::InvalidWindow, "window must be positive");
  }
  if (step <= 0.0 || step > window / 10.0) {
    throw Error(ErrorKind::InvalidWindow,
                "quadrature step must lie in (0, window/10], got " + std::to_string(step));
  }
  int intervals = static_cast<int>(std::ceil(window / step - 1e-12));
  if (intervals % 2 != 0) ++intervals;
  const double h = window / intervals;

  Eigen::MatrixXd acc = matrix(start);
  for (int k = 1; k < intervals; ++k) {
    acc += ((k % 2 == 1) ? 4.0 : 2.0) * matrix(start + k * h);
  }
  acc += matrix(start + window);
  return acc * (h / 3.0 / window);
}

PECertificate certify_direction_pe(const DirectionFunction& direction, int dimension,
                                   const PEOptions& options, std::optional<double> period) {
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dimension, dimension);
  auto sample = [&](double t) -> Eigen::MatrixXd {
    const Eigen::VectorXd y = checked_unit(direction(t));
    return identity - y * y.transpose();
  };
  PECertificate cert = scan_certificate(sample, min_eigenvalue, options, period);
  cert.mu = std::min(1.0, cert.mu);
  return cert;
}

ProjectorSumCertificate certify_projector_sum_pe(const std::vector<DirectionFunction>& directions,
                                                 int dimension, const PEOptions& options,
                                                 std::optional<double> period) {
  if (directions.empty()) {
    throw Error(ErrorKind::EmptyDirectionSet, "projector sum needs at least one direction");
  }
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(dimension, dimension);
  auto sample = [&](double t) -> Eigen::MatrixXd {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(dimension, dimension);
    for (const auto& dir : directions) {
      const Eigen::VectorXd y = checked_unit(dir(t));
      sum += identity - y * y.transpose();
    }
    return sum;
  };

  ProjectorSumCertificate result;
  result.certificate = scan_certificate(sample, min_eigenvalue, options, period);

  // Which sufficient condition held: a PE member first, then a uniformly
  // non-collinear pair with its measured margin.
  for (size_t i = 0; i < directions.size(); ++i) {
    const PECertificate member = certify_direction_pe(directions[i], dimension, options, period);
    if (member.pe) {
      result.condition = 1;
      result.pe_direction = static_cast<int>(i);
      return result;
    }
  }
  double best_margin = 0.0;
  const double probe_step = result.certificate.step;
  const int probe_count =
      static_cast<int>(std::round(result.certificate.scan_horizon / probe_step));
  for (size_t i = 0; i + 1 < directions.size(); ++i) {
    for (size_t j = i + 1; j < directions.size(); ++j) {
      double max_alignment = 0.0;
      for (int k = 0; k <= probe_count; ++k) {
        const double t = k * probe_step;
        const Eigen::VectorXd yi = checked_unit(directions[i](t));
        const Eigen::VectorXd yj = checked_unit(directions[j](t));
        max_alignment = std::max(max_alignment, std::abs(yi.dot(yj)));
      }
      const double margin = 1.0 - max_alignment;
      if (margin > best_margin) {
        best_margin = margin;
        result.pair_first = static_cast<int>(i);
        result.pair_second = static_cast<int>(j);
      }
    }
  }
  if (best_margin > 1e-9) {
    result.condition = 2;
    result.pair_margin = best_margin;
  }
  return result;
}

PECertificate certify_bearing_laplacian_pe(const FormationGraph& graph,
                                           const Trajectory& trajectory,
                                           const PEOptions& options) {
  if (!graph.has_spanning_tree()) {
    throw Error(ErrorKind::DisconnectedGraph, "bearing Laplacian certificate needs a connected graph");
  }
  if (trajectory.agent_count() != graph.vertex_count() ||
      trajectory.dimension() != graph.dimension()) {
    throw Error(ErrorKind::InvalidInput, "trajectory does not match the graph");
  }

  const Eigen::MatrixXd laplacian = graph.laplacian();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(laplacian);
  const double largest = eig.eigenvalues().maxCoeff();
  const double threshold = kRankTolerance * largest;

  // Orthonormal basis of range(L); the pencil restricted to it is
  // symmetric-definite, which keeps the generalized solve well posed.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    if (eig.eigenvalues()(i) > threshold) keep.push_back(i);
  }
  Eigen::MatrixXd basis(laplacian.rows(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(keep[c]);
  }
  const Eigen::MatrixXd reduced_laplacian = basis.transpose() * laplacian * basis;

  auto sample = [&](double t) -> Eigen::MatrixXd {
    return bearing_laplacian(graph, trajectory.positions(t)).laplacian;
  };
  auto min_generalized = [&](const Eigen::MatrixXd& average) -> double {
    const Eigen::MatrixXd reduced = basis.transpose() * average * basis;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        reduced, reduced_laplacian, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    return solver.eigenvalues().minCoeff();
  };
  return scan_certificate(sample, min_generalized, options, trajectory.period());
}

BpeVerdict is_bpe(const FormationGraph& graph, const Trajectory& trajectory,
                  const PEOptions& options) {
  BpeVerdict verdict;
  verdict.spanning_tree = graph.has_spanning_tree();
  if (!verdict.spanning_tree) return verdict;
  verdict.certificate = certify_bearing_laplacian_pe(graph, trajectory, options);
  verdict.bpe = verdict.certificate->pe;
  return verdict;
}

AcyclicBpeReport acyclic_bpe_check(const FormationGraph& graph, const Trajectory& trajectory,
                                   const PEOptions& options) {
  if (!graph.has_spanning_tree()) {
    throw Error(ErrorKind::DisconnectedGraph, "acyclic check needs a connected graph");
  }
  if (!graph.is_acyclic()) {
    throw Error(ErrorKind::NotAcyclic, "graph has a cycle");
  }
  AcyclicBpeReport report;
  report.bpe = true;
  for (const Edge& edge : graph.edges()) {
    auto direction = [&trajectory, edge](double t) {
      return desired_bearing(trajectory, edge, t);
    };
    report.edge_certificates.push_back(
        certify_direction_pe(direction, graph.dimension(), options, trajectory.period()));
    report.bpe = report.bpe && report.edge_certificates.back().pe;
  }
  return report;
}

int min_pe_bearing_lower_bound(int edge_count, int vertex_count, int dimension) {
  if (edge_count < vertex_count - 1) {
    throw Error(ErrorKind::TooFewEdges,
                "spanning trees need at least n-1 edges, got " + std::to_string(edge_count));
  }
  const int full = min_rigid_edge_count(vertex_count, dimension);
  if (edge_count >= full) return 1;
  const int deficit = full - edge_count;
  return (dimension - 1) * deficit - (dimension - 1) * full +
         dimension * vertex_count - dimension;
}

VertexAdditionResult vertex_addition(const FormationGraph& base, const Trajectory& trajectory,
                                     const std::function<Eigen::VectorXd(double)>& new_position,
                                     const std::vector<int>& new_neighbors,
                                     const PEOptions& options) {
  if (new_neighbors.empty()) {
    throw Error(ErrorKind::InvalidNewEdges, "the new agent needs at least one edge");
  }
  for (int neighbor : new_neighbors) {
    if (neighbor < 1 || neighbor > base.vertex_count()) {
      throw Error(ErrorKind::InvalidNewEdges,
                  "new edge endpoint " + std::to_string(neighbor) + " is not a base vertex");
    }
  }

  VertexAdditionResult result;
  result.base_verdict = is_bpe(base, trajectory, options);
  if (!result.base_verdict.bpe) {
    throw Error(ErrorKind::BaseNotBpe, "base formation did not certify as BPE");
  }

  const int new_vertex = base.vertex_count() + 1;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(base.edges().size() + new_neighbors.size());
  for (const Edge& e : base.edges()) edges.emplace_back(e.tail, e.head);
  for (int neighbor : new_neighbors) edges.emplace_back(neighbor, new_vertex);

  result.extended = build_graph(new_vertex, edges, base.dimension());
  result.new_vertex = new_vertex;

  std::vector<DirectionFunction> new_bearings;
  new_bearings.reserve(new_neighbors.size());
  for (int neighbor : new_neighbors) {
    new_bearings.push_back([&trajectory, &new_position, neighbor](double t) {
      return bearing(trajectory.positions(t).agent(neighbor), new_position(t));
    });
  }
  result.new_edges_certificate = certify_projector_sum_pe(new_bearings, base.dimension(),
                                                          options, trajectory.period());
  result.certified = result.new_edges_certificate.certificate.pe;
  return result;
}

RankBasedReport rank_based_bpe_check(const FormationGraph& graph, const Trajectory& trajectory,
                                     const PEOptions& options) {
  const int expected = graph.dimension() * graph.vertex_count() - graph.dimension() - 1;
  const double step = options.step > 0.0 ? options.step : options.window / 200.0;
  const double span = options.horizon > 0.0
                          ? options.horizon
                          : (trajectory.period() ? *trajectory.period() : 3.0 * options.window);
  const int samples = std::max(2, static_cast<int>(std::round(span / step)));
  for (int k = 0; k <= samples; ++k) {
    const double t = k * (span / samples);
    const BearingState state = bearing_laplacian(graph, trajectory.positions(t));
    const RankAnalysis rank = bearing_laplacian_rank(state);
    if (rank.rank != expected) {
      throw RankHypothesisError(t, rank.rank, expected,
                                "bearing Laplacian rank " + std::to_string(rank.rank) +
                                    " != " + std::to_string(expected) + " at t=" +
                                    std::to_string(t));
    }
  }

  RankBasedReport report;
  report.rank_hypothesis = true;
  report.expected_rank = expected;
  for (const Edge& edge : graph.edges()) {
    auto direction = [&trajectory, edge](double t) {
      return desired_bearing(trajectory, edge, t);
    };
    const PECertificate cert =
        certify_direction_pe(direction, graph.dimension(), options, trajectory.period());
    report.edge_mu.push_back(cert.mu);
    report.any_edge_pe = report.any_edge_pe || cert.pe;
  }
  report.bpe = report.any_edge_pe;
  report.direct = is_bpe(graph, trajectory, options);
  return report;
}

}  // namespace bearing_forms
