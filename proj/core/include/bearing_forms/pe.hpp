#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bearing_forms/graph.hpp"
#include "bearing_forms/trajectory.hpp"

namespace bearing_forms {

/// Scan parameters shared by all persistence-of-excitation certificates.
struct PEOptions {
  double window = 1.0;   ///< averaging window T (seconds)
  double mu_min = 1e-3;  ///< excitation threshold for the verdict
  /// Quadrature step and window-start stride; 0 selects window / 200.
  double step = 0.0;
  /// Scan horizon for window starts; 0 selects 3 * window, or one full
  /// period when the trajectory declares one.
  double horizon = 0.0;
};

/// One scanned window start and the minimum (generalized) eigenvalue of the
/// window average there.
struct PEWindow {
  double start = 0.0;
  double min_eigenvalue = 0.0;
};

/// Result of numerically certifying a PE condition over a finite horizon.
/// Certificates are horizon-certified: they assert the scanned windows only,
/// never "for all t".
struct PECertificate {
  double window = 0.0;        ///< T
  double mu = 0.0;            ///< worst per-window minimum, clamped at 0
  double mu_min = 0.0;        ///< threshold the verdict used
  double step = 0.0;          ///< quadrature step actually used
  double scan_horizon = 0.0;  ///< start of last window + T
  bool snapped_to_period = false;
  bool pe = false;  ///< mu >= mu_min
  std::vector<PEWindow> windows;
};

/// Composite-Simpson average of a matrix-valued function over [start, start+window],
/// divided by the window length. Requires window > 0 and step <= window / 10.
Eigen::MatrixXd window_average(const std::function<Eigen::MatrixXd(double)>& matrix,
                               double start, double window, double step);

using DirectionFunction = std::function<Eigen::VectorXd(double)>;

/// Certifies a time-indexed unit direction: the achieved mu is the worst
/// minimum eigenvalue of the window-averaged orthogonal projector.
PECertificate certify_direction_pe(const DirectionFunction& direction, int dimension,
                                   const PEOptions& options,
                                   std::optional<double> period = std::nullopt);

/// Certificate for a sum of direction projectors, with the sufficient
/// condition that established it: 1 = a PE member direction, 2 = a uniformly
/// non-collinear pair, 0 = neither held (verdict from the sum alone).
struct ProjectorSumCertificate {
  PECertificate certificate;
  int condition = 0;
  int pe_direction = -1;  ///< index of a PE member when condition 1 held
  int pair_first = -1;    ///< indices of the non-collinear pair (condition 2)
  int pair_second = -1;
  double pair_margin = 0.0;  ///< measured epsilon: 1 - max_t |y_i . y_j|
};

ProjectorSumCertificate certify_projector_sum_pe(const std::vector<DirectionFunction>& directions,
                                                 int dimension, const PEOptions& options,
                                                 std::optional<double> period = std::nullopt);

/// Certifies the bearing Laplacian of the desired motion against the graph
/// Laplacian: the achieved mu is the worst minimum generalized eigenvalue of
/// (window average of the bearing Laplacian, graph Laplacian) restricted to
/// the range of the graph Laplacian. Requires a connected graph.
PECertificate certify_bearing_laplacian_pe(const FormationGraph& graph,
                                           const Trajectory& trajectory,
                                           const PEOptions& options);

/// Spanning tree plus a PE bearing Laplacian.
struct BpeVerdict {
  bool spanning_tree = false;
  bool bpe = false;
  std::optional<PECertificate> certificate;  ///< absent for disconnected graphs
};

BpeVerdict is_bpe(const FormationGraph& graph, const Trajectory& trajectory,
                  const PEOptions& options);

/// Per-edge report for acyclic graphs, where the formation is PE exactly when
/// every desired bearing is.
struct AcyclicBpeReport {
  std::vector<PECertificate> edge_certificates;  ///< aligned with graph.edges()
  bool bpe = false;
};

/// Requires an acyclic connected graph (NotAcyclic / DisconnectedGraph).
AcyclicBpeReport acyclic_bpe_check(const FormationGraph& graph, const Trajectory& trajectory,
                                   const PEOptions& options);

/// Lower bound on how many bearings must be PE for the formation to be PE,
/// given the edge count. Returns 1 when edge_count >= min_rigid_edge_count;
/// below that, the deficit j = min_rigid_edge_count - edge_count tightens the
/// bound to (d-1)j - (d-1)f + dn - d. Raises TooFewEdges when edge_count < n-1.
int min_pe_bearing_lower_bound(int edge_count, int vertex_count, int dimension);

/// Extension of a certified formation by one agent.
struct VertexAdditionResult {
  FormationGraph extended;  ///< base graph plus the new vertex and edges
  int new_vertex = 0;
  bool certified = false;  ///< new-edge projector sum is PE
  BpeVerdict base_verdict;
  ProjectorSumCertificate new_edges_certificate;
};

/// Adds agent n+1 with the given position callable and edges to
/// new_neighbors. The base formation must certify as BPE (BaseNotBpe
/// otherwise); the extension is declared BPE when the sum of the new edges'
/// bearing projectors is PE, without re-certifying the whole Laplacian.
VertexAdditionResult vertex_addition(const FormationGraph& base, const Trajectory& trajectory,
                                     const std::function<Eigen::VectorXd(double)>& new_position,
                                     const std::vector<int>& new_neighbors,
                                     const PEOptions& options);

/// BPE decision through the maximal-rank hypothesis: when the bearing
/// Laplacian has rank dn-d-1 at every sampled time, the formation is PE
/// exactly when at least one desired bearing is. The direct certificate is
/// reported side by side.
struct RankBasedReport {
  bool rank_hypothesis = false;
  int expected_rank = 0;
  std::vector<double> edge_mu;  ///< per-edge achieved mu, aligned with edges()
  bool any_edge_pe = false;
  bool bpe = false;     ///< verdict through the per-edge path
  BpeVerdict direct;    ///< is_bpe on the same inputs
};

/// Raises RankHypothesisFails (with the first violating sample time) when the
/// rank assumption does not hold.
RankBasedReport rank_based_bpe_check(const FormationGraph& graph, const Trajectory& trajectory,
                                     const PEOptions& options);

}  // namespace bearing_forms
