#pragma once

#include <vector>

#include <Eigen/Core>

#include "bearing_forms/graph.hpp"

namespace bearing_forms {

/// Edge separations below this are treated as coincident agents: bearings are
/// refused rather than regularized, since the control laws are undefined there.
inline constexpr double kCoincidentTolerance = 1e-9;

/// Default relative tolerance for numerical rank decisions.
inline constexpr double kRankTolerance = 1e-9;

/// Stacked configuration of n agents in R^d (length d*n).
struct Configuration {
  Eigen::VectorXd stacked;
  int n = 0;
  int d = 0;

  Configuration() = default;
  Configuration(Eigen::VectorXd values, int agents, int dimension)
      : stacked(std::move(values)), n(agents), d(dimension) {}

  /// Position of a 1-indexed agent.
  Eigen::VectorXd agent(int i) const { return stacked.segment((i - 1) * d, d); }
};

/// Orthogonal projector onto the complement of a unit direction.
/// Directions within 1e-9 of unit norm are renormalized; anything further off
/// raises NotUnitVector.
Eigen::MatrixXd orthogonal_projector(const Eigen::VectorXd& direction);

/// Unit vector from one point toward another. Raises CoincidentAgents when
/// the separation is below kCoincidentTolerance.
Eigen::VectorXd bearing(const Eigen::VectorXd& from, const Eigen::VectorXd& to);

/// Per-edge bearing data and the assembled bearing Laplacian of a formation.
struct BearingState {
  std::vector<Eigen::VectorXd> bearings;  ///< unit edge bearings, tail -> head
  std::vector<double> lengths;            ///< edge separations
  Eigen::MatrixXd projectors;             ///< block-diagonal projector stack, dm x dm
  Eigen::MatrixXd laplacian;              ///< bearing Laplacian, dn x dn
};

/// Assembles bearings, the projector stack, and the bearing Laplacian for a
/// configuration. Raises CoincidentAgents (with the edge index) if any edge
/// separation is below tolerance.
BearingState bearing_laplacian(const FormationGraph& graph, const Configuration& config);

/// Numerical rank report from a singular value decomposition.
struct RankAnalysis {
  int rank = 0;
  Eigen::VectorXd singular_values;  ///< non-increasing
  Eigen::MatrixXd null_basis;       ///< orthonormal basis of the numerical null space
  /// Ratio of the smallest kept to the largest dropped singular value
  /// (infinity when nothing was dropped); large gaps mean a safe decision.
  double gap = 0.0;
};

/// Numerical rank of an arbitrary matrix at a relative tolerance
/// (threshold = tol * largest singular value).
RankAnalysis rank_analysis(const Eigen::MatrixXd& matrix, double relative_tolerance = kRankTolerance);

/// Rank of the assembled bearing Laplacian plus a null-space basis.
RankAnalysis bearing_laplacian_rank(const BearingState& state,
                                    double relative_tolerance = kRankTolerance);

}  // namespace bearing_forms
