#include "bearing_forms/bearing.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

namespace bearing_forms {

Eigen::MatrixXd orthogonal_projector(const Eigen::VectorXd& direction) {
  const double norm = direction.norm();
  if (std::abs(norm - 1.0) > 1e-9) {
    throw Error(ErrorKind::NotUnitVector,
                "direction norm " + std::to_string(norm) + " is not within 1e-9 of 1");
  }
  const Eigen::VectorXd unit = direction / norm;
  const auto d = direction.size();
  return Eigen::MatrixXd::Identity(d, d) - unit * unit.transpose();
}

Eigen::VectorXd bearing(const Eigen::VectorXd& from, const Eigen::VectorXd& to) {
  const Eigen::VectorXd relative = to - from;
  const double separation = relative.norm();
  if (separation <= kCoincidentTolerance) {
    throw CoincidentAgentsError(-1, separation,
                                "coincident agents: separation " + std::to_string(separation));
  }
  return relative / separation;
}

BearingState bearing_laplacian(const FormationGraph& graph, const Configuration& config) {
  const int d = graph.dimension();
  const int n = graph.vertex_count();
  const int m = graph.edge_count();
  if (config.n != n || config.d != d || config.stacked.size() != n * d) {
    throw Error(ErrorKind::InvalidInput, "configuration does not match the graph");
  }

  BearingState state;
  state.bearings.reserve(static_cast<size_t>(m));
  state.lengths.reserve(static_cast<size_t>(m));
  state.projectors = Eigen::MatrixXd::Zero(m * d, m * d);
  state.laplacian = Eigen::MatrixXd::Zero(n * d, n * d);

  for (int k = 0; k < m; ++k) {
    const Edge& e = graph.edges()[static_cast<size_t>(k)];
    const Eigen::VectorXd relative = config.agent(e.head) - config.agent(e.tail);
    const double separation = relative.norm();
    if (separation <= kCoincidentTolerance) {
      throw CoincidentAgentsError(
          k, separation,
          "coincident agents on edge {" + std::to_string(e.tail) + "," +
              std::to_string(e.head) + "}: separation " + std::to_string(separation));
    }
    const Eigen::VectorXd unit = relative / separation;
    const Eigen::MatrixXd projector = Eigen::MatrixXd::Identity(d, d) - unit * unit.transpose();

    state.bearings.push_back(unit);
    state.lengths.push_back(separation);
    state.projectors.block(k * d, k * d, d, d) = projector;

    const int i = (e.tail - 1) * d;
    const int j = (e.head - 1) * d;
    state.laplacian.block(i, i, d, d) += projector;
    state.laplacian.block(j, j, d, d) += projector;
    state.laplacian.block(i, j, d, d) -= projector;
    state.laplacian.block(j, i, d, d) -= projector;
  }
  return state;
}

RankAnalysis rank_analysis(const Eigen::MatrixXd& matrix, double relative_tolerance) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeFullV);
  RankAnalysis result;
  result.singular_values = svd.singularValues();
  const double largest = result.singular_values.size() > 0 ? result.singular_values(0) : 0.0;
  const double threshold = relative_tolerance * largest;

  int rank = 0;
  for (Eigen::Index i = 0; i < result.singular_values.size(); ++i) {
    if (result.singular_values(i) > threshold) ++rank;
  }
  result.rank = rank;

  const Eigen::Index cols = matrix.cols();
  result.null_basis = svd.matrixV().rightCols(cols - rank);
  if (rank == 0) {
    result.gap = 0.0;
  } else if (rank == cols || result.singular_values(rank) == 0.0) {
    result.gap = std::numeric_limits<double>::infinity();
  } else {
    result.gap = result.singular_values(rank - 1) / result.singular_values(rank);
  }
  return result;
}

RankAnalysis bearing_laplacian_rank(const BearingState& state, double relative_tolerance) {
  return rank_analysis(state.laplacian, relative_tolerance);
}

}  // namespace bearing_forms
