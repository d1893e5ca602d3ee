#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bearing_forms/errors.hpp"

namespace bearing_forms {

/// One undirected edge with its fixed orientation (tail -> head).
/// Vertices are 1-indexed in every public interface.
struct Edge {
  int tail;
  int head;
};

/// Immutable undirected formation graph with a deterministic orientation:
/// every edge {i,j} is stored with tail = min(i,j), and the edge list is
/// sorted lexicographically so the incidence-matrix row order is fixed.
/// Safe to share across threads once built.
class FormationGraph {
 public:
  /// Empty placeholder; build_graph produces every usable instance.
  FormationGraph() = default;

  int vertex_count() const noexcept { return n_; }
  int dimension() const noexcept { return d_; }
  int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Neighbors of a 1-indexed vertex, ascending.
  const std::vector<int>& neighbors(int vertex) const;

  int connected_component_count() const;
  /// Connected graphs are exactly the graphs with a spanning tree.
  bool has_spanning_tree() const { return connected_component_count() == 1; }
  bool is_acyclic() const;

  /// Incidence matrix, m x n: row k has -1 at the tail and +1 at the head.
  Eigen::MatrixXd incidence() const;
  /// Kronecker lift of the incidence matrix to dm x dn.
  Eigen::MatrixXd lifted_incidence() const;
  /// Graph Laplacian of the lifted incidence, dn x dn, symmetric PSD.
  Eigen::MatrixXd laplacian() const;

  friend FormationGraph build_graph(int vertex_count,
                                    const std::vector<std::pair<int, int>>& edges,
                                    int dimension);

 private:
  int n_ = 0;
  int d_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Validates and normalizes an edge list into a FormationGraph.
/// Throws SelfLoop, DuplicateEdge, VertexOutOfRange, EmptyEdgeSet, or
/// InvalidInput for n < 2 / d < 2.
FormationGraph build_graph(int vertex_count,
                           const std::vector<std::pair<int, int>>& edges,
                           int dimension);

/// Minimal number of edges for which a generic configuration reaches the
/// maximal bearing-Laplacian rank dn-d-1. Exact integer evaluation; the two
/// branches agree at n = d+1.
int min_rigid_edge_count(int vertex_count, int dimension);

}  // namespace bearing_forms
