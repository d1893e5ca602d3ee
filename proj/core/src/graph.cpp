#include "bearing_forms/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

namespace bearing_forms {

FormationGraph build_graph(int vertex_count,
                           const std::vector<std::pair<int, int>>& edges,
                           int dimension) {
  if (vertex_count < 2) {
    throw Error(ErrorKind::InvalidInput,
                "vertex count must be at least 2, got " + std::to_string(vertex_count));
  }
  if (dimension < 2) {
    throw Error(ErrorKind::InvalidInput,
                "ambient dimension must be at least 2, got " + std::to_string(dimension));
  }
  if (edges.empty()) {
    throw Error(ErrorKind::EmptyEdgeSet, "edge set is empty");
  }

  FormationGraph g;
  g.n_ = vertex_count;
  g.d_ = dimension;

  std::set<std::pair<int, int>> seen;
  g.edges_.reserve(edges.size());
  for (const auto& [a, b] : edges) {
    if (a < 1 || a > vertex_count || b < 1 || b > vertex_count) {
      throw Error(ErrorKind::VertexOutOfRange,
                  "edge {" + std::to_string(a) + "," + std::to_string(b) +
                      "} references a vertex outside 1.." + std::to_string(vertex_count));
    }
    if (a == b) {
      throw Error(ErrorKind::SelfLoop, "self-loop at vertex " + std::to_string(a));
    }
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::DuplicateEdge,
                  "duplicate edge {" + std::to_string(key.first) + "," +
                      std::to_string(key.second) + "}");
    }
    g.edges_.push_back({key.first, key.second});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& x, const Edge& y) {
    return std::pair{x.tail, x.head} < std::pair{y.tail, y.head};
  });

  g.adjacency_.assign(static_cast<size_t>(vertex_count), {});
  for (const Edge& e : g.edges_) {
    g.adjacency_[static_cast<size_t>(e.tail - 1)].push_back(e.head);
    g.adjacency_[static_cast<size_t>(e.head - 1)].push_back(e.tail);
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

const std::vector<int>& FormationGraph::neighbors(int vertex) const {
  if (vertex < 1 || vertex > n_) {
    throw Error(ErrorKind::VertexOutOfRange,
                "vertex " + std::to_string(vertex) + " outside 1.." + std::to_string(n_));
  }
  return adjacency_[static_cast<size_t>(vertex - 1)];
}

int FormationGraph::connected_component_count() const {
  std::vector<char> visited(static_cast<size_t>(n_), 0);
  int components = 0;
  for (int start = 1; start <= n_; ++start) {
    if (visited[static_cast<size_t>(start - 1)]) continue;
    ++components;
    std::queue<int> frontier;
    frontier.push(start);
    visited[static_cast<size_t>(start - 1)] = 1;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int w : adjacency_[static_cast<size_t>(v - 1)]) {
        if (!visited[static_cast<size_t>(w - 1)]) {
          visited[static_cast<size_t>(w - 1)] = 1;
          frontier.push(w);
        }
      }
    }
  }
  return components;
}

bool FormationGraph::is_acyclic() const {
  // A graph is a forest iff m = n - (number of components).
  return edge_count() == n_ - connected_component_count();
}

Eigen::MatrixXd FormationGraph::incidence() const {
  const int m = edge_count();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, n_);
  for (int k = 0; k < m; ++k) {
    h(k, edges_[static_cast<size_t>(k)].tail - 1) = -1.0;
    h(k, edges_[static_cast<size_t>(k)].head - 1) = 1.0;
  }
  return h;
}

Eigen::MatrixXd FormationGraph::lifted_incidence() const {
  const int m = edge_count();
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(m * d_, n_ * d_);
  for (int k = 0; k < m; ++k) {
    const int tail = edges_[static_cast<size_t>(k)].tail - 1;
    const int head = edges_[static_cast<size_t>(k)].head - 1;
    for (int c = 0; c < d_; ++c) {
      lifted(k * d_ + c, tail * d_ + c) = -1.0;
      lifted(k * d_ + c, head * d_ + c) = 1.0;
    }
  }
  return lifted;
}

Eigen::MatrixXd FormationGraph::laplacian() const {
  const Eigen::MatrixXd lifted = lifted_incidence();
  return lifted.transpose() * lifted;
}

int min_rigid_edge_count(int vertex_count, int dimension) {
  if (vertex_count < 2 || dimension < 2) {
    throw Error(ErrorKind::InvalidInput, "min_rigid_edge_count requires n >= 2 and d >= 2");
  }
  const int n = vertex_count;
  const int d = dimension;
  if (n <= d + 1) return n;
  const int quotient = (n - 2) / (d - 1);
  const int remainder = (n - 2) % (d - 1);
  return 1 + quotient * d + remainder + (remainder > 0 ? 1 : 0);
}

}  // namespace bearing_forms
