#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include <Eigen/Eigenvalues>

#include <bearing_forms/bearing.hpp>
#include <bearing_forms/graph.hpp>

using namespace bearing_forms;

namespace {

FormationGraph path(int n, int d) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  return build_graph(n, edges, d);
}

// Independent component count for the randomized rank property.
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) { parent[find(a)] = find(b); }
  int components() {
    std::set<int> roots;
    for (size_t i = 0; i < parent.size(); ++i) roots.insert(find(static_cast<int>(i)));
    return static_cast<int>(roots.size());
  }
};

}  // namespace

TEST_CASE("build_graph normalizes orientation and order") {
  const FormationGraph g = build_graph(2, {{2, 1}}, 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.edges()[0].tail == 1);
  CHECK(g.edges()[0].head == 2);

  const FormationGraph p4 = build_graph(4, {{3, 4}, {1, 2}, {2, 3}}, 2);
  CHECK(p4.edge_count() == 3);
  CHECK(p4.edges()[0].tail == 1);
  CHECK(p4.edges()[2].head == 4);
  CHECK(p4.is_acyclic());
}

TEST_CASE("build_graph validation") {
  CHECK_THROWS_WITH_AS(build_graph(4, {{1, 2}, {1, 2}}, 2), doctest::Contains("duplicate"),
                       Error);
  CHECK_THROWS_AS(build_graph(4, {{2, 2}}, 2), Error);
  CHECK_THROWS_AS(build_graph(4, {{1, 5}}, 2), Error);
  CHECK_THROWS_AS(build_graph(4, {}, 2), Error);
  CHECK_THROWS_AS(build_graph(1, {{1, 1}}, 2), Error);

  try {
    build_graph(4, {{0, 1}}, 2);
    FAIL("expected VertexOutOfRange");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::VertexOutOfRange);
  }
}

TEST_CASE("incidence matrix basics") {
  const FormationGraph k2 = build_graph(2, {{1, 2}}, 2);
  const Eigen::MatrixXd h = k2.incidence();
  CHECK(h.rows() == 1);
  CHECK(h(0, 0) == -1.0);
  CHECK(h(0, 1) == 1.0);

  const FormationGraph p4 = path(4, 2);
  CHECK(rank_analysis(p4.incidence()).rank == 3);

  const FormationGraph split = build_graph(4, {{1, 2}, {3, 4}}, 2);
  CHECK(rank_analysis(split.incidence()).rank == 2);
  CHECK_FALSE(split.has_spanning_tree());
}

TEST_CASE("laplacian null space and spectrum") {
  const FormationGraph p4 = path(4, 2);
  const Eigen::MatrixXd lap = p4.laplacian();

  Eigen::MatrixXd ones_lift = Eigen::MatrixXd::Zero(8, 2);
  for (int i = 0; i < 4; ++i) ones_lift.block(i * 2, 0, 2, 2).setIdentity();
  CHECK((lap * ones_lift).norm() == doctest::Approx(0.0).epsilon(1e-14));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap, Eigen::EigenvaluesOnly);
  // Path-graph spectrum lifted d-fold: smallest positive eigenvalue 2 - sqrt(2).
  CHECK(eig.eigenvalues()(2) == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
  CHECK(eig.eigenvalues()(1) == doctest::Approx(0.0).epsilon(1e-12));

  const FormationGraph k2 = build_graph(2, {{1, 2}}, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> k2_eig(k2.laplacian(), Eigen::EigenvaluesOnly);
  for (int i = 3; i < 6; ++i) CHECK(k2_eig.eigenvalues()(i) == doctest::Approx(2.0));
}

TEST_CASE("connectivity and acyclicity predicates") {
  CHECK(path(4, 2).has_spanning_tree());
  CHECK(path(4, 2).is_acyclic());

  const FormationGraph cycle = build_graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}}, 2);
  CHECK(cycle.has_spanning_tree());
  CHECK_FALSE(cycle.is_acyclic());

  const FormationGraph split = build_graph(4, {{1, 2}, {3, 4}}, 2);
  CHECK_FALSE(split.has_spanning_tree());
  CHECK(split.is_acyclic());
}

TEST_CASE("min_rigid_edge_count examples") {
  CHECK(min_rigid_edge_count(4, 3) == 4);
  CHECK(min_rigid_edge_count(4, 2) == 5);
  CHECK(min_rigid_edge_count(8, 3) == 10);
}

TEST_CASE("min_rigid_edge_count planar closed form") {
  for (int n = 4; n <= 20; ++n) CHECK(min_rigid_edge_count(n, 2) == 2 * n - 3);
}

TEST_CASE("min_rigid_edge_count branch agreement at n = d+1") {
  for (int d = 2; d <= 6; ++d) {
    const int n = d + 1;
    const int quotient = (n - 2) / (d - 1);
    const int remainder = (n - 2) % (d - 1);
    const int high_branch = 1 + quotient * d + remainder + (remainder > 0 ? 1 : 0);
    CHECK(min_rigid_edge_count(n, d) == n);
    CHECK(high_branch == n);
  }
}

TEST_CASE("incidence rows sum to zero and rank matches components") {
  std::mt19937 rng(20240811);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 10);  // up to 12
    std::vector<std::pair<int, int>> candidates;
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) candidates.emplace_back(i, j);
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    const size_t m = 1 + rng() % candidates.size();
    candidates.resize(m);

    const FormationGraph g = build_graph(n, candidates, 2);
    const Eigen::MatrixXd h = g.incidence();
    CHECK((h * Eigen::VectorXd::Ones(n)).norm() == 0.0);

    UnionFind uf(n);
    for (const auto& [a, b] : candidates) uf.unite(a - 1, b - 1);
    CHECK(rank_analysis(h).rank == n - uf.components());
    CHECK(g.connected_component_count() == uf.components());
  }
}
