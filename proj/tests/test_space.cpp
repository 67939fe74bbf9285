#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <queue>

#include "test_support.hpp"

using namespace popmeas;
using test_support::euclid1;

namespace {

// Independent graph-distance oracle: Dijkstra over the vertex set extended
// by the two query points as extra nodes.
double dijkstra_point_distance(const Space& space, const GraphPosition& a,
                               const GraphPosition& b) {
  const int nv = space.vertex_count();
  const int na = nv, nb = nv + 1, n = nv + 2;
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  auto link = [&](int u, int v, double w) {
    adj[u].push_back({v, w});
    adj[v].push_back({u, w});
  };
  for (int e = 0; e < static_cast<int>(space.edges().size()); ++e) {
    const auto& edge = space.edges()[e];
    std::vector<std::pair<double, int>> cuts{{0.0, edge.from}, {edge.length, edge.to}};
    if (a.edge == e) cuts.push_back({a.offset, na});
    if (b.edge == e) cuts.push_back({b.offset, nb});
    std::sort(cuts.begin(), cuts.end());
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
      link(cuts[i].second, cuts[i + 1].second, cuts[i + 1].first - cuts[i].first);
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>> heap;
  dist[na] = 0.0;
  heap.push({0.0, na});
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u])
      if (d + w < dist[v]) {
        dist[v] = d + w;
        heap.push({dist[v], v});
      }
  }
  return dist[nb];
}

Space three_edge_path() {
  return Space::graph(4, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}});
}

}  // namespace

TEST_CASE("euclidean distance is the 2-norm") {
  const Space space = Space::euclidean_box(Eigen::Vector2d(-10, -10), Eigen::Vector2d(10, 10));
  CHECK(space.distance(Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)) == doctest::Approx(5.0));
  CHECK(space.distance(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)) == 0.0);
}

TEST_CASE("path graph distance crosses the middle edge") {
  const Space space = three_edge_path();
  const GraphPosition a{0, 0.5}, b{2, 0.5};
  CHECK(space.distance(a, b) == doctest::Approx(dijkstra_point_distance(space, a, b)));
  CHECK(space.distance(a, b) == doctest::Approx(2.0));
  CHECK(space.distance(a, a) == 0.0);
}

TEST_CASE("graph points are compared modulo vertex identification") {
  const Space space = three_edge_path();
  // End of edge 0 and start of edge 1 are both vertex 1.
  CHECK(space.distance(GraphPosition{0, 1.0}, GraphPosition{1, 0.0}) == 0.0);
}

TEST_CASE("graph distance agrees with the Dijkstra oracle on random pairs") {
  const Space space = Space::graph(
      5, {{0, 1, 0.7}, {1, 2, 1.3}, {2, 3, 0.4}, {3, 0, 2.0}, {1, 4, 0.9}, {4, 2, 0.6}});
  std::mt19937_64 rng(7);
  const CompactSet K = CompactSet::whole_space();
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = std::get<GraphPosition>(sample_point(space, K, rng));
    const auto b = std::get<GraphPosition>(sample_point(space, K, rng));
    CHECK(space.distance(a, b) ==
          doctest::Approx(dijkstra_point_distance(space, a, b)).epsilon(1e-12));
  }
}

TEST_CASE("metric axioms hold on random triples in every space kind") {
  std::mt19937_64 rng(11);
  std::vector<Space> spaces;
  spaces.push_back(Space::euclidean_box(Eigen::Vector3d(-1, -1, -1), Eigen::Vector3d(1, 2, 3)));
  spaces.push_back(Space::graph(4, {{0, 1, 1.0}, {1, 2, 0.5}, {2, 3, 1.5}, {3, 0, 0.8}}));
  spaces.push_back(Space::finite(test_support::random_metric(6, rng)));
  for (const auto& space : spaces) {
    const CompactSet K = CompactSet::whole_space();
    for (int trial = 0; trial < 1000; ++trial) {
      const Point x = sample_point(space, K, rng);
      const Point y = sample_point(space, K, rng);
      const Point z = sample_point(space, K, rng);
      const double dxy = space.distance(x, y);
      CHECK(dxy >= 0.0);
      CHECK(dxy == doctest::Approx(space.distance(y, x)).epsilon(1e-15));
      CHECK(dxy <= space.distance(x, z) + space.distance(z, y) + 1e-12);
    }
  }
}

TEST_CASE("space validation rejects malformed inputs") {
  CHECK_THROWS_AS(Space::euclidean_box(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(Space::graph(3, {{0, 1, 1.0}}), std::invalid_argument);  // disconnected
  CHECK_THROWS_AS(Space::graph(2, {{0, 1, 0.0}}), std::invalid_argument);  // zero length
  Eigen::MatrixXd bad(2, 2);
  bad << 0, 1, 2, 0;  // asymmetric
  CHECK_THROWS_AS(Space::finite(bad), std::invalid_argument);
  Eigen::MatrixXd tri(3, 3);
  tri << 0, 1, 5, 1, 0, 1, 5, 1, 0;  // 5 > 1 + 1
  CHECK_THROWS_AS(Space::finite(tri), std::invalid_argument);
}

TEST_CASE("invalid points are rejected") {
  const Space euclid = Space::euclidean_box(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2));
  CHECK_THROWS_AS(euclid.distance(euclid1(0.5), euclid1(0.5)), std::invalid_argument);
  const Space graph = three_edge_path();
  CHECK_THROWS_AS(graph.distance(GraphPosition{0, 2.0}, GraphPosition{0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(graph.distance(GraphPosition{5, 0.0}, GraphPosition{0, 0.0}),
                  std::invalid_argument);
  const Space finite = Space::finite(Eigen::MatrixXd::Zero(1, 1));
  CHECK_THROWS_AS(finite.distance(FiniteIndex{1}, FiniteIndex{0}), std::invalid_argument);
}
