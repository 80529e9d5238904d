#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nbhl/centrality.hpp"
#include "nbhl/rng.hpp"

using namespace nbhl;

namespace {

AdjacencyList from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  AdjacencyList adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
  return adj;
}

AdjacencyList random_graph(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (rng.next_double() < p) edges.push_back({a, b});
  return from_edges(n, edges);
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a[i] - b[i]) < tol);
}

}  // namespace

TEST_CASE("path graph: all shortest paths route through the middle") {
  auto adj = from_edges(3, {{0, 1}, {1, 2}});
  auto scores = betweenness(adj);
  CHECK(scores == std::vector<double>{0.0, 1.0, 0.0});
  CHECK(betweenness_oracle(adj) == scores);
}

TEST_CASE("star graph: center scores 1, leaves 0") {
  auto adj = from_edges(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}});
  auto scores = betweenness(adj);
  CHECK(scores[0] == doctest::Approx(1.0));
  for (int leaf = 1; leaf < 5; ++leaf) CHECK(scores[leaf] == 0.0);
}

TEST_CASE("complete graph K4: every pair is adjacent, all scores zero") {
  auto adj = from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  for (double v : betweenness(adj)) CHECK(v == 0.0);
  for (double v : betweenness_oracle(adj)) CHECK(v == 0.0);
}

TEST_CASE("cycle C5: symmetric scores, oracle agreement") {
  auto adj = from_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  auto fast = betweenness(adj);
  auto oracle = betweenness_oracle(adj);
  for (int i = 1; i < 5; ++i) CHECK(fast[i] == doctest::Approx(fast[0]));
  check_close(fast, oracle, 1e-9);
}

TEST_CASE("tiny and degenerate graphs") {
  CHECK(betweenness(AdjacencyList{}).empty());
  CHECK(betweenness(AdjacencyList{{}}) == std::vector<double>{0.0});
  CHECK(betweenness(from_edges(2, {{0, 1}})) == std::vector<double>{0.0, 0.0});
  // disconnected pairs contribute nothing
  auto adj = from_edges(4, {{0, 1}});
  for (double v : betweenness(adj)) CHECK(v == 0.0);
}

TEST_CASE("fast implementation matches the exhaustive oracle on random graphs") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.next_below(7));  // up to 8 nodes
    const double p = 0.15 + 0.7 * rng.next_double();
    auto adj = random_graph(n, p, rng);
    auto fast = betweenness(adj);
    auto oracle = betweenness_oracle(adj);
    REQUIRE(fast.size() == oracle.size());
    for (std::size_t i = 0; i < fast.size(); ++i)
      CHECK(std::fabs(fast[i] - oracle[i]) < 1e-9);
  }
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 50 + static_cast<int>(rng.next_below(150));
    auto adj = random_graph(n, 0.05 + 0.1 * rng.next_double(), rng);
    CHECK(betweenness_serial(adj) == betweenness_parallel(adj));
  }
}

TEST_CASE("oracle rejects graphs above its node cap") {
  CHECK_THROWS(betweenness_oracle(AdjacencyList(13)));
}

TEST_CASE("scores stay within [0,1] and leaves at exactly 0") {
  Rng rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    auto adj = random_graph(20, 0.15, rng);
    auto scores = betweenness(adj);
    for (std::size_t v = 0; v < scores.size(); ++v) {
      CHECK(scores[v] >= 0.0);
      CHECK(scores[v] <= 1.0);
      if (adj[v].size() <= 1) CHECK(scores[v] == 0.0);
    }
  }
}

TEST_CASE("an isolated node changes no raw score, only the normalization") {
  Rng rng(91);
  auto adj = random_graph(9, 0.4, rng);
  auto raw = betweenness_raw(adj);
  auto grown = adj;
  grown.push_back({});
  auto raw_grown = betweenness_raw(grown);
  for (std::size_t v = 0; v < adj.size(); ++v) CHECK(raw[v] == raw_grown[v]);
  CHECK(raw_grown.back() == 0.0);

  auto norm = betweenness(adj);
  auto norm_grown = betweenness(grown);
  const double n = static_cast<double>(adj.size());
  for (std::size_t v = 0; v < adj.size(); ++v)
    CHECK(norm_grown[v] ==
          doctest::Approx(norm[v] * ((n - 1) * (n - 2)) / (n * (n - 1))).epsilon(1e-12));
}

TEST_CASE("scores are permutation-equivariant") {
  Rng rng(111);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(rng.next_below(5));
    auto adj = random_graph(n, 0.5, rng);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);

    AdjacencyList relabeled(n);
    for (int v = 0; v < n; ++v)
      for (int w : adj[v]) relabeled[perm[v]].push_back(perm[w]);
    for (auto& nbrs : relabeled) std::sort(nbrs.begin(), nbrs.end());

    auto base = betweenness(adj);
    auto mapped = betweenness(relabeled);
    for (int v = 0; v < n; ++v) CHECK(mapped[perm[v]] == doctest::Approx(base[v]).epsilon(1e-12));
  }
}
