#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "nbhl/graph.hpp"
#include "nbhl/classifier.hpp"
#include "nbhl/model_io.hpp"
#include "nbhl/rng.hpp"
#include "support/oracles.hpp"

using namespace nbhl;
using nbhl::testing::model_edges;
using nbhl::testing::network_rule_oracle;

namespace {

Dataset random_labeled(std::size_t n, std::size_t dim, std::size_t classes, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> f;
    for (std::size_t d = 0; d < dim; ++d) f.push_back(rng.next_double() * 4.0);
    ds.add({std::move(f), std::to_string(i % classes)});
  }
  return ds;
}

}  // namespace

TEST_CASE("pairwise_distance: 3-4-5 and identity") {
  CHECK(pairwise_distance({{0.0, 0.0}, {}}, {{3.0, 4.0}, {}}) == doctest::Approx(5.0));
  Instance x{{1.5, -2.0, 0.25}, {}};
  CHECK(pairwise_distance(x, x) == 0.0);
  CHECK_THROWS_AS(pairwise_distance({{1.0}, {}}, {{1.0, 2.0}, {}}), std::invalid_argument);
}

TEST_CASE("pairwise_distance: symmetric, triangle inequality over all triples") {
  Rng rng(42);
  std::vector<Instance> points;
  for (int i = 0; i < 20; ++i)
    points.push_back({{rng.next_double() * 10, rng.next_double() * 10, rng.next_double()}, {}});
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = 0; b < points.size(); ++b) {
      CHECK(pairwise_distance(points[a], points[b]) ==
            doctest::Approx(pairwise_distance(points[b], points[a])));
      for (std::size_t c = 0; c < points.size(); ++c)
        CHECK(pairwise_distance(points[a], points[c]) <=
              pairwise_distance(points[a], points[b]) +
                  pairwise_distance(points[b], points[c]) + 1e-12);
    }
}

TEST_CASE("quantile: linear interpolation on a sorted sample") {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 4.0);
  CHECK(quantile_sorted(v, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_sorted({7.5}, 0.3) == 7.5);
  CHECK(quantile_sorted({}, 0.5) == 0.0);
}

TEST_CASE("build_network: two instances per class become single edges at k=1") {
  Dataset ds;
  ds.add({{0.0, 0.0}, "a"});
  ds.add({{5.0, 5.0}, "b"});
  ds.add({{1.0, 0.0}, "a"});
  ds.add({{6.0, 5.0}, "b"});
  TrainedModel model = build_network(ds, HyperParams{1, 0.0, 1, 1.0});
  REQUIRE(model.components.size() == 2);
  for (const auto& comp : model.components) {
    CHECK(comp.node_ids.size() == 2);
    CHECK(comp.edge_count() == 1);
  }
}

TEST_CASE("build_network: no inter-class edges, components partition the nodes") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Dataset ds = random_labeled(40, 3, 3, seed);
    TrainedModel model = build_network(ds, HyperParams{3, 0.5, 1, 1.0});
    std::size_t covered = 0;
    for (std::size_t ci = 0; ci < model.components.size(); ++ci) {
      const auto& comp = model.components[ci];
      covered += comp.node_ids.size();
      for (int id : comp.node_ids) CHECK(model.node_class[id] == static_cast<int>(ci));
      for (std::size_t l = 0; l < comp.adjacency.size(); ++l)
        for (int nb : comp.adjacency[l]) {
          CHECK(model.node_class[comp.node_ids[l]] == model.node_class[comp.node_ids[nb]]);
          CHECK(nb != static_cast<int>(l));  // no self-loops
        }
    }
    CHECK(covered == ds.size());
  }
}

TEST_CASE("build_network: edge set equals the literal neighborhood-rule oracle") {
  // 12 points, 2 classes, k=2, e=0.5: the radius branch triggers for some
  // nodes and not others.
  Dataset ds = nbhl::testing::fixture_two_clusters();
  HyperParams params{2, 0.5, 1, 1.0};
  TrainedModel model = build_network(ds, params);
  CHECK(model_edges(model) == network_rule_oracle(ds, params));

  // random datasets across parameter choices, up to 50 instances
  for (std::uint64_t seed = 10; seed < 18; ++seed) {
    Dataset rnd = random_labeled(20 + seed % 31, 2, 2 + seed % 3, seed);
    for (const auto& p : {HyperParams{1, 0.0, 1, 1.0}, HyperParams{2, 0.5, 1, 1.0},
                          HyperParams{3, 0.9, 1, 1.0}, HyperParams{4, 0.25, 1, 1.0}}) {
      TrainedModel m = build_network(rnd, p);
      CHECK(model_edges(m) == network_rule_oracle(rnd, p));
    }
  }
}

TEST_CASE("build_network: deterministic and validating") {
  Dataset ds = random_labeled(30, 2, 2, 4);
  TrainedModel a = build_network(ds, HyperParams{3, 0.5, 2, 1.0});
  TrainedModel b = build_network(ds, HyperParams{3, 0.5, 2, 1.0});
  CHECK(structural_hash(a) == structural_hash(b));

  Dataset one_class;
  one_class.add({{0.0}, "only"});
  one_class.add({{1.0}, "only"});
  CHECK_THROWS(build_network(one_class, HyperParams{1, 0.0, 1, 1.0}));
  CHECK_THROWS(build_network(ds, HyperParams{0, 0.0, 1, 1.0}));
  CHECK_THROWS(build_network(Dataset{}, HyperParams{1, 0.0, 1, 1.0}));
}

TEST_CASE("build_network: iris with k=7 gives three clean per-class components") {
  const std::filesystem::path path = std::filesystem::path(NBHL_DATA_DIR) / "iris.csv";
  REQUIRE(std::filesystem::exists(path));
  Dataset iris = load_csv(path, "-1", false);
  TrainedModel model = build_network(iris, HyperParams{7, 0.0, 3, 1.0});
  REQUIRE(model.components.size() == 3);
  auto counts = iris.class_counts();
  for (std::size_t ci = 0; ci < 3; ++ci) {
    CHECK(model.components[ci].node_ids.size() == counts[ci]);
    for (int id : model.components[ci].node_ids)
      CHECK(model.node_class[id] == static_cast<int>(ci));
  }
}

TEST_CASE("insert_probe: iris probe at k=5, e=0.5 splits its five neighbors 4/1/0") {
  const std::filesystem::path path = std::filesystem::path(NBHL_DATA_DIR) / "iris.csv";
  REQUIRE(std::filesystem::exists(path));
  Dataset iris = load_csv(path, "-1", false);
  TrainedModel model = build_network(iris, HyperParams{5, 0.5, 5, 1.0});
  // frozen boundary-region probe: five nearest neighbors are four of one
  // class and one of another, none of the third
  InsertionProbe probe = insert_probe(model, Instance{{7.49, 2.997, 5.013, 1.017}, {}});
  CHECK(probe.total_links() == 5);
  std::vector<std::size_t> counts;
  for (const auto& links : probe.class_links) counts.push_back(links.size());
  std::sort(counts.begin(), counts.end());
  CHECK(counts == std::vector<std::size_t>{0, 1, 4});
}

TEST_CASE("insert_probe: identical point links to its twin's class at k=1") {
  Dataset ds = nbhl::testing::fixture_two_clusters();
  TrainedModel model = build_network(ds, HyperParams{1, 0.0, 1, 1.0});
  InsertionProbe probe = insert_probe(model, ds.instances[2]);  // an "A" point
  CHECK(probe.total_links() == 1);
  CHECK(probe.class_links[0].size() == 1);
  CHECK(probe.class_links[1].empty());
  CHECK(probe.neighbor_ids == std::vector<int>{2});
}

TEST_CASE("insert_probe: neighbor partition equals brute-force top-k") {
  Dataset ds = random_labeled(15, 2, 3, 77);
  TrainedModel model = build_network(ds, HyperParams{3, 0.0, 1, 1.0});
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    Instance x{{rng.next_double() * 4, rng.next_double() * 4}, {}};
    InsertionProbe probe = insert_probe(model, x);

    std::vector<std::pair<double, int>> order;
    for (int i = 0; i < 15; ++i) order.push_back({pairwise_distance(x, model.nodes[i]), i});
    std::sort(order.begin(), order.end());
    std::vector<int> expected = {order[0].second, order[1].second, order[2].second};
    std::sort(expected.begin(), expected.end());
    CHECK(probe.neighbor_ids == expected);
  }
}

TEST_CASE("insert_probe: rejects dimension mismatch") {
  Dataset ds = nbhl::testing::fixture_two_clusters();
  TrainedModel model = build_network(ds, HyperParams{1, 0.0, 1, 1.0});
  CHECK_THROWS_AS(insert_probe(model, Instance{{1.0, 2.0, 3.0}, {}}), std::invalid_argument);
}

TEST_CASE("attach grows only the chosen component; zero-link attach is legal") {
  Dataset ds = nbhl::testing::fixture_two_clusters();
  TrainedModel model = build_network(ds, HyperParams{2, 0.0, 1, 1.0});
  InsertionProbe probe = insert_probe(model, Instance{{0.4, 0.3}, {}});
  REQUIRE(probe.class_links[0].size() == 2);  // lands inside cluster A
  REQUIRE(probe.class_links[1].empty());

  const auto size_a = model.components[0].node_ids.size();
  const auto size_b = model.components[1].node_ids.size();

  SUBCASE("attach to the linked class") {
    int id = attach(model, probe, "A");
    CHECK(model.components[0].node_ids.size() == size_a + 1);
    CHECK(model.components[1].node_ids.size() == size_b);
    CHECK(model.nodes.size() == 13);
    CHECK(id == 12);
  }
  SUBCASE("attach with zero links gives an isolated node") {
    attach(model, probe, "B");
    CHECK(model.components[1].adjacency.back().empty());
  }
  SUBCASE("unknown class is rejected") { CHECK_THROWS(attach(model, probe, "C")); }
}

TEST_CASE("attach/detach round-trip restores the exact structure") {
  Dataset ds = nbhl::testing::fixture_two_clusters();
  TrainedModel model = build_network(ds, HyperParams{2, 0.5, 1, 1.0});
  const auto hash_before = structural_hash(model);
  const auto edges_before = model_edges(model);

  InsertionProbe probe = insert_probe(model, Instance{{0.6, 0.2}, {}});
  int id = attach(model, probe, "A");
  CHECK(structural_hash(model) != hash_before);
  detach(model, id);
  CHECK(structural_hash(model) == hash_before);
  CHECK(model_edges(model) == edges_before);

  SUBCASE("detach twice fails") {
    CHECK_THROWS(detach(model, id));
  }
  SUBCASE("original training nodes cannot be detached") {
    CHECK_THROWS_WITH_AS(detach(model, 3), doctest::Contains("training node"),
                         std::invalid_argument);
  }
}

TEST_CASE("interleaved attach/detach pairs leave the model unchanged") {
  Dataset ds = random_labeled(24, 2, 2, 21);
  TrainedModel model = build_network(ds, HyperParams{3, 0.5, 2, 1.0});
  const auto hash_before = structural_hash(model);
  Rng rng(31);
  for (int round = 0; round < 5; ++round) {
    Instance x{{rng.next_double() * 4, rng.next_double() * 4}, {}};
    InsertionProbe probe = insert_probe(model, x);
    int id = attach(model, probe, model.classes[round % 2]);
    detach(model, id);
  }
  CHECK(structural_hash(model) == hash_before);
}

TEST_CASE("detach enforces reverse attachment order") {
  Dataset ds = nbhl::testing::fixture_two_clusters();
  TrainedModel model = build_network(ds, HyperParams{2, 0.0, 1, 1.0});
  InsertionProbe p1 = insert_probe(model, Instance{{0.5, 0.2}, {}});
  const int id1 = attach(model, p1, "A");
  InsertionProbe p2 = insert_probe(model, Instance{{3.5, 0.3}, {}});
  const int id2 = attach(model, p2, "B");
  CHECK_THROWS_WITH_AS(detach(model, id1), doctest::Contains("reverse attachment order"),
                       std::invalid_argument);
  detach(model, id2);
  detach(model, id1);
  CHECK(model.nodes.size() == ds.size());
}

TEST_CASE("a grown model serializes and reloads with identical structure") {
  Dataset ds = random_labeled(20, 2, 2, 44);
  TrainedModel model = build_network(ds, HyperParams{2, 0.5, 2, 1.0});
  Rng rng(3);
  for (int i = 0; i < 4; ++i) {
    Instance x{{rng.next_double() * 4, rng.next_double() * 4}, {}};
    InsertionProbe probe = insert_probe(model, x);
    attach(model, probe, model.classes[i % 2]);
  }
  TrainedModel back = model_from_json(model_to_json(model));
  CHECK(structural_hash(back) == structural_hash(model));
  CHECK(back.base_node_count == 20);
  CHECK(back.nodes.size() == 24);
  // attached probes stay detachable after a reload
  detach(back, 23);
  CHECK(back.nodes.size() == 23);
}

TEST_CASE("model JSON round-trip reproduces structure and decisions") {
  Dataset ds = random_labeled(30, 3, 3, 6);
  TrainedModel model = build_network(ds, HyperParams{3, 0.5, 2, 0.7}, true);
  const std::string text = model_to_json(model);
  TrainedModel back = model_from_json(text);
  CHECK(structural_hash(back) == structural_hash(model));

  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    Instance x{{rng.next_double() * 4, rng.next_double() * 4, rng.next_double() * 4}, {}};
    ClassScores a = score(model, x);
    ClassScores b = score(back, x);
    CHECK(a.decided == b.decided);
    CHECK(a.H == b.H);
    CHECK(a.W == b.W);
    CHECK(a.T == b.T);
  }
  CHECK_THROWS(model_from_json("{\"format\":\"something-else\"}"));
}
