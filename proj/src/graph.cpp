#include "nbhl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <stdexcept>

namespace nbhl {

void HyperParams::validate() const {
  if (k < 1) throw std::invalid_argument("params: k must be at least 1");
  if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("params: e must lie in [0,1]");
  if (b < 1) throw std::invalid_argument("params: b must be at least 1");
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("params: alpha must lie in [0,1]");
}

std::size_t ClassComponent::edge_count() const {
  std::size_t deg = 0;
  for (const auto& nbrs : adjacency) deg += nbrs.size();
  return deg / 2;
}

int TrainedModel::class_index(const std::string& label) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == label) return static_cast<int>(i);
  return -1;
}

std::size_t InsertionProbe::total_links() const {
  std::size_t n = 0;
  for (const auto& links : class_links) n += links.size();
  return n;
}

double pairwise_distance(const Instance& a, const Instance& b) {
  if (a.features.size() != b.features.size())
    throw std::invalid_argument("distance: dimension mismatch (" +
                                std::to_string(a.features.size()) + " vs " +
                                std::to_string(b.features.size()) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    const double d = a.features[i] - b.features[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

double quantile_sorted(const std::vector<double>& sorted_values, double q) {
  if (sorted_values.empty()) return 0.0;
  if (sorted_values.size() == 1) return sorted_values.front();
  const double pos = q * static_cast<double>(sorted_values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

namespace {

// Distance-ascending neighbor order with ties broken by lower node index.
struct Neighbor {
  double dist;
  int id;  // index into the candidate list the caller provides
  bool operator<(const Neighbor& o) const {
    return dist != o.dist ? dist < o.dist : id < o.id;
  }
};

}  // namespace

TrainedModel build_network(const Dataset& train, const HyperParams& params, bool scale) {
  params.validate();
  if (train.instances.empty()) throw std::invalid_argument("build_network: empty training data");
  if (train.classes.size() < 2)
    throw std::invalid_argument("build_network: training data needs at least 2 classes");
  for (const auto& inst : train.instances) {
    if (!inst.label) throw std::invalid_argument("build_network: unlabeled training instance");
    if (inst.features.size() != train.dim())
      throw std::invalid_argument("build_network: inconsistent feature dimensionality");
    for (double f : inst.features)
      if (!std::isfinite(f)) throw std::invalid_argument("build_network: non-finite feature value");
  }

  TrainedModel model;
  model.params = params;
  model.classes = train.classes;
  model.base_node_count = static_cast<int>(train.size());

  Dataset data = train;
  if (scale) {
    model.scaling = fit_min_max(data);
    model.scaling->apply(data);
  }

  const int n = static_cast<int>(data.size());
  model.nodes = data.instances;
  model.node_class.resize(n);
  model.node_local.resize(n);

  const std::size_t n_classes = train.classes.size();
  std::vector<std::vector<int>> members(n_classes);
  for (int i = 0; i < n; ++i) {
    const int ci = data.class_index(*data.instances[i].label);
    model.node_class[i] = ci;
    model.node_local[i] = static_cast<int>(members[ci].size());
    members[ci].push_back(i);
  }

  model.components.resize(n_classes);
  model.class_epsilon.assign(n_classes, 0.0);
  std::vector<double> all_knn_distances;

  for (std::size_t ci = 0; ci < n_classes; ++ci) {
    auto& comp = model.components[ci];
    comp.class_id = train.classes[ci];
    comp.node_ids = members[ci];
    const int m = static_cast<int>(members[ci].size());
    comp.adjacency.assign(m, {});

    // Same-class distance matrix; rows are independent.
    std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
#pragma omp parallel for schedule(static)
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b) {
        const double d =
            pairwise_distance(model.nodes[members[ci][a]], model.nodes[members[ci][b]]);
        dist[a][b] = d;
        dist[b][a] = d;
      }

    // k nearest same-class neighbors per member, ties to the lower node index.
    const int kk = std::min(params.k, m - 1);
    std::vector<std::vector<int>> knn(m);
    std::vector<double> class_knn_distances;
    for (int a = 0; a < m; ++a) {
      std::vector<Neighbor> order;
      order.reserve(m - 1);
      for (int b = 0; b < m; ++b)
        if (b != a) order.push_back({dist[a][b], members[ci][b]});
      std::sort(order.begin(), order.end());
      for (int j = 0; j < kk; ++j) {
        knn[a].push_back(order[j].id);
        class_knn_distances.push_back(order[j].dist);
      }
    }

    std::sort(class_knn_distances.begin(), class_knn_distances.end());
    const bool radius_enabled = params.e > 0.0 && !class_knn_distances.empty();
    if (radius_enabled)
      model.class_epsilon[ci] = quantile_sorted(class_knn_distances, params.e);
    all_knn_distances.insert(all_knn_distances.end(), class_knn_distances.begin(),
                             class_knn_distances.end());

    // Eq-style neighborhood: the epsilon ball when it is denser than k,
    // otherwise the kNN list. Edges are the undirected union.
    std::set<std::pair<int, int>> edges;
    for (int a = 0; a < m; ++a) {
      std::vector<int> hood;
      if (radius_enabled) {
        for (int b = 0; b < m; ++b)
          if (b != a && dist[a][b] < model.class_epsilon[ci]) hood.push_back(members[ci][b]);
        if (static_cast<int>(hood.size()) <= params.k) hood = knn[a];
      } else {
        hood = knn[a];
      }
      const int ga = members[ci][a];
      for (int gb : hood) edges.insert({std::min(ga, gb), std::max(ga, gb)});
    }

    for (const auto& [ga, gb] : edges) {
      comp.adjacency[model.node_local[ga]].push_back(model.node_local[gb]);
      comp.adjacency[model.node_local[gb]].push_back(model.node_local[ga]);
    }
    for (auto& nbrs : comp.adjacency) std::sort(nbrs.begin(), nbrs.end());
  }

  if (params.e > 0.0 && !all_knn_distances.empty()) {
    std::sort(all_knn_distances.begin(), all_knn_distances.end());
    model.global_epsilon = quantile_sorted(all_knn_distances, params.e);
  }
  return model;
}

InsertionProbe insert_probe(const TrainedModel& model, const Instance& x) {
  if (model.nodes.empty()) throw std::invalid_argument("insert_probe: model has no nodes");
  if (x.features.size() != model.dim())
    throw std::invalid_argument("insert_probe: dimension mismatch (" +
                                std::to_string(x.features.size()) + " vs " +
                                std::to_string(model.dim()) + ")");

  InsertionProbe probe;
  probe.instance = x;
  probe.instance.label.reset();
  if (model.scaling) model.scaling->apply(probe.instance);

  const int n = static_cast<int>(model.nodes.size());
  std::vector<Neighbor> order(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    order[i] = {pairwise_distance(probe.instance, model.nodes[i]), i};
  std::sort(order.begin(), order.end());

  std::vector<int> neighbors;
  if (model.params.e > 0.0) {
    for (const auto& nb : order) {
      if (nb.dist >= model.global_epsilon) break;
      neighbors.push_back(nb.id);
    }
  }
  if (static_cast<int>(neighbors.size()) <= model.params.k) {
    neighbors.clear();
    const int kk = std::min(model.params.k, n);
    for (int j = 0; j < kk; ++j) neighbors.push_back(order[j].id);
  }

  probe.class_links.assign(model.classes.size(), {});
  for (int id : neighbors)
    probe.class_links[model.node_class[id]].push_back(model.node_local[id]);
  for (auto& links : probe.class_links) std::sort(links.begin(), links.end());
  probe.neighbor_ids = std::move(neighbors);
  std::sort(probe.neighbor_ids.begin(), probe.neighbor_ids.end());
  return probe;
}

int attach(TrainedModel& model, const InsertionProbe& probe, const std::string& class_id) {
  const int ci = model.class_index(class_id);
  if (ci < 0) throw std::invalid_argument("attach: unknown class '" + class_id + "'");
  if (probe.class_links.size() != model.classes.size())
    throw std::invalid_argument("attach: probe was computed against a different model");

  auto& comp = model.components[ci];
  const int node_id = static_cast<int>(model.nodes.size());
  const int local = static_cast<int>(comp.node_ids.size());

  Instance inst = probe.instance;
  inst.label = class_id;
  model.nodes.push_back(std::move(inst));
  model.node_class.push_back(ci);
  model.node_local.push_back(local);
  comp.node_ids.push_back(node_id);
  comp.adjacency.push_back(probe.class_links[ci]);
  for (int l : probe.class_links[ci]) comp.adjacency[l].push_back(local);
  return node_id;
}

void detach(TrainedModel& model, int node_id) {
  if (node_id < 0 || node_id >= static_cast<int>(model.nodes.size()))
    throw std::invalid_argument("detach: unknown node " + std::to_string(node_id));
  if (node_id < model.base_node_count)
    throw std::invalid_argument("detach: node " + std::to_string(node_id) +
                                " is an original training node");
  if (node_id != static_cast<int>(model.nodes.size()) - 1)
    throw std::invalid_argument("detach: probes detach in reverse attachment order");

  const int ci = model.node_class[node_id];
  auto& comp = model.components[ci];
  const int local = model.node_local[node_id];
  for (int l : comp.adjacency[local]) {
    auto& nbrs = comp.adjacency[l];
    nbrs.erase(std::remove(nbrs.begin(), nbrs.end(), local), nbrs.end());
  }
  comp.adjacency.pop_back();
  comp.node_ids.pop_back();
  model.nodes.pop_back();
  model.node_class.pop_back();
  model.node_local.pop_back();
}

namespace {

struct Fnv1a {
  std::uint64_t h = 1469598103934665603ULL;
  void feed(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  }
  void feed_u64(std::uint64_t v) { feed(&v, sizeof v); }
  void feed_int(int v) { feed_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
  void feed_double(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    feed_u64(bits);
  }
  void feed_str(const std::string& s) {
    feed_u64(s.size());
    feed(s.data(), s.size());
  }
};

}  // namespace

std::uint64_t structural_hash(const TrainedModel& model) {
  Fnv1a hash;
  hash.feed_int(model.params.k);
  hash.feed_double(model.params.e);
  hash.feed_int(model.params.b);
  hash.feed_double(model.params.alpha);
  hash.feed_int(model.params.signed_differences ? 1 : 0);
  hash.feed_int(model.base_node_count);
  hash.feed_u64(model.nodes.size());
  for (const auto& node : model.nodes) {
    for (double f : node.features) hash.feed_double(f);
    hash.feed_str(node.label ? *node.label : "");
  }
  hash.feed_double(model.global_epsilon);
  for (double eps : model.class_epsilon) hash.feed_double(eps);
  if (model.scaling)
    for (const auto& r : model.scaling->ranges) {
      hash.feed_double(r.min);
      hash.feed_double(r.max);
    }
  for (const auto& comp : model.components) {
    hash.feed_str(comp.class_id);
    hash.feed_u64(comp.node_ids.size());
    for (int id : comp.node_ids) hash.feed_int(id);
    for (std::size_t l = 0; l < comp.adjacency.size(); ++l) {
      auto nbrs = comp.adjacency[l];
      std::sort(nbrs.begin(), nbrs.end());
      for (int nb : nbrs)
        if (static_cast<int>(l) < nb) {
          hash.feed_int(static_cast<int>(l));
          hash.feed_int(nb);
        }
    }
  }
  return hash.h;
}

}  // namespace nbhl
