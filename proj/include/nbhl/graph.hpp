#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nbhl/dataset.hpp"

namespace nbhl {

struct HyperParams {
  int k = 1;           // kNN neighbor count, >= 1
  double e = 0.0;      // quantile in [0,1] for the epsilon-radius threshold; 0 disables the radius rule
  int b = 1;           // comparison-pool size, >= 1
  double alpha = 1.0;  // mixing weight: 1 = betweenness only, 0 = link counts only

  // Compatibility switch: keep the signed B(index)-B(j) differences instead
  // of absolute values when ranking the comparison pool.
  bool signed_differences = false;

  void validate() const;  // throws std::invalid_argument on out-of-range values
};

// One network component per class. Adjacency is stored over local indices
// (positions in node_ids); edges are undirected, deduplicated, no self-loops.
struct ClassComponent {
  std::string class_id;
  std::vector<int> node_ids;                // global node ids
  std::vector<std::vector<int>> adjacency;  // local index -> sorted local neighbor indices

  std::size_t edge_count() const;
};

struct TrainedModel {
  std::vector<Instance> nodes;  // training instances (scaled if scaling active), plus attached probes
  std::vector<int> node_class;  // class index per node
  std::vector<int> node_local;  // local index of each node inside its component
  std::vector<ClassComponent> components;
  std::vector<std::string> classes;  // class ids, declaration order
  HyperParams params;
  std::vector<double> class_epsilon;  // per-class e-quantile of kNN distances (0 when e == 0)
  double global_epsilon = 0.0;        // e-quantile over all training kNN distances, used for probes
  std::optional<ScalingMap> scaling;
  int base_node_count = 0;  // nodes below this index are original training nodes

  std::size_t dim() const { return nodes.empty() ? 0 : nodes.front().features.size(); }
  int class_index(const std::string& label) const;
};

// Candidate links of a test instance into each class component, produced by
// the shared kNN / epsilon-radius neighborhood rule evaluated over all nodes.
struct InsertionProbe {
  Instance instance;                          // scaled if the model scales
  std::vector<std::vector<int>> class_links;  // per class: sorted local indices into that component
  std::vector<int> neighbor_ids;              // the global neighbor set, ascending

  std::size_t total_links() const;
};

// Euclidean distance; throws on dimension mismatch.
double pairwise_distance(const Instance& a, const Instance& b);

// Linear-interpolation quantile of a sorted sample, q in [0,1].
double quantile_sorted(const std::vector<double>& sorted_values, double q);

// Builds the per-class training networks: each instance links to its
// same-class epsilon-radius set when that set has more than k members,
// otherwise to its k nearest same-class neighbors. Distance ties break toward
// the lower instance index. `scale` fits and applies min-max scaling first.
TrainedModel build_network(const Dataset& train, const HyperParams& params, bool scale = false);

// Computes the probe's neighbor set over all current nodes (global kNN of
// size k, or the global epsilon-radius set when larger than k) and partitions
// it by class.
InsertionProbe insert_probe(const TrainedModel& model, const Instance& x);

// Permanently adds the probe to the named component, keeping only its links
// into that class. Returns the new node id.
int attach(TrainedModel& model, const InsertionProbe& probe, const std::string& class_id);

// Removes a previously attached probe and its incident edges, restoring the
// pre-attach structure. Probes detach in reverse attachment order.
void detach(TrainedModel& model, int node_id);

// Order-independent digest of the full model structure (instances, edges,
// parameters, epsilons, scaling). Equal hashes on round-trips certify
// structural identity.
std::uint64_t structural_hash(const TrainedModel& model);

}  // namespace nbhl
