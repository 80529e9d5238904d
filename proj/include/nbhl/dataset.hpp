#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nbhl {

struct Instance {
  std::vector<double> features;
  std::optional<std::string> label;
};

// Labeled tabular data. `classes` holds the distinct labels in first-appearance
// order; every classification decision that depends on class order uses this
// ordering, never lexicographic order.
struct Dataset {
  std::string name;
  std::vector<Instance> instances;
  std::vector<std::string> classes;

  std::size_t size() const { return instances.size(); }
  std::size_t dim() const { return instances.empty() ? 0 : instances.front().features.size(); }

  // Appends an instance, registering a new class on first sight.
  void add(Instance inst);

  // Index into `classes`, or -1 when the label is unknown.
  int class_index(const std::string& label) const;

  // Per-class instance counts, aligned with `classes`.
  std::vector<std::size_t> class_counts() const;
};

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 0;
  bool stratified = true;
};

// Reads a labeled CSV. `label_column` is either a zero-based column index
// (negative counts from the end, so "-1" is the last column) or a column name,
// which requires `header`. Feature cells must parse as finite reals; failures
// are reported with 1-based row/column locations.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column, bool header);

// Reads a CSV of unlabeled rows: every column is a feature. Empty file yields
// an empty vector.
std::vector<Instance> load_unlabeled_csv(const std::filesystem::path& path, bool header);

// Writes instances as CSV, label in the last column, no header. Output is
// byte-deterministic; doubles are printed with the shortest round-trip form.
void save_csv(const Dataset& ds, const std::filesystem::path& path);

// Two interleaving half-circles of ceil(n/2) and floor(n/2) points, labels
// "0"/"1", with additive Gaussian noise of the given standard deviation.
Dataset generate_moons(std::size_t n, double noise, std::uint64_t seed);

// Concentric circles: outer radius 1 (label "0"), inner radius
// `inner_radius_ratio` (label "1"), Gaussian noise as above.
Dataset generate_circles(std::size_t n, double noise, double inner_radius_ratio,
                         std::uint64_t seed);

// Seed-deterministic train/test partition. Stratified mode keeps per-class
// train counts within one instance of train_fraction * class_count, with at
// least one instance per class on each side.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec);

// k disjoint test folds covering the dataset exactly once. Stratified folds
// deal each class round-robin after a seeded shuffle.
std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& ds, std::size_t folds,
                                               std::uint64_t seed, bool stratified);

struct FeatureRange {
  double min = 0.0;
  double max = 0.0;
};

// Affine per-feature map fitted on training data: train features land in
// [0,1], constant features map to 0. Values outside [0,1] are permitted for
// non-train data.
struct ScalingMap {
  std::vector<FeatureRange> ranges;

  void apply(Instance& inst) const;
  void apply(Dataset& ds) const;
};

ScalingMap fit_min_max(const Dataset& train);

struct ScaledData {
  Dataset train;
  std::vector<Dataset> others;
  ScalingMap map;
};

// Fits on `train`, applies the same map to `train` and every dataset in
// `others`.
ScaledData min_max_scale(const Dataset& train, const std::vector<Dataset>& others);

// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

}  // namespace nbhl
