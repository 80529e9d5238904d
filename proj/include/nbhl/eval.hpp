#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nbhl/classifier.hpp"
#include "nbhl/dataset.hpp"
#include "nbhl/graph.hpp"

namespace nbhl {

// Where an experiment's data comes from: a CSV on disk or a generator recipe.
struct GeneratorSpec {
  std::string kind;  // "moons" | "circles"
  std::size_t n = 100;
  double noise = 0.0;
  double inner_radius_ratio = 0.8;
};

struct DatasetSource {
  std::optional<std::filesystem::path> csv;
  std::string label_column = "-1";
  bool header = false;
  std::optional<GeneratorSpec> generator;

  // Generators take the seed; CSV sources ignore it.
  Dataset load(std::uint64_t seed) const;
  std::string describe() const;
};

struct Protocol {
  enum class Type { kfold_cv, holdout, train_cv };
  Type type = Type::kfold_cv;
  int folds = 10;
  int repeats = 10;
  double train_fraction = 0.75;
  int holdout_seeds = 10;
  bool regenerate_per_repeat = true;  // generator sources: fresh noise per repeat
};

// Cartesian grid over the four hyperparameters; singleton lists give a single
// configuration. Cells enumerate with k outermost, then e, b, alpha.
struct ParamGrid {
  std::vector<int> k{1};
  std::vector<double> e{0.0};
  std::vector<int> b{1};
  std::vector<double> alpha{1.0};
  bool signed_differences = false;

  std::size_t size() const { return k.size() * e.size() * b.size() * alpha.size(); }
  HyperParams cell(std::size_t index) const;

  static ParamGrid single(const HyperParams& p);
};

struct ExperimentConfig {
  std::string name;
  DatasetSource dataset;
  ParamGrid grid;
  Protocol protocol;
  PredictMode mode = PredictMode::growth;
  bool scale = false;
  std::uint64_t seed = 0;
};

struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::int64_t>> counts;  // rows: truth, cols: predicted

  std::int64_t total() const;
  std::int64_t trace() const;
};

struct CellResult {
  HyperParams params;
  double mean_accuracy = 0.0;  // percent
  double std_accuracy = 0.0;
  std::vector<double> per_fold;  // one accuracy per fold/seed, index order
  ConfusionMatrix confusion;     // aggregated over folds/seeds
};

struct EvalReport {
  std::string name;
  std::vector<std::string> classes;
  std::vector<CellResult> cells;
  std::size_t best_cell = 0;
  double wall_seconds = 0.0;  // reported on stdout only, never serialized
};

// 100 * correct / total; rejects empty or mismatched inputs.
double accuracy(const std::vector<std::string>& predictions, const std::vector<std::string>& truths);

ConfusionMatrix confusion_matrix(const std::vector<std::string>& truths,
                                 const std::vector<std::string>& predictions,
                                 const std::vector<std::string>& classes);

// Evaluates a single-cell config under its protocol. kfold_cv runs
// folds x repeats with per-repeat seeds; holdout averages stratified splits
// over `holdout_seeds` seeds; train_cv first carves off the holdout test
// partition and cross-validates inside the training part only.
EvalReport cross_validate(const ExperimentConfig& config);

// The exact holdout partition a train_cv protocol uses for this config's
// seed; the second element is the part cross-validation never reads.
std::pair<Dataset, Dataset> train_cv_split(const ExperimentConfig& config);

// Evaluates every grid cell on training data only (holdout protocols are
// searched via train_cv so held-out rows are never read). Best cell by mean
// accuracy; ties prefer smaller k, then smaller b, then grid order.
EvalReport grid_search(const ExperimentConfig& config);

}  // namespace nbhl
