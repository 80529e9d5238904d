#include "nbhl/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "nbhl/rng.hpp"

namespace nbhl {

namespace {

// Seed-stream tags; each (tag, index) pair is an independent stream of the
// experiment seed.
enum : std::uint64_t {
  kStreamRegen = 1,
  kStreamFold = 2,
  kStreamHoldout = 3,
  kStreamTrainCvSplit = 4,
};

std::uint64_t stream_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index) {
  return derive_seed(base, (tag << 32) | index);
}

}  // namespace

Dataset DatasetSource::load(std::uint64_t seed) const {
  if (generator) {
    if (generator->kind == "moons") return generate_moons(generator->n, generator->noise, seed);
    if (generator->kind == "circles")
      return generate_circles(generator->n, generator->noise, generator->inner_radius_ratio, seed);
    throw std::invalid_argument("unknown generator kind '" + generator->kind + "'");
  }
  if (!csv) throw std::invalid_argument("dataset source has neither csv nor generator");
  if (!std::filesystem::exists(*csv))
    throw std::runtime_error("dataset file not found: " + csv->string());
  return load_csv(*csv, label_column, header);
}

std::string DatasetSource::describe() const {
  if (generator)
    return generator->kind + "(n=" + std::to_string(generator->n) +
           ",noise=" + format_double(generator->noise) + ")";
  return csv ? csv->filename().string() : "<unset>";
}

HyperParams ParamGrid::cell(std::size_t index) const {
  if (index >= size()) throw std::out_of_range("grid cell index");
  HyperParams p;
  p.alpha = alpha[index % alpha.size()];
  index /= alpha.size();
  p.b = b[index % b.size()];
  index /= b.size();
  p.e = e[index % e.size()];
  index /= e.size();
  p.k = k[index];
  p.signed_differences = signed_differences;
  return p;
}

ParamGrid ParamGrid::single(const HyperParams& p) {
  ParamGrid g;
  g.k = {p.k};
  g.e = {p.e};
  g.b = {p.b};
  g.alpha = {p.alpha};
  g.signed_differences = p.signed_differences;
  return g;
}

std::int64_t ConfusionMatrix::total() const {
  std::int64_t sum = 0;
  for (const auto& row : counts)
    for (auto v : row) sum += v;
  return sum;
}

std::int64_t ConfusionMatrix::trace() const {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

double accuracy(const std::vector<std::string>& predictions,
                const std::vector<std::string>& truths) {
  if (predictions.empty() || predictions.size() != truths.size())
    throw std::invalid_argument("accuracy: need equal-length, non-empty inputs");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truths[i]) ++correct;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(predictions.size());
}

ConfusionMatrix confusion_matrix(const std::vector<std::string>& truths,
                                 const std::vector<std::string>& predictions,
                                 const std::vector<std::string>& classes) {
  if (truths.size() != predictions.size())
    throw std::invalid_argument("confusion_matrix: length mismatch");
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
  auto index_of = [&](const std::string& label) {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == label) return static_cast<int>(i);
    throw std::invalid_argument("confusion_matrix: label '" + label + "' not in class list");
  };
  for (std::size_t i = 0; i < truths.size(); ++i)
    ++cm.counts[index_of(truths[i])][index_of(predictions[i])];
  return cm;
}

namespace {

struct TaskResult {
  double accuracy = 0.0;
  ConfusionMatrix confusion;
};

// Runs tasks in parallel; exceptions cannot unwind out of an OpenMP region,
// so the first failure is captured and rethrown afterwards.
template <typename Fn>
void run_tasks(std::size_t count, Fn&& fn) {
  std::string first_error;
#pragma omp parallel for schedule(dynamic)
  for (int t = 0; t < static_cast<int>(count); ++t) {
    try {
      fn(static_cast<std::size_t>(t));
    } catch (const std::exception& err) {
#pragma omp critical
      if (first_error.empty()) first_error = err.what();
    }
  }
  if (!first_error.empty()) throw std::runtime_error(first_error);
}

TaskResult run_task(const Dataset& train, const Dataset& test,
                    const std::vector<std::string>& classes, const HyperParams& params,
                    PredictMode mode, bool scale) {
  TrainedModel model = build_network(train, params, scale);
  std::vector<Instance> xs;
  std::vector<std::string> truths;
  xs.reserve(test.size());
  truths.reserve(test.size());
  for (const auto& inst : test.instances) {
    xs.push_back(inst);
    truths.push_back(*inst.label);
  }
  const auto preds = predict_batch(model, xs, mode);
  return {accuracy(preds, truths), confusion_matrix(truths, preds, classes)};
}

void merge_results(CellResult& cell, const std::vector<TaskResult>& tasks,
                   const std::vector<std::string>& classes) {
  cell.per_fold.clear();
  cell.confusion.classes = classes;
  cell.confusion.counts.assign(classes.size(), std::vector<std::int64_t>(classes.size(), 0));
  for (const auto& task : tasks) {
    cell.per_fold.push_back(task.accuracy);
    for (std::size_t i = 0; i < classes.size(); ++i)
      for (std::size_t j = 0; j < classes.size(); ++j)
        cell.confusion.counts[i][j] += task.confusion.counts[i][j];
  }
  double mean = 0.0;
  for (double a : cell.per_fold) mean += a;
  mean /= static_cast<double>(cell.per_fold.size());
  double var = 0.0;
  for (double a : cell.per_fold) var += (a - mean) * (a - mean);
  cell.mean_accuracy = mean;
  cell.std_accuracy = std::sqrt(var / static_cast<double>(cell.per_fold.size()));
}

// folds x repeats cross-validation of one parameter tuple. Fold partitions
// depend only on (seed, protocol), never on the parameters, so grid cells see
// identical partitions.
CellResult evaluate_kfold(const DatasetSource& source, const Dataset* fixed_dataset,
                          const HyperParams& params, const Protocol& protocol, PredictMode mode,
                          bool scale, std::uint64_t seed,
                          const std::vector<std::string>& classes_hint) {
  const int folds = protocol.folds;
  const int repeats = protocol.repeats;

  struct FoldTask {
    Dataset train, test;
  };
  std::vector<FoldTask> tasks;
  std::vector<std::string> classes = classes_hint;
  for (int r = 0; r < repeats; ++r) {
    Dataset ds = fixed_dataset
                     ? *fixed_dataset
                     : source.load(stream_seed(seed, kStreamRegen, static_cast<std::uint64_t>(r)));
    if (classes.empty()) classes = ds.classes;
    auto parts =
        kfold(ds, static_cast<std::size_t>(folds), stream_seed(seed, kStreamFold, r), true);
    for (auto& part : parts) tasks.push_back({std::move(part.first), std::move(part.second)});
  }

  std::vector<TaskResult> results(tasks.size());
  run_tasks(tasks.size(), [&](std::size_t t) {
    results[t] = run_task(tasks[t].train, tasks[t].test, classes, params, mode, scale);
  });

  CellResult cell;
  cell.params = params;
  merge_results(cell, results, classes);
  return cell;
}

CellResult evaluate_holdout(const Dataset& ds, const HyperParams& params, const Protocol& protocol,
                            PredictMode mode, bool scale, std::uint64_t seed) {
  struct SplitTask {
    Dataset train, test;
  };
  std::vector<SplitTask> tasks;
  for (int s = 0; s < protocol.holdout_seeds; ++s) {
    SplitSpec spec{protocol.train_fraction, stream_seed(seed, kStreamHoldout, s), true};
    auto [train, test] = stratified_split(ds, spec);
    tasks.push_back({std::move(train), std::move(test)});
  }

  std::vector<TaskResult> results(tasks.size());
  run_tasks(tasks.size(), [&](std::size_t t) {
    results[t] = run_task(tasks[t].train, tasks[t].test, ds.classes, params, mode, scale);
  });

  CellResult cell;
  cell.params = params;
  merge_results(cell, results, ds.classes);
  return cell;
}

CellResult evaluate_cell(const ExperimentConfig& config, const HyperParams& params) {
  switch (config.protocol.type) {
    case Protocol::Type::kfold_cv: {
      if (config.dataset.generator && config.protocol.regenerate_per_repeat)
        return evaluate_kfold(config.dataset, nullptr, params, config.protocol, config.mode,
                              config.scale, config.seed, {});
      const Dataset ds = config.dataset.load(config.seed);
      return evaluate_kfold(config.dataset, &ds, params, config.protocol, config.mode,
                            config.scale, config.seed, ds.classes);
    }
    case Protocol::Type::holdout: {
      const Dataset ds = config.dataset.load(config.seed);
      return evaluate_holdout(ds, params, config.protocol, config.mode, config.scale, config.seed);
    }
    case Protocol::Type::train_cv: {
      const Dataset train = train_cv_split(config).first;
      return evaluate_kfold(config.dataset, &train, params, config.protocol, config.mode,
                            config.scale, config.seed, train.classes);
    }
  }
  throw std::logic_error("unreachable protocol type");
}

}  // namespace

std::pair<Dataset, Dataset> train_cv_split(const ExperimentConfig& config) {
  const Dataset ds = config.dataset.load(config.seed);
  SplitSpec spec{config.protocol.train_fraction, stream_seed(config.seed, kStreamTrainCvSplit, 0),
                 true};
  return stratified_split(ds, spec);
}

EvalReport cross_validate(const ExperimentConfig& config) {
  if (config.grid.size() != 1)
    throw std::invalid_argument("cross_validate: config must have exactly one parameter tuple");
  const auto start = std::chrono::steady_clock::now();
  EvalReport report;
  report.name = config.name;
  report.cells.push_back(evaluate_cell(config, config.grid.cell(0)));
  report.classes = report.cells.front().confusion.classes;
  report.best_cell = 0;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

EvalReport grid_search(const ExperimentConfig& config) {
  if (config.grid.size() == 0) throw std::invalid_argument("grid_search: empty grid");
  const auto start = std::chrono::steady_clock::now();

  // Holdout would read the test partition per cell; search stays on training
  // data via the train_cv protocol instead.
  ExperimentConfig search = config;
  if (search.protocol.type == Protocol::Type::holdout) {
    search.protocol.type = Protocol::Type::train_cv;
    search.protocol.repeats = 1;
  }

  EvalReport report;
  report.name = config.name;
  for (std::size_t i = 0; i < search.grid.size(); ++i)
    report.cells.push_back(evaluate_cell(search, search.grid.cell(i)));
  report.classes = report.cells.front().confusion.classes;

  report.best_cell = 0;
  for (std::size_t i = 1; i < report.cells.size(); ++i) {
    const auto& cand = report.cells[i];
    const auto& best = report.cells[report.best_cell];
    const bool better =
        cand.mean_accuracy > best.mean_accuracy ||
        (cand.mean_accuracy == best.mean_accuracy &&
         (cand.params.k < best.params.k ||
          (cand.params.k == best.params.k && cand.params.b < best.params.b)));
    if (better) report.best_cell = i;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace nbhl
