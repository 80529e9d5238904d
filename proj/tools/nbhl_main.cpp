#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nbhl/classifier.hpp"
#include "nbhl/dataset.hpp"
#include "nbhl/eval.hpp"
#include "nbhl/graph.hpp"
#include "nbhl/manifest.hpp"
#include "nbhl/model_io.hpp"

namespace {

using nbhl::PredictMode;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

PredictMode parse_mode(const std::string& mode) {
  return mode == "stateless" ? PredictMode::stateless : PredictMode::growth;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

nlohmann::json scores_json(std::size_t index, const nbhl::ClassScores& scores) {
  return {{"index", index}, {"decided", scores.decided}, {"H", scores.H},
          {"W", scores.W},  {"T", scores.T}};
}

void print_report(const nbhl::EvalReport& report, bool as_json) {
  if (as_json) {
    nlohmann::json doc;
    doc["name"] = report.name;
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : report.cells)
      cells.push_back({{"params",
                        {{"k", cell.params.k},
                         {"e", cell.params.e},
                         {"b", cell.params.b},
                         {"alpha", cell.params.alpha}}},
                       {"mean_accuracy", cell.mean_accuracy},
                       {"std_accuracy", cell.std_accuracy},
                       {"per_fold", cell.per_fold}});
    doc["cells"] = std::move(cells);
    doc["best_cell"] = report.best_cell;
    std::cout << doc.dump(2) << '\n';
    return;
  }
  std::cout << report.name << '\n';
  for (std::size_t i = 0; i < report.cells.size(); ++i) {
    const auto& cell = report.cells[i];
    std::cout << (i == report.best_cell ? "* " : "  ") << "k=" << cell.params.k
              << " e=" << cell.params.e << " b=" << cell.params.b << " alpha=" << cell.params.alpha
              << "  accuracy " << cell.mean_accuracy << " +/- " << cell.std_accuracy << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nbhl: network-based high-level classification via betweenness centrality"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic dataset as CSV");
  std::string gen_kind, gen_out;
  std::size_t gen_n = 100;
  double gen_noise = 0.0, gen_ratio = 0.8;
  std::uint64_t gen_seed = 1;
  gen->add_option("kind", gen_kind, "moons|circles")->required()->check(CLI::IsMember({"moons", "circles"}));
  gen->add_option("--n", gen_n, "instance count")->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
  gen->add_option("--noise", gen_noise, "gaussian noise std-dev")->check(CLI::NonNegativeNumber);
  gen->add_option("--ratio", gen_ratio, "inner radius ratio (circles)")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  gen->add_option("--seed", gen_seed, "rng seed");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // shared hyperparameter flags
  auto add_param_flags = [](CLI::App* cmd, nbhl::HyperParams& p) {
    cmd->add_option("--k", p.k, "kNN neighbor count")->check(CLI::PositiveNumber);
    cmd->add_option("--e", p.e, "epsilon quantile in [0,1]")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--b", p.b, "comparison-pool size")->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", p.alpha, "betweenness/link mixing weight")->check(CLI::Range(0.0, 1.0));
    cmd->add_flag("--signed-differences", p.signed_differences,
                  "rank signed betweenness differences instead of absolute");
  };

  // train
  auto* train = app.add_subcommand("train", "build a model from labeled CSV data");
  std::string train_csv, train_label = "-1", train_out;
  bool train_header = false, train_scale = false;
  nbhl::HyperParams train_params;
  train->add_option("--data", train_csv, "labeled CSV path")->required();
  train->add_option("--label-column", train_label, "label column name or index (default: last)");
  train->add_flag("--header", train_header, "first row is a header");
  train->add_flag("--scale", train_scale, "min-max scale features to [0,1]");
  add_param_flags(train, train_params);
  train->add_option("--out", train_out, "output model path")->required();

  // predict
  auto* predict = app.add_subcommand("predict", "classify unlabeled CSV rows with a model");
  std::string pred_model, pred_csv, pred_mode = "stateless", pred_out;
  bool pred_header = false;
  predict->add_option("--model", pred_model, "model JSON path")->required();
  predict->add_option("--data", pred_csv, "unlabeled CSV path")->required();
  predict->add_flag("--header", pred_header, "first row is a header");
  predict->add_option("--mode", pred_mode, "growth|stateless")->check(CLI::IsMember({"growth", "stateless"}));
  predict->add_option("--out", pred_out, "write JSON lines here instead of stdout");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "cross-validate or holdout-evaluate one configuration");
  std::string eval_csv, eval_label = "-1", eval_generator, eval_protocol = "kfold";
  bool eval_header = false, eval_scale = false;
  std::size_t eval_n = 100;
  double eval_noise = 0.0, eval_ratio = 0.8, eval_fraction = 0.75;
  int eval_folds = 10, eval_repeats = 10, eval_seeds = 10;
  std::uint64_t eval_seed = 1;
  std::string eval_mode = "growth";
  bool eval_json = false;
  nbhl::HyperParams eval_params;
  evaluate->add_option("--data", eval_csv, "labeled CSV path");
  evaluate->add_option("--label-column", eval_label, "label column name or index");
  evaluate->add_flag("--header", eval_header, "first row is a header");
  evaluate->add_option("--generator", eval_generator, "moons|circles instead of --data")
      ->check(CLI::IsMember({"moons", "circles"}));
  evaluate->add_option("--n", eval_n, "generator instance count");
  evaluate->add_option("--noise", eval_noise, "generator noise")->check(CLI::NonNegativeNumber);
  evaluate->add_option("--ratio", eval_ratio, "generator inner radius ratio");
  evaluate->add_option("--protocol", eval_protocol, "kfold|holdout|train_cv")
      ->check(CLI::IsMember({"kfold", "holdout", "train_cv"}));
  evaluate->add_option("--folds", eval_folds, "fold count")->check(CLI::Range(2, 1000));
  evaluate->add_option("--repeats", eval_repeats, "repeat count")->check(CLI::PositiveNumber);
  evaluate->add_option("--train-fraction", eval_fraction, "holdout train fraction")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  evaluate->add_option("--holdout-seeds", eval_seeds, "number of holdout splits")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", eval_seed, "master seed");
  evaluate->add_option("--mode", eval_mode, "growth|stateless")->check(CLI::IsMember({"growth", "stateless"}));
  evaluate->add_flag("--scale", eval_scale, "min-max scale features");
  evaluate->add_flag("--json", eval_json, "machine-readable output");
  add_param_flags(evaluate, eval_params);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid-search hyperparameters (training data only)");
  std::string sweep_k = "1", sweep_e = "0.0", sweep_b = "1", sweep_alpha = "1.0";
  sweep->add_option("--k", sweep_k, "comma list of k values");
  sweep->add_option("--e", sweep_e, "comma list of e values");
  sweep->add_option("--b", sweep_b, "comma list of b values");
  sweep->add_option("--alpha", sweep_alpha, "comma list of alpha values");
  std::string swp_csv, swp_label = "-1", swp_generator, swp_protocol = "kfold", swp_mode = "growth";
  bool swp_header = false, swp_scale = false, swp_json = false;
  std::size_t swp_n = 100;
  double swp_noise = 0.0, swp_ratio = 0.8, swp_fraction = 0.75;
  int swp_folds = 10, swp_repeats = 1;
  std::uint64_t swp_seed = 1;
  sweep->add_option("--data", swp_csv, "labeled CSV path");
  sweep->add_option("--label-column", swp_label, "label column name or index");
  sweep->add_flag("--header", swp_header, "first row is a header");
  sweep->add_option("--generator", swp_generator, "moons|circles instead of --data")
      ->check(CLI::IsMember({"moons", "circles"}));
  sweep->add_option("--n", swp_n, "generator instance count");
  sweep->add_option("--noise", swp_noise, "generator noise")->check(CLI::NonNegativeNumber);
  sweep->add_option("--ratio", swp_ratio, "generator inner radius ratio");
  sweep->add_option("--protocol", swp_protocol, "kfold|train_cv")->check(CLI::IsMember({"kfold", "train_cv"}));
  sweep->add_option("--folds", swp_folds, "fold count")->check(CLI::Range(2, 1000));
  sweep->add_option("--repeats", swp_repeats, "repeat count")->check(CLI::PositiveNumber);
  sweep->add_option("--train-fraction", swp_fraction, "train_cv split fraction")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  sweep->add_option("--seed", swp_seed, "master seed");
  sweep->add_option("--mode", swp_mode, "growth|stateless")->check(CLI::IsMember({"growth", "stateless"}));
  sweep->add_flag("--scale", swp_scale, "min-max scale features");
  sweep->add_flag("--json", swp_json, "machine-readable output");

  // reproduce
  auto* reproduce = app.add_subcommand("reproduce", "run an experiment manifest");
  std::string rep_manifest, rep_json_out;
  reproduce->add_option("manifest", rep_manifest, "manifest JSON path")->required();
  reproduce->add_option("--json-out", rep_json_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  // Flag validation happens before any file is read; failures here are usage
  // errors, everything later is a runtime/data failure.
  try {
    if (train->parsed()) train_params.validate();
    if (evaluate->parsed()) eval_params.validate();
    if (sweep->parsed()) {
      nbhl::ParamGrid grid;
      grid.k = parse_int_list(sweep_k);
      grid.e = parse_double_list(sweep_e);
      grid.b = parse_int_list(sweep_b);
      grid.alpha = parse_double_list(sweep_alpha);
      for (std::size_t i = 0; i < grid.size(); ++i) grid.cell(i).validate();
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }

  try {
    if (gen->parsed()) {
      nbhl::Dataset ds = gen_kind == "moons"
                             ? nbhl::generate_moons(gen_n, gen_noise, gen_seed)
                             : nbhl::generate_circles(gen_n, gen_noise, gen_ratio, gen_seed);
      nbhl::save_csv(ds, gen_out);
      std::cout << "wrote " << ds.size() << " rows to " << gen_out << '\n';
      return kExitOk;
    }

    if (train->parsed()) {
      nbhl::Dataset ds = nbhl::load_csv(train_csv, train_label, train_header);
      nbhl::TrainedModel model = nbhl::build_network(ds, train_params, train_scale);
      nbhl::save_model(model, train_out);
      std::size_t edges = 0;
      for (const auto& comp : model.components) edges += comp.edge_count();
      std::cout << "trained on " << ds.size() << " instances, " << model.classes.size()
                << " classes, " << edges << " edges -> " << train_out << '\n';
      return kExitOk;
    }

    if (predict->parsed()) {
      nbhl::TrainedModel model = nbhl::load_model(pred_model);
      const auto xs = nbhl::load_unlabeled_csv(pred_csv, pred_header);
      const auto mode = parse_mode(pred_mode);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!pred_out.empty()) {
        file.open(pred_out);
        if (!file) throw std::runtime_error("cannot write: " + pred_out);
        out = &file;
      }
      for (std::size_t i = 0; i < xs.size(); ++i) {
        nbhl::ScoredProbe sp = nbhl::score_probe(model, xs[i]);
        if (mode == PredictMode::growth) nbhl::attach(model, sp.probe, sp.scores.decided);
        *out << scores_json(i, sp.scores).dump() << '\n';
      }
      return kExitOk;
    }

    if (evaluate->parsed() || sweep->parsed()) {
      const bool is_sweep = sweep->parsed();
      nbhl::ExperimentConfig config;
      config.name = is_sweep ? "sweep" : "evaluate";
      const std::string& csv = is_sweep ? swp_csv : eval_csv;
      const std::string& generator = is_sweep ? swp_generator : eval_generator;
      if (!csv.empty()) {
        config.dataset.csv = csv;
        config.dataset.label_column = is_sweep ? swp_label : eval_label;
        config.dataset.header = is_sweep ? swp_header : eval_header;
      } else if (!generator.empty()) {
        nbhl::GeneratorSpec gspec;
        gspec.kind = generator;
        gspec.n = is_sweep ? swp_n : eval_n;
        gspec.noise = is_sweep ? swp_noise : eval_noise;
        gspec.inner_radius_ratio = is_sweep ? swp_ratio : eval_ratio;
        config.dataset.generator = gspec;
      } else {
        std::cerr << "either --data or --generator is required\n";
        return kExitUsage;
      }
      const std::string& protocol = is_sweep ? swp_protocol : eval_protocol;
      config.protocol.type = protocol == "holdout"    ? nbhl::Protocol::Type::holdout
                             : protocol == "train_cv" ? nbhl::Protocol::Type::train_cv
                                                      : nbhl::Protocol::Type::kfold_cv;
      config.protocol.folds = is_sweep ? swp_folds : eval_folds;
      config.protocol.repeats = is_sweep ? swp_repeats : eval_repeats;
      config.protocol.train_fraction = is_sweep ? swp_fraction : eval_fraction;
      config.protocol.holdout_seeds = eval_seeds;
      config.mode = parse_mode(is_sweep ? swp_mode : eval_mode);
      config.scale = is_sweep ? swp_scale : eval_scale;
      config.seed = is_sweep ? swp_seed : eval_seed;

      if (is_sweep) {
        config.grid.k = parse_int_list(sweep_k);
        config.grid.e = parse_double_list(sweep_e);
        config.grid.b = parse_int_list(sweep_b);
        config.grid.alpha = parse_double_list(sweep_alpha);
        print_report(nbhl::grid_search(config), swp_json);
      } else {
        config.grid = nbhl::ParamGrid::single(eval_params);
        print_report(nbhl::cross_validate(config), eval_json);
      }
      return kExitOk;
    }

    if (reproduce->parsed()) {
      nbhl::SuiteResult result = nbhl::run_experiment_suite(rep_manifest);
      std::cout << nbhl::suite_summary_table(result);
      if (!rep_json_out.empty()) {
        std::ofstream out(rep_json_out);
        if (!out) throw std::runtime_error("cannot write: " + rep_json_out);
        out << nbhl::suite_report_json(result);
      }
      return result.all_ok() ? kExitOk : kExitRuntime;
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
