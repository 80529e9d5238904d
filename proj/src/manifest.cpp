#include "nbhl/manifest.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nbhl/rng.hpp"

namespace nbhl {

namespace {
using json = nlohmann::json;

PredictMode parse_mode(const std::string& mode) {
  if (mode == "growth") return PredictMode::growth;
  if (mode == "stateless") return PredictMode::stateless;
  throw std::runtime_error("manifest: unknown mode '" + mode + "' (growth|stateless)");
}

DatasetSource parse_source(const json& doc, const std::filesystem::path& base_dir) {
  DatasetSource source;
  if (doc.contains("csv")) {
    std::filesystem::path p = doc.at("csv").get<std::string>();
    source.csv = p.is_absolute() ? p : base_dir / p;
    source.label_column = doc.value("label_column", "-1");
    source.header = doc.value("header", false);
  } else if (doc.contains("generator")) {
    GeneratorSpec gen;
    gen.kind = doc.at("generator").get<std::string>();
    gen.n = doc.value("n", 100);
    gen.noise = doc.value("noise", 0.0);
    gen.inner_radius_ratio = doc.value("inner_radius_ratio", 0.8);
    source.generator = gen;
  } else {
    throw std::runtime_error("manifest: dataset needs either 'csv' or 'generator'");
  }
  return source;
}

template <typename T>
std::vector<T> list_or_scalar(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

ParamGrid parse_grid(const json& doc) {
  ParamGrid grid;
  if (doc.contains("k")) grid.k = list_or_scalar<int>(doc.at("k"));
  if (doc.contains("e")) grid.e = list_or_scalar<double>(doc.at("e"));
  if (doc.contains("b")) grid.b = list_or_scalar<int>(doc.at("b"));
  if (doc.contains("alpha")) grid.alpha = list_or_scalar<double>(doc.at("alpha"));
  grid.signed_differences = doc.value("signed_differences", false);
  if (grid.size() == 0) throw std::runtime_error("manifest: empty parameter grid");
  return grid;
}

Protocol parse_protocol(const json& doc) {
  Protocol protocol;
  const std::string type = doc.value("type", "kfold");
  if (type == "kfold")
    protocol.type = Protocol::Type::kfold_cv;
  else if (type == "holdout")
    protocol.type = Protocol::Type::holdout;
  else if (type == "train_cv")
    protocol.type = Protocol::Type::train_cv;
  else
    throw std::runtime_error("manifest: unknown protocol type '" + type + "'");
  protocol.folds = doc.value("folds", 10);
  protocol.repeats = doc.value("repeats", 10);
  protocol.train_fraction = doc.value("train_fraction", 0.75);
  protocol.holdout_seeds = doc.value("seeds", 10);
  if (protocol.folds < 2 || protocol.repeats < 1 || protocol.holdout_seeds < 1 ||
      !(protocol.train_fraction > 0.0 && protocol.train_fraction < 1.0))
    throw std::runtime_error("manifest: protocol fields out of range");
  return protocol;
}

AcceptBand parse_band(const json& doc) {
  AcceptBand band;
  if (doc.contains("min")) band.min = doc.at("min").get<double>();
  if (doc.contains("center")) band.center = doc.at("center").get<double>();
  if (doc.contains("tol")) band.tol = doc.at("tol").get<double>();
  if (!band.min && !(band.center && band.tol))
    throw std::runtime_error("manifest: accept band needs 'min' or 'center'+'tol'");
  return band;
}

}  // namespace

bool AcceptBand::contains(double accuracy) const {
  if (min && accuracy < *min) return false;
  if (center && tol && std::abs(accuracy - *center) > *tol) return false;
  return true;
}

std::string AcceptBand::describe() const {
  std::ostringstream out;
  if (min) out << ">= " << *min;
  if (center && tol) out << (min ? ", " : "") << *center << " +/- " << *tol;
  return out.str();
}

bool SuiteResult::all_ok() const {
  for (const auto& outcome : outcomes)
    if (!outcome.ok()) return false;
  return true;
}

std::vector<ExperimentConfig> load_manifest(const std::filesystem::path& path,
                                            std::vector<std::optional<AcceptBand>>* bands,
                                            std::uint64_t* master_seed_out) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw std::runtime_error("manifest parse error in " + path.string() + ": " + err.what());
  }

  const std::uint64_t master_seed = doc.value("master_seed", 1UL);
  if (master_seed_out) *master_seed_out = master_seed;
  const auto base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

  std::vector<ExperimentConfig> configs;
  for (const auto& exp : doc.at("experiments")) {
    ExperimentConfig config;
    config.name = exp.at("name").get<std::string>();
    config.dataset = parse_source(exp.at("dataset"), base_dir);
    if (exp.contains("grid"))
      config.grid = parse_grid(exp.at("grid"));
    else
      config.grid = parse_grid(exp.at("params"));
    if (exp.contains("protocol")) config.protocol = parse_protocol(exp.at("protocol"));
    config.mode = parse_mode(exp.value("mode", "growth"));
    config.scale = exp.value("scale", false);
    config.seed = derive_seed(master_seed, configs.size());
    if (bands) {
      if (exp.contains("accept"))
        bands->push_back(parse_band(exp.at("accept")));
      else
        bands->push_back(std::nullopt);
    }
    configs.push_back(std::move(config));
  }
  return configs;
}

SuiteResult run_experiment_suite(const std::filesystem::path& manifest_path) {
  SuiteResult result;
  std::vector<std::optional<AcceptBand>> bands;
  auto configs = load_manifest(manifest_path, &bands, &result.master_seed);
  result.manifest_name = manifest_path.stem().string();

  for (std::size_t i = 0; i < configs.size(); ++i) {
    ExperimentOutcome outcome;
    outcome.name = configs[i].name;
    outcome.band = bands[i];
    try {
      EvalReport report = configs[i].grid.size() == 1 ? cross_validate(configs[i])
                                                      : grid_search(configs[i]);
      if (outcome.band)
        outcome.band_ok = outcome.band->contains(report.cells[report.best_cell].mean_accuracy);
      outcome.report = std::move(report);
    } catch (const std::exception& err) {
      outcome.error = err.what();
      outcome.band_ok = false;
    }
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

namespace {

json params_json(const HyperParams& p) {
  json out = {{"k", p.k}, {"e", p.e}, {"b", p.b}, {"alpha", p.alpha}};
  if (p.signed_differences) out["signed_differences"] = true;
  return out;
}

}  // namespace

std::string suite_report_json(const SuiteResult& result) {
  json doc;
  doc["manifest"] = result.manifest_name;
  doc["master_seed"] = result.master_seed;
  json experiments = json::array();
  for (const auto& outcome : result.outcomes) {
    json e;
    e["name"] = outcome.name;
    if (!outcome.error.empty()) {
      e["status"] = "error";
      e["error"] = outcome.error;
    } else {
      e["status"] = "ok";
      const auto& report = *outcome.report;
      json cells = json::array();
      for (const auto& cell : report.cells) {
        json c;
        c["params"] = params_json(cell.params);
        c["mean_accuracy"] = cell.mean_accuracy;
        c["std_accuracy"] = cell.std_accuracy;
        c["per_fold"] = cell.per_fold;
        cells.push_back(std::move(c));
      }
      e["cells"] = std::move(cells);
      e["best_cell"] = report.best_cell;
      e["accuracy"] = report.cells[report.best_cell].mean_accuracy;
      e["classes"] = report.classes;
      json cm = json::array();
      for (const auto& row : report.cells[report.best_cell].confusion.counts) cm.push_back(row);
      e["confusion"] = std::move(cm);
    }
    if (outcome.band) {
      e["band"] = outcome.band->describe();
      e["band_ok"] = outcome.band_ok;
    }
    experiments.push_back(std::move(e));
  }
  doc["experiments"] = std::move(experiments);
  doc["all_ok"] = result.all_ok();
  return doc.dump(2) + "\n";
}

std::string suite_summary_table(const SuiteResult& result) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "experiment" << std::setw(30) << "params(best)"
      << std::setw(18) << "accuracy" << std::setw(20) << "band" << std::setw(8) << "ok"
      << "seconds\n";
  out << std::string(106, '-') << '\n';
  for (const auto& outcome : result.outcomes) {
    out << std::left << std::setw(24) << outcome.name;
    if (!outcome.error.empty()) {
      out << "ERROR: " << outcome.error << '\n';
      continue;
    }
    const auto& report = *outcome.report;
    const auto& best = report.cells[report.best_cell];
    std::ostringstream ps;
    ps << "k=" << best.params.k << " e=" << best.params.e << " b=" << best.params.b
       << " a=" << best.params.alpha;
    std::ostringstream acc;
    acc << std::fixed << std::setprecision(3) << best.mean_accuracy << " +/- " << std::setprecision(2)
        << best.std_accuracy;
    out << std::setw(30) << ps.str() << std::setw(18) << acc.str() << std::setw(20)
        << (outcome.band ? outcome.band->describe() : "-") << std::setw(8)
        << (outcome.ok() ? "yes" : "NO") << std::fixed << std::setprecision(2)
        << report.wall_seconds << '\n';
  }
  return out.str();
}

}  // namespace nbhl
