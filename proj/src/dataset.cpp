#include "nbhl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "nbhl/rng.hpp"

namespace nbhl {

void Dataset::add(Instance inst) {
  if (inst.label && class_index(*inst.label) < 0) classes.push_back(*inst.label);
  instances.push_back(std::move(inst));
}

int Dataset::class_index(const std::string& label) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == label) return static_cast<int>(i);
  return -1;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (const auto& inst : instances)
    if (inst.label) ++counts[static_cast<std::size_t>(class_index(*inst.label))];
  return counts;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end && std::isfinite(out);
}

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_numbers;  // 1-based line numbers for error reporting
};

RawCsv read_rows(const std::filesystem::path& path, bool header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path.string());
  RawCsv raw;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (header_pending) {
      raw.header = std::move(cells);
      header_pending = false;
      continue;
    }
    if (!raw.rows.empty() && cells.size() != raw.rows.front().size())
      throw std::runtime_error("row " + std::to_string(line_no) + ": expected " +
                               std::to_string(raw.rows.front().size()) + " columns, got " +
                               std::to_string(cells.size()));
    raw.rows.push_back(std::move(cells));
    raw.row_numbers.push_back(line_no);
  }
  return raw;
}

std::size_t resolve_label_column(const std::string& label_column, const RawCsv& raw,
                                 std::size_t ncols) {
  int index = 0;
  const char* begin = label_column.data();
  const char* end = begin + label_column.size();
  auto [ptr, ec] = std::from_chars(begin, end, index);
  if (ec == std::errc{} && ptr == end) {
    if (index < 0) index += static_cast<int>(ncols);
    if (index < 0 || static_cast<std::size_t>(index) >= ncols)
      throw std::runtime_error("label column index " + label_column + " out of range (columns: " +
                               std::to_string(ncols) + ")");
    return static_cast<std::size_t>(index);
  }
  for (std::size_t i = 0; i < raw.header.size(); ++i)
    if (raw.header[i] == label_column) return i;
  throw std::runtime_error("label column '" + label_column + "' not found" +
                           (raw.header.empty() ? " (file has no header)" : ""));
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column, bool header) {
  RawCsv raw = read_rows(path, header);
  if (raw.rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  const std::size_t ncols = raw.rows.front().size();
  if (ncols < 2) throw std::runtime_error(path.string() + ": rows need at least one feature and a label");
  const std::size_t label_idx = resolve_label_column(label_column, raw, ncols);

  Dataset ds;
  ds.name = path.stem().string();
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    const auto& cells = raw.rows[r];
    Instance inst;
    inst.features.reserve(ncols - 1);
    for (std::size_t c = 0; c < ncols; ++c) {
      if (c == label_idx) {
        if (cells[c].empty())
          throw std::runtime_error("row " + std::to_string(raw.row_numbers[r]) + ": missing label");
        inst.label = cells[c];
        continue;
      }
      double v = 0.0;
      if (!parse_double(cells[c], v))
        throw std::runtime_error("row " + std::to_string(raw.row_numbers[r]) + ", column " +
                                 std::to_string(c + 1) + ": cannot parse '" + cells[c] +
                                 "' as a number");
      inst.features.push_back(v);
    }
    ds.add(std::move(inst));
  }
  return ds;
}

std::vector<Instance> load_unlabeled_csv(const std::filesystem::path& path, bool header) {
  RawCsv raw = read_rows(path, header);
  std::vector<Instance> out;
  out.reserve(raw.rows.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) {
    Instance inst;
    inst.features.reserve(raw.rows[r].size());
    for (std::size_t c = 0; c < raw.rows[r].size(); ++c) {
      double v = 0.0;
      if (!parse_double(raw.rows[r][c], v))
        throw std::runtime_error("row " + std::to_string(raw.row_numbers[r]) + ", column " +
                                 std::to_string(c + 1) + ": cannot parse '" + raw.rows[r][c] +
                                 "' as a number");
      inst.features.push_back(v);
    }
    out.push_back(std::move(inst));
  }
  return out;
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (const auto& inst : ds.instances) {
    for (std::size_t i = 0; i < inst.features.size(); ++i) {
      if (i) out << ',';
      out << format_double(inst.features[i]);
    }
    out << ',' << (inst.label ? *inst.label : "") << '\n';
  }
}

namespace {

constexpr double kPi = 3.14159265358979323846;

void add_noise(Dataset& ds, double noise, Rng& rng) {
  if (noise <= 0.0) return;
  for (auto& inst : ds.instances)
    for (auto& f : inst.features) f += noise * rng.next_gaussian();
}

}  // namespace

Dataset generate_moons(std::size_t n, double noise, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_moons: n must be at least 2");
  if (noise < 0.0) throw std::invalid_argument("generate_moons: noise must be non-negative");
  const std::size_t n_outer = (n + 1) / 2;
  const std::size_t n_inner = n / 2;
  Dataset ds;
  ds.name = "moons";
  for (std::size_t i = 0; i < n_outer; ++i) {
    const double t = n_outer > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n_outer - 1) : 0.0;
    ds.add({{std::cos(t), std::sin(t)}, "0"});
  }
  for (std::size_t i = 0; i < n_inner; ++i) {
    const double t = n_inner > 1 ? kPi * static_cast<double>(i) / static_cast<double>(n_inner - 1) : 0.0;
    ds.add({{1.0 - std::cos(t), 0.5 - std::sin(t)}, "1"});
  }
  Rng rng(seed);
  add_noise(ds, noise, rng);
  return ds;
}

Dataset generate_circles(std::size_t n, double noise, double inner_radius_ratio,
                         std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_circles: n must be at least 2");
  if (noise < 0.0) throw std::invalid_argument("generate_circles: noise must be non-negative");
  if (!(inner_radius_ratio > 0.0 && inner_radius_ratio < 1.0))
    throw std::invalid_argument("generate_circles: inner radius ratio must lie in (0,1)");
  const std::size_t n_outer = (n + 1) / 2;
  const std::size_t n_inner = n / 2;
  Dataset ds;
  ds.name = "circles";
  for (std::size_t i = 0; i < n_outer; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_outer);
    ds.add({{std::cos(t), std::sin(t)}, "0"});
  }
  for (std::size_t i = 0; i < n_inner; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n_inner);
    ds.add({{inner_radius_ratio * std::cos(t), inner_radius_ratio * std::sin(t)}, "1"});
  }
  Rng rng(seed);
  add_noise(ds, noise, rng);
  return ds;
}

namespace {

// Per-class index lists in class declaration order; shuffled with the seed so
// assignments are deterministic. Instances inside each output dataset keep
// ascending original order.
std::vector<std::vector<std::size_t>> class_buckets(const Dataset& ds) {
  std::vector<std::vector<std::size_t>> buckets(ds.classes.size());
  for (std::size_t i = 0; i < ds.instances.size(); ++i) {
    const auto& inst = ds.instances[i];
    if (!inst.label) throw std::invalid_argument("split: every instance must be labeled");
    buckets[static_cast<std::size_t>(ds.class_index(*inst.label))].push_back(i);
  }
  return buckets;
}

Dataset subset(const Dataset& ds, std::vector<std::size_t> indices, const std::string& suffix) {
  std::sort(indices.begin(), indices.end());
  Dataset out;
  out.name = ds.name + suffix;
  for (std::size_t i : indices) out.add(ds.instances[i]);
  return out;
}

}  // namespace

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, const SplitSpec& spec) {
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw std::invalid_argument("stratified_split: train_fraction must lie in (0,1)");
  auto buckets = class_buckets(ds);
  for (std::size_t c = 0; c < buckets.size(); ++c)
    if (buckets[c].size() < 2)
      throw std::invalid_argument("stratified_split: class '" + ds.classes[c] +
                                  "' has fewer than 2 instances");

  Rng rng(spec.seed);
  std::vector<std::size_t> train_idx, test_idx;

  if (spec.stratified) {
    // Total train size rounds half up; per-class counts start at the floor of
    // the class target and the remainder goes to the largest fractional parts.
    const std::size_t total = ds.size();
    std::size_t n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(total) + 0.5));
    n_train = std::clamp<std::size_t>(n_train, buckets.size(), total - buckets.size());

    std::vector<std::size_t> take(buckets.size());
    std::vector<std::pair<double, std::size_t>> fracs;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < buckets.size(); ++c) {
      const double target = spec.train_fraction * static_cast<double>(buckets[c].size());
      take[c] = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(target)), 1,
                                        buckets[c].size() - 1);
      assigned += take[c];
      fracs.push_back({target - std::floor(target), c});
    }
    std::stable_sort(fracs.begin(), fracs.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [frac, c] : fracs) {
      if (assigned >= n_train) break;
      if (take[c] < buckets[c].size() - 1) {
        ++take[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < buckets.size(); ++c) {
      rng.shuffle(buckets[c]);
      for (std::size_t i = 0; i < buckets[c].size(); ++i)
        (i < take[c] ? train_idx : test_idx).push_back(buckets[c][i]);
    }
  } else {
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    const std::size_t n_train = static_cast<std::size_t>(
        std::floor(spec.train_fraction * static_cast<double>(ds.size()) + 0.5));
    for (std::size_t i = 0; i < all.size(); ++i)
      (i < n_train ? train_idx : test_idx).push_back(all[i]);
  }

  auto train = subset(ds, train_idx, "");
  auto test = subset(ds, test_idx, "");
  if (train.classes.size() != ds.classes.size())
    throw std::invalid_argument("split: some class received no training instances");
  return {std::move(train), std::move(test)};
}

std::vector<std::pair<Dataset, Dataset>> kfold(const Dataset& ds, std::size_t folds,
                                               std::uint64_t seed, bool stratified) {
  if (folds < 2) throw std::invalid_argument("kfold: need at least 2 folds");
  if (ds.size() < folds) throw std::invalid_argument("kfold: more folds than instances");

  std::vector<std::vector<std::size_t>> fold_test(folds);
  Rng rng(seed);

  if (stratified) {
    auto buckets = class_buckets(ds);
    for (std::size_t c = 0; c < buckets.size(); ++c) {
      if (buckets[c].size() < folds)
        throw std::invalid_argument("kfold: class '" + ds.classes[c] + "' has " +
                                    std::to_string(buckets[c].size()) + " instances, fewer than " +
                                    std::to_string(folds) + " folds");
      rng.shuffle(buckets[c]);
      for (std::size_t i = 0; i < buckets[c].size(); ++i)
        fold_test[i % folds].push_back(buckets[c][i]);
    }
  } else {
    std::vector<std::size_t> all(ds.size());
    std::iota(all.begin(), all.end(), 0);
    rng.shuffle(all);
    for (std::size_t i = 0; i < all.size(); ++i) fold_test[i % folds].push_back(all[i]);
  }

  std::vector<std::pair<Dataset, Dataset>> out;
  out.reserve(folds);
  std::vector<bool> in_test(ds.size());
  for (std::size_t f = 0; f < folds; ++f) {
    std::fill(in_test.begin(), in_test.end(), false);
    for (std::size_t i : fold_test[f]) in_test[i] = true;
    std::vector<std::size_t> train_idx;
    train_idx.reserve(ds.size() - fold_test[f].size());
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (!in_test[i]) train_idx.push_back(i);
    out.emplace_back(subset(ds, train_idx, ""), subset(ds, fold_test[f], ""));
  }
  return out;
}

void ScalingMap::apply(Instance& inst) const {
  if (inst.features.size() != ranges.size())
    throw std::invalid_argument("scaling: dimension mismatch");
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const double span = ranges[i].max - ranges[i].min;
    inst.features[i] = span > 0.0 ? (inst.features[i] - ranges[i].min) / span : 0.0;
  }
}

void ScalingMap::apply(Dataset& ds) const {
  for (auto& inst : ds.instances) apply(inst);
}

ScalingMap fit_min_max(const Dataset& train) {
  if (train.instances.empty()) throw std::invalid_argument("fit_min_max: empty training data");
  ScalingMap map;
  map.ranges.assign(train.dim(), {});
  for (std::size_t i = 0; i < train.dim(); ++i) {
    double lo = train.instances.front().features[i];
    double hi = lo;
    for (const auto& inst : train.instances) {
      lo = std::min(lo, inst.features[i]);
      hi = std::max(hi, inst.features[i]);
    }
    map.ranges[i] = {lo, hi};
  }
  return map;
}

ScaledData min_max_scale(const Dataset& train, const std::vector<Dataset>& others) {
  ScaledData out{train, others, fit_min_max(train)};
  out.map.apply(out.train);
  for (auto& ds : out.others) out.map.apply(ds);
  return out;
}

}  // namespace nbhl
