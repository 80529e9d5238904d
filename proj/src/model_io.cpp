#include "nbhl/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nbhl {

namespace {
using json = nlohmann::json;
constexpr const char* kFormatTag = "nbhl-model";
constexpr int kFormatVersion = 1;
}  // namespace

std::string model_to_json(const TrainedModel& model) {
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["params"] = {{"k", model.params.k},
                   {"e", model.params.e},
                   {"b", model.params.b},
                   {"alpha", model.params.alpha},
                   {"signed_differences", model.params.signed_differences}};
  doc["classes"] = model.classes;
  doc["epsilon"] = {{"per_class", model.class_epsilon}, {"global", model.global_epsilon}};
  doc["base_node_count"] = model.base_node_count;

  if (model.scaling) {
    json mins = json::array(), maxs = json::array();
    for (const auto& r : model.scaling->ranges) {
      mins.push_back(r.min);
      maxs.push_back(r.max);
    }
    doc["scaling"] = {{"min", mins}, {"max", maxs}};
  } else {
    doc["scaling"] = nullptr;
  }

  json nodes = json::array();
  for (std::size_t i = 0; i < model.nodes.size(); ++i)
    nodes.push_back({{"features", model.nodes[i].features}, {"class", model.node_class[i]}});
  doc["nodes"] = std::move(nodes);

  json comps = json::array();
  for (const auto& comp : model.components) {
    json edges = json::array();
    for (std::size_t l = 0; l < comp.adjacency.size(); ++l)
      for (int nb : comp.adjacency[l])
        if (static_cast<int>(l) < nb)
          edges.push_back({comp.node_ids[l], comp.node_ids[nb]});
    comps.push_back(
        {{"class", comp.class_id}, {"node_ids", comp.node_ids}, {"edges", std::move(edges)}});
  }
  doc["components"] = std::move(comps);
  return doc.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (doc.value("format", "") != kFormatTag)
    throw std::runtime_error("model file: missing or wrong format tag");
  if (doc.value("version", 0) != kFormatVersion)
    throw std::runtime_error("model file: unsupported version");

  TrainedModel model;
  const auto& p = doc.at("params");
  model.params.k = p.at("k").get<int>();
  model.params.e = p.at("e").get<double>();
  model.params.b = p.at("b").get<int>();
  model.params.alpha = p.at("alpha").get<double>();
  model.params.signed_differences = p.value("signed_differences", false);
  model.params.validate();

  model.classes = doc.at("classes").get<std::vector<std::string>>();
  model.class_epsilon = doc.at("epsilon").at("per_class").get<std::vector<double>>();
  model.global_epsilon = doc.at("epsilon").at("global").get<double>();
  model.base_node_count = doc.at("base_node_count").get<int>();

  if (!doc.at("scaling").is_null()) {
    ScalingMap map;
    auto mins = doc["scaling"].at("min").get<std::vector<double>>();
    auto maxs = doc["scaling"].at("max").get<std::vector<double>>();
    if (mins.size() != maxs.size()) throw std::runtime_error("model file: malformed scaling");
    for (std::size_t i = 0; i < mins.size(); ++i) map.ranges.push_back({mins[i], maxs[i]});
    model.scaling = std::move(map);
  }

  for (const auto& node : doc.at("nodes")) {
    Instance inst;
    inst.features = node.at("features").get<std::vector<double>>();
    const int ci = node.at("class").get<int>();
    if (ci < 0 || ci >= static_cast<int>(model.classes.size()))
      throw std::runtime_error("model file: node class index out of range");
    inst.label = model.classes[ci];
    model.node_class.push_back(ci);
    model.nodes.push_back(std::move(inst));
  }

  model.node_local.assign(model.nodes.size(), -1);
  for (const auto& comp_doc : doc.at("components")) {
    ClassComponent comp;
    comp.class_id = comp_doc.at("class").get<std::string>();
    comp.node_ids = comp_doc.at("node_ids").get<std::vector<int>>();
    comp.adjacency.assign(comp.node_ids.size(), {});
    for (std::size_t l = 0; l < comp.node_ids.size(); ++l) {
      const int id = comp.node_ids[l];
      if (id < 0 || id >= static_cast<int>(model.nodes.size()))
        throw std::runtime_error("model file: component node id out of range");
      model.node_local[id] = static_cast<int>(l);
    }
    for (const auto& edge : comp_doc.at("edges")) {
      const int a = edge.at(0).get<int>();
      const int b = edge.at(1).get<int>();
      const int la = model.node_local.at(a);
      const int lb = model.node_local.at(b);
      comp.adjacency[la].push_back(lb);
      comp.adjacency[lb].push_back(la);
    }
    for (auto& nbrs : comp.adjacency) std::sort(nbrs.begin(), nbrs.end());
    model.components.push_back(std::move(comp));
  }
  if (model.components.size() != model.classes.size())
    throw std::runtime_error("model file: component/class count mismatch");
  return model;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path.string());
  out << model_to_json(model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace nbhl
