#pragma once

#include <filesystem>
#include <string>

#include "nbhl/graph.hpp"

namespace nbhl {

// Self-describing JSON model document: format tag, params, scaling, class
// node lists, edge lists, epsilon values. Loading reproduces classification
// decisions bit-for-bit (doubles are emitted in shortest round-trip form).
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace nbhl
