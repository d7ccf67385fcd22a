#pragma once

#include <filesystem>

#include "json.hpp"
#include "proxweb/simulator/simulator.hpp"

namespace proxweb::simulator {

using json = nlohmann::ordered_json;

// Shape or value problems throw Error{InvalidScenario} with the field path.
Scenario scenario_from_json(const json& j);
json to_json(const Scenario& scenario);
json to_json(const PropagationParams& params);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace proxweb::simulator
