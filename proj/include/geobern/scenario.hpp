#pragma once

#include <filesystem>
#include <string>

#include "geobern/bench.hpp"

namespace geobern {

/// Fixed 12-obstacle 2D layout: centers uniform in [-10, 10]^2, radii in
/// [0.5, 1.5], drawn from seed 20250901; A = 1000, kappa = 10.
Scenario canned_scenario_2d();

/// Fixed 15-obstacle 3D layout from the same documented seed, centers in
/// [-3, 3]^3 with a tight enclosure (random chords of a sphere concentrate
/// near 0.7 R, so a denser cloud is needed for them to meet obstacles).
Scenario canned_scenario_3d();

/// Parse a scenario config (JSON). Unknown keys are rejected so typos fail
/// loudly. Throws std::invalid_argument with a parse diagnostic.
Scenario parse_scenario(const std::string& json_text);

/// Load a scenario file; the names "canned-2d" and "canned-3d" resolve to the
/// built-in layouts without touching the filesystem.
Scenario load_scenario(const std::string& path_or_name);

/// Serialize a scenario back to config JSON (obstacles written explicitly).
std::string scenario_to_json(const Scenario& scenario);

}  // namespace geobern
