#pragma once

// JSON form of the cart controller parameters:
//   { "b": 0.188 | "physical": {"M":..,"m":..,"l":..,"I":..,"g":..},
//     "sigma0": -0.05, "mu0": 10, "r": 1000, "w1": 1.5, "phi": "const:1" }
// Omitted keys take the published defaults; unknown keys are rejected.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "matchkit/cartpole.hpp"

namespace matchkit {

/// Throws InvalidParameters on unknown keys, wrong types or a controller
/// that fails CartpoleController::validate().
CartpoleController controller_from_json(const nlohmann::json& doc);
CartpoleController load_controller(const std::filesystem::path& path);

nlohmann::json controller_to_json(const CartpoleController& ctrl);

}  // namespace matchkit
