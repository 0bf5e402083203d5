#pragma once

#include <string>

#include "alipmpc/simulator.hpp"

namespace alipmpc {

/// Applies the fields present in a JSON document on top of `base`. Every
/// field is optional; the schema is documented in the README.
SimConfig sim_config_from_json(const std::string& text, SimConfig base);

SimConfig load_sim_config(const std::string& path, SimConfig base);

std::string sim_config_to_json(const SimConfig& cfg);

}  // namespace alipmpc
