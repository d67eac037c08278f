#pragma once

// Private: lets the experiment-spec reader parse an inline inversion block.

#include "json_util.hpp"
#include "tomo/inversion.hpp"

namespace tomo {

[[nodiscard]] InversionConfig inversion_config_from_json(const json& j, const std::string& where);

}  // namespace tomo
