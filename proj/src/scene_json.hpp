#pragma once

// Private: geometry block shared by scene configs and experiment specs.

#include "json_util.hpp"
#include "tomo/core_model.hpp"

namespace tomo {

/// Reads wavelength, slant_range and baselines | baselines_uniform from an
/// object; other keys are left to the caller.
[[nodiscard]] AcquisitionGeometry geometry_from_json(const json& j, const std::string& where);

}  // namespace tomo
