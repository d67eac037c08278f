#pragma once

#include "tomo/core_model.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace tomo {

/// Parsed geometry/scene configuration file.
///
/// The file is a JSON object. Recognized keys:
///
///   wavelength            number, meters (required)
///   slant_range           number, meters (required)
///   baselines             array of numbers, meters
///   baselines_uniform     {"min": m, "max": m, "count": n}
///                         (exactly one of baselines / baselines_uniform)
///   baseline_jitter       number >= 0, sigma of interior baseline jitter
///   scatterers            array of {"elevation", "amplitude", "phase"}
///   snr_db                number or the string "inf"
///   rng_seed              non-negative integer
///   pixels                positive integer, number of noise realizations
///   random_phase          bool; redraw scatterer phases per pixel
///   reference_power       number > 0; noise reference for empty scenes
///   admissible_elevation  [lo, hi] in meters (default [-100, 100])
///   k_max                 1 or 2 (default 2)
///
/// Any other key is rejected.
struct SceneConfig {
  AcquisitionGeometry geometry;
  ScattererSet scatterers;
  RunConfig run;
  double baseline_jitter = 0.0;
  int pixels = 1;
  bool random_phase = false;
  std::optional<double> reference_power;
};

enum class SceneParts {
  kGeometryOnly,  ///< only geometry keys are required
  kFullScene,     ///< scatterers, snr_db and rng_seed are required too
};

[[nodiscard]] SceneConfig parse_scene_config(const std::string& text,
                                             SceneParts parts = SceneParts::kFullScene);

[[nodiscard]] SceneConfig load_scene_config(const std::filesystem::path& path,
                                            SceneParts parts = SceneParts::kFullScene);

/// Reads a whole text file; throws TomoError naming the path on failure.
[[nodiscard]] std::string read_text_file(const std::filesystem::path& path);

}  // namespace tomo
