#include "tomo/scene_config.hpp"

#include "scene_json.hpp"

#include <fstream>
#include <sstream>

namespace tomo {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TomoError("cannot open file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

const std::set<std::string> kSceneKeys = {
    "wavelength",     "slant_range",  "baselines",       "baselines_uniform",
    "baseline_jitter", "scatterers",  "snr_db",          "rng_seed",
    "pixels",         "random_phase", "reference_power", "admissible_elevation",
    "k_max"};

std::vector<double> parse_baselines(const json& j) {
  const bool explicit_list = j.contains("baselines");
  const bool uniform = j.contains("baselines_uniform");
  if (explicit_list == uniform) {
    throw TomoError("exactly one of 'baselines' or 'baselines_uniform' is required");
  }
  if (explicit_list) return jsonu::number_array(j.at("baselines"), "baselines");

  const json& u = j.at("baselines_uniform");
  jsonu::reject_unknown_keys(u, {"min", "max", "count"}, "baselines_uniform");
  const double lo = jsonu::required_number(u, "min", "baselines_uniform");
  const double hi = jsonu::required_number(u, "max", "baselines_uniform");
  const int count = jsonu::required_int(u, "count", "baselines_uniform");
  if (count < 2) throw TomoError("baselines_uniform.count must be >= 2");
  std::vector<double> b(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    b[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  b.front() = lo;
  b.back() = hi;
  return b;
}

ScattererSet parse_scatterers(const json& j) {
  if (!j.is_array()) throw TomoError("'scatterers' must be an array");
  ScattererSet out;
  for (const auto& item : j) {
    jsonu::reject_unknown_keys(item, {"elevation", "amplitude", "phase"}, "scatterers[]");
    Scatterer s;
    s.elevation = jsonu::required_number(item, "elevation", "scatterers[]");
    s.amplitude = jsonu::optional_number(item, "amplitude", 1.0);
    s.phase = jsonu::optional_number(item, "phase", 0.0);
    out.push_back(s);
  }
  return out;
}

}  // namespace

AcquisitionGeometry geometry_from_json(const json& j, const std::string& where) {
  const double wavelength = jsonu::required_number(j, "wavelength", where);
  const double slant_range = jsonu::required_number(j, "slant_range", where);
  return {parse_baselines(j), wavelength, slant_range};
}

SceneConfig parse_scene_config(const std::string& text, SceneParts parts) {
  const json j = jsonu::parse(text, "scene config");
  if (!j.is_object()) throw TomoError("scene config must be a JSON object");
  jsonu::reject_unknown_keys(j, kSceneKeys, "scene config");

  AcquisitionGeometry geometry = geometry_from_json(j, "scene config");

  SceneConfig cfg{std::move(geometry), {}, {}, 0.0, 1, false, std::nullopt};
  cfg.baseline_jitter = jsonu::optional_number(j, "baseline_jitter", 0.0);
  if (cfg.baseline_jitter < 0.0) throw TomoError("baseline_jitter must be >= 0");
  cfg.pixels = jsonu::optional_int(j, "pixels", 1);
  if (cfg.pixels < 1) throw TomoError("pixels must be >= 1");
  cfg.random_phase = j.contains("random_phase") ? jsonu::get_bool(j.at("random_phase"), "random_phase")
                                                : false;
  if (j.contains("reference_power")) {
    cfg.reference_power = jsonu::required_number(j, "reference_power", "scene config");
    if (!(*cfg.reference_power > 0.0)) throw TomoError("reference_power must be > 0");
  }
  if (j.contains("admissible_elevation")) {
    cfg.run.admissible_elevation = jsonu::interval(j.at("admissible_elevation"), "admissible_elevation");
  }
  cfg.run.k_max = jsonu::optional_int(j, "k_max", 2);
  cfg.run.validate();

  const bool need_scene = parts == SceneParts::kFullScene;
  if (need_scene || j.contains("scatterers")) {
    if (!j.contains("scatterers")) throw TomoError("scene config: missing required key 'scatterers'");
    cfg.scatterers = parse_scatterers(j.at("scatterers"));
    validate_scatterers(cfg.scatterers, cfg.run.admissible_elevation, cfg.run.k_max);
  }
  if (need_scene || j.contains("snr_db")) {
    if (!j.contains("snr_db")) throw TomoError("scene config: missing required key 'snr_db'");
    cfg.run.snr_db = jsonu::snr(j.at("snr_db"));
  }
  if (need_scene || j.contains("rng_seed")) {
    if (!j.contains("rng_seed")) throw TomoError("scene config: missing required key 'rng_seed'");
    cfg.run.rng_seed = jsonu::seed(j.at("rng_seed"));
  }
  return cfg;
}

SceneConfig load_scene_config(const std::filesystem::path& path, SceneParts parts) {
  return parse_scene_config(read_text_file(path), parts);
}

}  // namespace tomo
