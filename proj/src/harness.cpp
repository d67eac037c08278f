#include "tomo/harness.hpp"

#include "inversion_json.hpp"
#include "scene_json.hpp"
#include "tomo/batch.hpp"
#include "tomo/crlb.hpp"
#include "tomo/scene_config.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>

namespace tomo {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double paired_rmse(const std::vector<double>& estimates, const std::vector<double>& truths) {
  if (estimates.size() != truths.size()) {
    throw TomoError("paired_rmse needs equal counts (got " + std::to_string(estimates.size()) +
                    " estimates for " + std::to_string(truths.size()) + " truths)");
  }
  if (truths.empty() || truths.size() > 2) throw TomoError("paired_rmse supports K in {1, 2}");
  if (truths.size() == 1) return std::abs(estimates[0] - truths[0]);
  const auto rms = [](double a, double b) { return std::sqrt(0.5 * (a * a + b * b)); };
  const double direct = rms(estimates[0] - truths[0], estimates[1] - truths[1]);
  const double swapped = rms(estimates[0] - truths[1], estimates[1] - truths[0]);
  return std::min(direct, swapped);
}

double matched_rmse(std::vector<double> estimates, const std::vector<double>& truths) {
  if (estimates.empty()) throw TomoError("matched_rmse needs at least one estimate");
  while (estimates.size() < truths.size()) estimates.push_back(estimates.back());
  if (estimates.size() == truths.size()) return paired_rmse(estimates, truths);
  // More estimates than truths: best subset of the right size (K <= 2).
  double best = std::numeric_limits<double>::infinity();
  if (truths.size() == 1) {
    for (double e : estimates) best = std::min(best, std::abs(e - truths[0]));
    return best;
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    for (std::size_t j = i + 1; j < estimates.size(); ++j) {
      best = std::min(best, paired_rmse({estimates[i], estimates[j]}, truths));
    }
  }
  return best;
}

bool effective_detection(const std::vector<double>& estimates, const std::vector<double>& truths,
                         double d_s) {
  if (estimates.size() != 2 || truths.size() != 2) return false;
  const double half = 0.5 * d_s;
  const bool direct = std::abs(estimates[0] - truths[0]) < half &&
                      std::abs(estimates[1] - truths[1]) < half;
  const bool swapped = std::abs(estimates[0] - truths[1]) < half &&
                       std::abs(estimates[1] - truths[0]) < half;
  return direct || swapped;
}

std::string scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kSingleSweep: return "single_sweep";
    case Scenario::kDoubleFixedSep: return "double_fixed_sep";
    case Scenario::kSeparationSweep: return "separation_sweep";
    case Scenario::kOffgridSweep: return "offgrid_sweep";
    case Scenario::kJitterSweep: return "jitter_sweep";
    case Scenario::kBaselineCountSweep: return "baseline_count_sweep";
  }
  throw TomoError("unknown scenario");
}

namespace {

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::kSingleSweep, Scenario::kDoubleFixedSep, Scenario::kSeparationSweep,
                     Scenario::kOffgridSweep, Scenario::kJitterSweep,
                     Scenario::kBaselineCountSweep}) {
    if (scenario_name(s) == name) return s;
  }
  throw TomoError("unknown scenario '" + name +
                  "'; expected single_sweep, double_fixed_sep, separation_sweep, offgrid_sweep, "
                  "jitter_sweep or baseline_count_sweep");
}

int truth_order(const ExperimentSpec& spec) {
  switch (spec.scenario) {
    case Scenario::kSingleSweep:
    case Scenario::kOffgridSweep: return 1;
    case Scenario::kDoubleFixedSep:
    case Scenario::kSeparationSweep: return 2;
    case Scenario::kJitterSweep:
    case Scenario::kBaselineCountSweep: return spec.k;
  }
  return 1;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw TomoError(name + ": trials must be >= 1");
  if (snr_db.empty()) throw TomoError(name + ": snr_db list is empty");
  if (methods.empty()) throw TomoError(name + ": methods list is empty");
  if (k < 1 || k > 2) throw TomoError(name + ": k must be 1 or 2");
  if (!(alpha > 0.0)) throw TomoError(name + ": alpha must be > 0");
  if (amplitudes.size() < 2) throw TomoError(name + ": amplitudes needs two entries");
  for (double a : amplitudes) {
    if (!(a > 0.0)) throw TomoError(name + ": amplitudes must be > 0");
  }
  const auto need = [&](bool nonempty, const char* key) {
    if (!nonempty) throw TomoError(name + ": scenario " + scenario_name(scenario) + " needs '" + key + "'");
  };
  switch (scenario) {
    case Scenario::kSeparationSweep:
      need(!alpha_d.empty(), "alpha_d");
      for (double a : alpha_d) {
        if (!(a > 0.0)) throw TomoError(name + ": alpha_d values must be > 0");
      }
      break;
    case Scenario::kJitterSweep:
      need(!sigma_b.empty(), "sigma_b");
      for (double s : sigma_b) {
        if (!(s >= 0.0)) throw TomoError(name + ": sigma_b values must be >= 0");
      }
      break;
    case Scenario::kBaselineCountSweep:
      need(!n_baselines.empty(), "n_baselines");
      for (int n : n_baselines) {
        if (n < 2) throw TomoError(name + ": n_baselines values must be >= 2");
      }
      break;
    default: break;
  }
  inversion.validate();
}

namespace {

const std::set<std::string> kSpecKeys = {
    "name",       "scenario",     "geometry",  "snr_db",    "trials",        "rng_seed",
    "methods",    "k",            "center",    "alpha",     "alpha_d",       "sigma_b",
    "n_baselines", "offgrid_range", "amplitudes", "random_phase", "order",    "inversion"};

ExperimentSpec spec_from_json(const json& j, const std::filesystem::path& base_dir,
                              std::size_t index) {
  const std::string where = "experiment " + std::to_string(index);
  jsonu::reject_unknown_keys(j, kSpecKeys, where);
  ExperimentSpec s;
  if (j.contains("name")) s.name = jsonu::get_string(j.at("name"), "name");
  const std::string w = "experiment '" + s.name + "'";
  if (!j.contains("scenario")) throw TomoError(w + ": missing required key 'scenario'");
  s.scenario = parse_scenario(jsonu::get_string(j.at("scenario"), "scenario"));
  if (!j.contains("geometry")) throw TomoError(w + ": missing required key 'geometry'");
  const json& g = j.at("geometry");
  if (g.is_string()) {
    const auto path = base_dir / jsonu::get_string(g, "geometry");
    s.geometry = load_scene_config(path, SceneParts::kGeometryOnly).geometry;
  } else {
    jsonu::reject_unknown_keys(g, {"wavelength", "slant_range", "baselines", "baselines_uniform"},
                               w + ".geometry");
    s.geometry = geometry_from_json(g, w + ".geometry");
  }
  if (j.contains("snr_db")) {
    const json& v = j.at("snr_db");
    s.snr_db.clear();
    if (v.is_array()) {
      for (const auto& x : v) s.snr_db.push_back(jsonu::snr(x));
    } else {
      s.snr_db.push_back(jsonu::snr(v));
    }
  }
  s.trials = jsonu::optional_int(j, "trials", s.trials);
  if (j.contains("rng_seed")) s.rng_seed = jsonu::seed(j.at("rng_seed"));
  if (j.contains("methods")) {
    const json& m = j.at("methods");
    if (!m.is_array()) throw TomoError(w + ": 'methods' must be an array of names");
    s.methods.clear();
    for (const auto& x : m) s.methods.push_back(parse_method(jsonu::get_string(x, "methods")));
  }
  s.k = jsonu::optional_int(j, "k", s.k);
  s.center = jsonu::optional_number(j, "center", s.center);
  s.alpha = jsonu::optional_number(j, "alpha", s.alpha);
  if (j.contains("alpha_d")) s.alpha_d = jsonu::number_array(j.at("alpha_d"), "alpha_d");
  if (j.contains("sigma_b")) s.sigma_b = jsonu::number_array(j.at("sigma_b"), "sigma_b");
  if (j.contains("n_baselines")) s.n_baselines = jsonu::int_array(j.at("n_baselines"), "n_baselines");
  if (j.contains("offgrid_range")) s.offgrid_range = jsonu::interval(j.at("offgrid_range"), "offgrid_range");
  if (j.contains("amplitudes")) s.amplitudes = jsonu::number_array(j.at("amplitudes"), "amplitudes");
  if (j.contains("random_phase")) s.random_phase = jsonu::get_bool(j.at("random_phase"), "random_phase");
  s.estimate_order = s.scenario == Scenario::kSeparationSweep;
  if (j.contains("order")) {
    const std::string o = jsonu::get_string(j.at("order"), "order");
    if (o == "known") {
      s.estimate_order = false;
    } else if (o == "estimated") {
      s.estimate_order = true;
    } else {
      throw TomoError(w + ": 'order' must be \"known\" or \"estimated\"");
    }
  }
  if (j.contains("inversion")) s.inversion = inversion_config_from_json(j.at("inversion"), w + ".inversion");
  if (s.inversion.weights && s.inversion.weights->is_relative()) {
    s.inversion.weights = base_dir / *s.inversion.weights;
  }
  s.validate();
  return s;
}

}  // namespace

std::vector<ExperimentSpec> parse_experiments(const std::string& text,
                                              const std::filesystem::path& base_dir) {
  const json j = jsonu::parse(text, "experiment spec");
  if (!j.is_object()) throw TomoError("experiment spec must be a JSON object");
  std::vector<ExperimentSpec> out;
  if (j.contains("experiments")) {
    jsonu::reject_unknown_keys(j, {"experiments"}, "experiment spec");
    const json& list = j.at("experiments");
    if (!list.is_array() || list.empty()) throw TomoError("'experiments' must be a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) out.push_back(spec_from_json(list[i], base_dir, i));
  } else {
    out.push_back(spec_from_json(j, base_dir, 0));
  }
  return out;
}

std::vector<ExperimentSpec> load_experiments(const std::filesystem::path& path) {
  return parse_experiments(read_text_file(path), path.parent_path());
}

AcquisitionGeometry resize_geometry(const AcquisitionGeometry& nominal, int count, Rng& rng) {
  std::vector<double> b = nominal.baselines();
  std::sort(b.begin(), b.end());
  const int n0 = static_cast<int>(b.size());
  if (count < 2) throw TomoError("baseline count must be >= 2");
  std::vector<double> out;
  if (count <= n0) {
    for (int i = 0; i < count; ++i) {
      const auto idx = static_cast<std::size_t>(std::lround(static_cast<double>(i) * (n0 - 1) / (count - 1)));
      out.push_back(b[idx]);
    }
  } else {
    out = b;
    std::uniform_real_distribution<double> u(b.front(), b.back());
    for (int i = n0; i < count; ++i) out.push_back(u(rng));
    std::sort(out.begin(), out.end());
  }
  return {std::move(out), nominal.wavelength(), nominal.slant_range()};
}

namespace {

struct OperatingPoint {
  std::string param_name = "-";
  double param = kNaN;
  double snr_db = 0.0;
  double alpha = 2.0;        // separation used for K = 2 truths
  double sigma_b = 0.0;      // per-trial jitter
  std::optional<AcquisitionGeometry> geometry;  // fixed geometry of the point
};

std::vector<OperatingPoint> operating_points(const ExperimentSpec& spec, std::uint64_t seed) {
  std::vector<OperatingPoint> pts;
  const auto add_snrs = [&](OperatingPoint base) {
    for (double snr : spec.snr_db) {
      OperatingPoint p = base;
      p.snr_db = snr;
      pts.push_back(p);
    }
  };
  OperatingPoint base;
  base.alpha = spec.alpha;
  base.geometry = spec.geometry;
  switch (spec.scenario) {
    case Scenario::kSingleSweep:
    case Scenario::kDoubleFixedSep:
    case Scenario::kOffgridSweep:
      add_snrs(base);
      break;
    case Scenario::kSeparationSweep:
      for (double a : spec.alpha_d) {
        OperatingPoint p = base;
        p.param_name = "alpha_d";
        p.param = a;
        p.alpha = a;
        add_snrs(p);
      }
      break;
    case Scenario::kJitterSweep:
      for (double s : spec.sigma_b) {
        OperatingPoint p = base;
        p.param_name = "sigma_b";
        p.param = s;
        p.sigma_b = s;
        if (s > 0.0) p.geometry.reset();
        add_snrs(p);
      }
      break;
    case Scenario::kBaselineCountSweep:
      for (std::size_t i = 0; i < spec.n_baselines.size(); ++i) {
        const int n = spec.n_baselines[i];
        OperatingPoint p = base;
        p.param_name = "n";
        p.param = n;
        Rng rng(derive_seed(seed, 0x6e62ULL, i));
        p.geometry = resize_geometry(spec.geometry, n, rng);
        add_snrs(p);
      }
      break;
  }
  return pts;
}

ScattererSet nominal_truth(const ExperimentSpec& spec, const OperatingPoint& op, double rayleigh) {
  const int k = truth_order(spec);
  if (k == 1) return {Scatterer{spec.center, spec.amplitudes[0], 0.0}};
  const double half = 0.5 * op.alpha * rayleigh;
  return {Scatterer{spec.center - half, spec.amplitudes[0], 0.0},
          Scatterer{spec.center + half, spec.amplitudes[1], 0.0}};
}

struct TrialScene {
  AcquisitionGeometry geometry;
  ScattererSet scatterers;
  CVector g;
  double noise_sigma;
};

TrialScene draw_scene(const ExperimentSpec& spec, const OperatingPoint& op, double rayleigh,
                      Rng& rng) {
  AcquisitionGeometry geom = op.geometry ? *op.geometry
                                         : perturb_baselines(spec.geometry, op.sigma_b, rng);
  ScattererSet sc = nominal_truth(spec, op, rayleigh);
  if (spec.scenario == Scenario::kOffgridSweep) {
    std::uniform_real_distribution<double> u(spec.offgrid_range.lo, spec.offgrid_range.hi);
    sc[0].elevation = u(rng);
  }
  if (spec.random_phase) {
    std::uniform_real_distribution<double> ph(-kPi, kPi);
    for (auto& s : sc) s.phase = ph(rng);
  }
  const CVector x = noiseless_signal(geom, sc);
  const double var = noise_variance(x.squaredNorm() / geom.size(), op.snr_db);
  CVector g = simulate_observation(geom, sc, op.snr_db, rng);
  return {std::move(geom), std::move(sc), std::move(g), std::sqrt(var)};
}

struct MethodOutcome {
  TrialRecord record;
  double time_ms = 0.0;
};

MethodOutcome evaluate(const Inverter& inv, const TrialScene& scene, int k, bool estimate_order,
                       bool timing) {
  MethodOutcome out;
  for (const auto& s : scene.scatterers) out.record.truth.push_back(s.elevation);
  std::sort(out.record.truth.begin(), out.record.truth.end());
  PixelEstimate est;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    est = inv.invert(scene.g, estimate_order ? 0 : k, scene.noise_sigma);
    if (timing) {
      out.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }
  } catch (const TomoError&) {
    est = PixelEstimate{};
  }
  out.record.estimates = est.elevations;
  out.record.order = est.order;
  if (est.elevations.empty()) {
    out.record.failed = true;
    out.record.rmse = kNaN;
    return out;
  }
  out.record.rmse = matched_rmse(est.elevations, out.record.truth);
  if (k == 2) {
    const double d_s = out.record.truth[1] - out.record.truth[0];
    out.record.detected = effective_detection(est.elevations, out.record.truth, d_s);
  }
  return out;
}

void mean_std(const std::vector<double>& v, double& mean, double& sd) {
  if (v.empty()) {
    mean = sd = kNaN;
    return;
  }
  double s = 0.0;
  for (double x : v) s += x;
  mean = s / static_cast<double>(v.size());
  double q = 0.0;
  for (double x : v) q += (x - mean) * (x - mean);
  sd = std::sqrt(q / static_cast<double>(v.size()));
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  const int trials = options.trials.value_or(spec.trials);
  if (trials < 1) throw TomoError("trials must be >= 1");
  const std::uint64_t seed = options.seed.value_or(spec.rng_seed);
  const std::vector<Method> methods = options.methods.value_or(spec.methods);
  const int workers = options.threads > 0 ? options.threads : default_thread_count();
  const int k = truth_order(spec);
  const double rayleigh = rayleigh_resolution(spec.geometry);

  std::optional<UnfoldedModelWeights> weights;
  if (std::find(methods.begin(), methods.end(), Method::kUnfolded) != methods.end()) {
    const auto path = options.weights ? options.weights : spec.inversion.weights;
    if (!path) throw TomoError("method 'unfolded' requires weights (spec inversion.weights or --weights)");
    weights = load_weights(*path);
  }
  const UnfoldedModelWeights* wptr = weights ? &*weights : nullptr;
  InversionConfig inv_cfg = spec.inversion;
  if (weights) {
    inv_cfg.lag_grid = VirtualLagGrid{weights->n_virtual, weights->lag_spacing};
  }

  ExperimentResult result;
  const auto points = operating_points(spec, seed);
  for (std::size_t op_index = 0; op_index < points.size(); ++op_index) {
    const OperatingPoint& op = points[op_index];

    // Methods that can run at this point; fixed-geometry inverters are
    // built once here so their setup stays out of the timing.
    std::vector<Method> active;
    std::vector<std::optional<Inverter>> fixed;
    for (Method m : methods) {
      const bool jittered = !op.geometry.has_value();
      const bool ok = jittered ? m != Method::kAnmAdmm && Inverter::supports(m, spec.geometry, inv_cfg)
                               : Inverter::supports(m, *op.geometry, inv_cfg);
      if (!ok) {
        if (op.snr_db == spec.snr_db.front()) {
          result.skipped.push_back({spec.name, m, op.param_name, op.param,
                                    m == Method::kAnmAdmm ? "requires uniform baselines"
                                                          : "geometry outside the virtual lag grid"});
        }
        continue;
      }
      active.push_back(m);
      if (jittered) {
        fixed.emplace_back();
      } else {
        fixed.emplace_back(std::in_place, m, *op.geometry, inv_cfg, wptr);
      }
    }
    if (active.empty()) continue;

    std::vector<std::vector<MethodOutcome>> outcomes(static_cast<std::size_t>(trials));
    std::exception_ptr error;
#pragma omp parallel for num_threads(workers) schedule(dynamic, 8)
    for (int t = 0; t < trials; ++t) {
      try {
        Rng rng(derive_seed(seed, op_index, static_cast<std::uint64_t>(t)));
        const TrialScene scene = draw_scene(spec, op, rayleigh, rng);
        auto& row = outcomes[static_cast<std::size_t>(t)];
        for (std::size_t mi = 0; mi < active.size(); ++mi) {
          if (fixed[mi]) {
            row.push_back(evaluate(*fixed[mi], scene, k, spec.estimate_order, options.timing));
          } else {
            const Inverter inv(active[mi], scene.geometry, inv_cfg, wptr);
            row.push_back(evaluate(inv, scene, k, spec.estimate_order, options.timing));
          }
        }
      } catch (...) {
#pragma omp critical(tomo_harness_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);

    // Nominal CRLB of the operating point (phases zero, nominal geometry).
    double crlb[2] = {kNaN, kNaN};
    if (spec.scenario != Scenario::kOffgridSweep && std::isfinite(op.snr_db)) {
      try {
        const auto b = crlb_elevation(op.geometry ? *op.geometry : spec.geometry,
                                      nominal_truth(spec, op, rayleigh), op.snr_db);
        for (std::size_t i = 0; i < b.size() && i < 2; ++i) crlb[i] = b[i];
      } catch (const TomoError&) {
      }
    }

    for (std::size_t mi = 0; mi < active.size(); ++mi) {
      ResultRow row;
      row.experiment = spec.name;
      row.scenario = spec.scenario;
      row.param_name = op.param_name;
      row.param = op.param;
      row.method = active[mi];
      row.k = k;
      row.snr_db = op.snr_db;
      row.trials = trials;
      row.crlb[0] = crlb[0];
      row.crlb[1] = crlb[1];
      std::vector<double> rmses;
      std::vector<double> branch[2];
      double time_sum = 0.0;
      int detected = 0;
      for (int t = 0; t < trials; ++t) {
        const MethodOutcome& o = outcomes[static_cast<std::size_t>(t)][mi];
        time_sum += o.time_ms;
        if (o.record.detected) ++detected;
        if (o.record.failed) {
          ++row.failures;
        } else {
          rmses.push_back(o.record.rmse);
          std::vector<double> e = o.record.estimates;
          while (static_cast<int>(e.size()) < k) e.push_back(e.back());
          std::sort(e.begin(), e.end());
          if (static_cast<int>(e.size()) == k) {
            for (int b = 0; b < k; ++b) branch[b].push_back(e[static_cast<std::size_t>(b)]);
          }
        }
        if (options.keep_trials) row.records.push_back(o.record);
      }
      row.pd = k == 2 ? static_cast<double>(detected) / trials : kNaN;
      mean_std(rmses, row.rmse_mean, row.rmse_std);
      double sq = 0.0;
      for (double r : rmses) sq += r * r;
      row.rmse_rms = rmses.empty() ? kNaN : std::sqrt(sq / static_cast<double>(rmses.size()));
      for (int b = 0; b < 2; ++b) {
        if (b < k) {
          mean_std(branch[b], row.est_mean[b], row.est_std[b]);
        } else {
          row.est_mean[b] = row.est_std[b] = kNaN;
        }
      }
      if (k == 2 && !(row.pd > 0.4)) {
        row.rmse_mean = row.rmse_std = row.rmse_rms = kNaN;
        for (int b = 0; b < 2; ++b) row.est_mean[b] = row.est_std[b] = kNaN;
      }
      row.time_ms = options.timing ? time_sum / trials : kNaN;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

namespace {

std::string num(double v, const char* spec = "%.6f") {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string param_text(const std::string& name, double v) {
  if (name == "-") return "-";
  if (name == "n") return std::to_string(static_cast<long long>(v));
  return num(v, "%.4g");
}

json num_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

void write_result_table(const ExperimentResult& result, std::ostream& out) {
  out << "experiment\tscenario\tparam_name\tparam\tmethod\tk\tsnr_db\ttrials\tfailures\t"
         "rmse_mean\trmse_std\trmse_rms\tpd\test1_mean\test1_std\test2_mean\test2_std\t"
         "crlb1\tcrlb2\ttime_ms_per_pixel\n";
  for (const auto& r : result.rows) {
    out << r.experiment << '\t' << scenario_name(r.scenario) << '\t' << r.param_name << '\t'
        << param_text(r.param_name, r.param) << '\t' << method_name(r.method) << '\t' << r.k << '\t'
        << num(r.snr_db, "%g") << '\t' << r.trials << '\t' << r.failures << '\t'
        << num(r.rmse_mean) << '\t' << num(r.rmse_std) << '\t' << num(r.rmse_rms) << '\t'
        << (std::isnan(r.pd) ? std::string("-") : num(r.pd, "%.4f")) << '\t'
        << num(r.est_mean[0]) << '\t' << num(r.est_std[0]) << '\t' << num(r.est_mean[1]) << '\t'
        << num(r.est_std[1]) << '\t' << num(r.crlb[0]) << '\t' << num(r.crlb[1]) << '\t'
        << (std::isnan(r.time_ms) ? std::string("-") : num(r.time_ms, "%.4f")) << '\n';
  }
}

void write_result_summary(const ExperimentResult& result, const std::vector<ExperimentSpec>& specs,
                          std::ostream& out) {
  json j;
  j["format"] = "tomo-benchmark-summary";
  j["format_version"] = 1;
  json exps = json::array();
  for (const auto& s : specs) {
    json methods = json::array();
    for (Method m : s.methods) methods.push_back(method_name(m));
    exps.push_back(json{{"name", s.name},
                        {"scenario", scenario_name(s.scenario)},
                        {"trials", s.trials},
                        {"rng_seed", s.rng_seed},
                        {"methods", methods},
                        {"order", s.estimate_order ? "estimated" : "known"}});
  }
  j["experiments"] = exps;
  json rows = json::array();
  for (const auto& r : result.rows) {
    json row{{"experiment", r.experiment},
             {"scenario", scenario_name(r.scenario)},
             {"param_name", r.param_name},
             {"param", num_json(r.param)},
             {"method", method_name(r.method)},
             {"k", r.k},
             {"snr_db", num_json(r.snr_db)},
             {"trials", r.trials},
             {"failures", r.failures},
             {"rmse_mean", num_json(r.rmse_mean)},
             {"rmse_std", num_json(r.rmse_std)},
             {"rmse_rms", num_json(r.rmse_rms)},
             {"pd", num_json(r.pd)},
             {"est_mean", {num_json(r.est_mean[0]), num_json(r.est_mean[1])}},
             {"est_std", {num_json(r.est_std[0]), num_json(r.est_std[1])}},
             {"crlb", {num_json(r.crlb[0]), num_json(r.crlb[1])}},
             {"time_ms_per_pixel", num_json(r.time_ms)}};
    rows.push_back(std::move(row));
  }
  j["rows"] = rows;
  json skipped = json::array();
  for (const auto& s : result.skipped) {
    skipped.push_back(json{{"experiment", s.experiment},
                           {"method", method_name(s.method)},
                           {"param_name", s.param_name},
                           {"param", num_json(s.param)},
                           {"reason", s.reason}});
  }
  j["skipped"] = skipped;
  out << j.dump(2) << '\n';
}

void write_trial_table(const ExperimentResult& result, std::ostream& out) {
  out << "experiment\tparam\tmethod\tsnr_db\ttrial\ttruth1\ttruth2\torder\test1\test2\trmse\tdetected\n";
  for (const auto& r : result.rows) {
    for (std::size_t t = 0; t < r.records.size(); ++t) {
      const auto& rec = r.records[t];
      const auto at = [](const std::vector<double>& v, std::size_t i) {
        return i < v.size() ? num(v[i]) : std::string("nan");
      };
      out << r.experiment << '\t' << param_text(r.param_name, r.param) << '\t'
          << method_name(r.method) << '\t' << num(r.snr_db, "%g") << '\t' << t << '\t'
          << at(rec.truth, 0) << '\t' << at(rec.truth, 1) << '\t' << rec.order << '\t'
          << at(rec.estimates, 0) << '\t' << at(rec.estimates, 1) << '\t' << num(rec.rmse) << '\t'
          << (rec.detected ? 1 : 0) << '\n';
    }
  }
}

}  // namespace tomo
