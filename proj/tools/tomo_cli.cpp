// Command-line front end: simulate, invert, benchmark, inspect-weights,
// export-embedding, init-weights.

#include "tomo/batch.hpp"
#include "tomo/harness.hpp"
#include "tomo/inversion.hpp"
#include "tomo/lag_embedding.hpp"
#include "tomo/observation_io.hpp"
#include "tomo/scene_config.hpp"
#include "tomo/unfolded.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace tomo;

constexpr int kExitError = 1;
constexpr int kExitCoverage = 3;

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw TomoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void require_readable(const std::filesystem::path& path, const char* what) {
  if (!std::filesystem::is_regular_file(path)) {
    throw TomoError(std::string(what) + " '" + path.string() + "' does not exist");
  }
}

void require_writable_dir(const std::filesystem::path& path) {
  const auto dir = path.parent_path();
  if (!dir.empty() && !std::filesystem::is_directory(dir)) {
    throw TomoError("output directory '" + dir.string() + "' does not exist");
  }
}

struct SimulateArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::optional<double> snr;
};

int cmd_simulate(const SimulateArgs& a) {
  require_readable(a.config, "scene config");
  require_writable_dir(a.out);
  const SceneConfig cfg = load_scene_config(a.config);
  const std::uint64_t seed = a.seed.value_or(cfg.run.rng_seed);
  const double snr = a.snr.value_or(cfg.run.snr_db);

  AcquisitionGeometry geometry = cfg.geometry;
  if (cfg.baseline_jitter > 0.0) {
    Rng rng(derive_seed(seed, 0x6a6974ULL));
    geometry = perturb_baselines(geometry, cfg.baseline_jitter, rng);
  }
  ObservationSet set{geometry, snr, seed, {}};
  for (int p = 0; p < cfg.pixels; ++p) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    ScattererSet sc = cfg.scatterers;
    if (cfg.random_phase) {
      std::uniform_real_distribution<double> ph(-kPi, kPi);
      for (auto& s : sc) s.phase = ph(rng);
    }
    set.pixels.push_back(simulate_observation(geometry, sc, snr, rng, cfg.reference_power));
  }
  auto out = open_output(a.out);
  write_observations(set, out);
  return 0;
}

struct InvertArgs {
  std::string observations, method = "gridless", out;
  std::optional<std::string> weights, config;
  int threads = 0;
  int order = 0;
};

int cmd_invert(const InvertArgs& a) {
  const Method method = parse_method(a.method);
  require_readable(a.observations, "observation file");
  require_writable_dir(a.out);
  if (method == Method::kUnfolded && !a.weights) {
    throw CLI::ValidationError("--weights", "method 'unfolded' requires --weights");
  }
  InversionConfig cfg = a.config ? load_inversion_config(*a.config) : InversionConfig{};
  std::optional<UnfoldedModelWeights> weights;
  if (method == Method::kUnfolded) weights = load_weights(*a.weights);

  const ObservationSet set = load_observations(a.observations);
  const Inverter inverter(method, set.geometry, cfg, weights ? &*weights : nullptr);
  std::vector<double> sigma;
  for (const auto& g : set.pixels) sigma.push_back(implied_noise_sigma(g, set.snr_db));
  const auto estimates = invert_batch(inverter, set.pixels, a.order, sigma, a.threads);
  auto out = open_output(a.out);
  write_estimates(estimates, out);
  return 0;
}

struct BenchmarkArgs {
  std::string config, out;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> weights;
  std::vector<std::string> methods;
  int threads = 0;
  bool timing = false;
  bool per_trial = false;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  require_readable(a.config, "experiment spec");
  require_writable_dir(a.out + ".tsv");
  auto specs = load_experiments(a.config);
  RunOptions opt;
  opt.threads = a.threads;
  opt.timing = a.timing;
  opt.trials = a.trials;
  opt.seed = a.seed;
  opt.keep_trials = a.per_trial;
  if (a.weights) opt.weights = *a.weights;
  if (!a.methods.empty()) {
    std::vector<Method> m;
    for (const auto& name : a.methods) m.push_back(parse_method(name));
    opt.methods = m;
  }
  ExperimentResult all;
  for (auto& spec : specs) {
    std::cerr << "running " << spec.name << " (" << scenario_name(spec.scenario) << ")\n";
    ExperimentResult r = run_experiment(spec, opt);
    all.rows.insert(all.rows.end(), std::make_move_iterator(r.rows.begin()),
                    std::make_move_iterator(r.rows.end()));
    all.skipped.insert(all.skipped.end(), r.skipped.begin(), r.skipped.end());
    if (opt.trials) spec.trials = *opt.trials;
    if (opt.seed) spec.rng_seed = *opt.seed;
    if (opt.methods) spec.methods = *opt.methods;
  }
  {
    auto out = open_output(a.out + ".tsv");
    write_result_table(all, out);
  }
  {
    auto out = open_output(a.out + ".json");
    write_result_summary(all, specs, out);
  }
  if (a.per_trial) {
    auto out = open_output(a.out + "_trials.tsv");
    write_trial_table(all, out);
  }
  return 0;
}

int cmd_inspect_weights(const std::string& path) {
  require_readable(path, "weight file");
  const UnfoldedModelWeights w = load_weights(path);
  std::printf("format_version %d\n", w.format_version);
  std::printf("n_virtual %d\nlag_spacing %g\nn_layers %d\nchannels %d\nkernel %d\n", w.n_virtual,
              w.lag_spacing, w.n_layers, w.channels, w.kernel);
  std::printf("activation %s\npadding %s\ndykstra_iters %d\npsd_repair %s\n", w.activation.c_str(),
              w.padding.c_str(), w.dykstra_iters, w.psd_repair.c_str());
  std::printf("coverage: baseline span must be <= %g m\n", (w.n_virtual - 1) * w.lag_spacing);
  std::printf("layer\trho\teig_floor\tmax_abs_weight\n");
  for (std::size_t m = 0; m < w.layers.size(); ++m) {
    const auto& l = w.layers[m];
    double mx = 0.0;
    for (const Conv1dParams* c : {&l.conv1, &l.conv2, &l.conv3}) {
      for (double x : c->weight) mx = std::max(mx, std::abs(x));
    }
    std::printf("%zu\t%.6g\t%.6g\t%.6g\n", m, l.rho(), l.eig_floor(), mx);
  }
  return 0;
}

struct EmbeddingArgs {
  std::string config, out;
  int n_virtual = 32;
  double spacing = 10.0;
};

int cmd_export_embedding(const EmbeddingArgs& a) {
  require_readable(a.config, "scene config");
  require_writable_dir(a.out);
  const SceneConfig cfg = load_scene_config(a.config, SceneParts::kGeometryOnly);
  const LagEmbedding emb(cfg.geometry, VirtualLagGrid{a.n_virtual, a.spacing});
  auto out = open_output(a.out);
  emb.write_text(out);
  return 0;
}

struct InitWeightsArgs {
  std::string out, kind = "zero";
  int n_virtual = 32, layers = 12, channels = 16, kernel = 5;
  double spacing = 10.0, raw_rho = 0.0, raw_eig = -40.0, scale = 0.05;
  std::uint64_t seed = 1;
};

int cmd_init_weights(const InitWeightsArgs& a) {
  require_writable_dir(a.out);
  UnfoldedModelWeights w;
  if (a.kind == "zero") {
    w = make_zero_weights(a.n_virtual, a.spacing, a.layers, a.channels, a.kernel, a.raw_rho,
                          a.raw_eig);
  } else if (a.kind == "random") {
    w = make_random_weights(a.n_virtual, a.spacing, a.layers, a.channels, a.kernel, a.scale, a.seed);
  } else {
    throw TomoError("--kind must be zero or random");
  }
  save_weights(w, a.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gridless SAR tomography toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate observation vectors from a scene config");
  s->add_option("--config", sim.config, "Scene config (JSON)")->required();
  s->add_option("--out", sim.out, "Observation file to write")->required();
  s->add_option("--seed", sim.seed, "Override rng_seed");
  s->add_option("--snr", sim.snr, "Override snr_db");

  InvertArgs inv;
  auto* i = app.add_subcommand("invert", "Estimate elevations for every pixel of an observation file");
  i->add_option("observations", inv.observations, "Observation file")->required();
  i->add_option("--method", inv.method, "gridless, unfolded, sl1mmer, music or anm_admm");
  i->add_option("--weights", inv.weights, "Weight file (method unfolded)");
  i->add_option("--config", inv.config, "Inversion config (JSON)");
  i->add_option("--out", inv.out, "Estimates file (TSV)")->required();
  i->add_option("--threads", inv.threads, "Worker count (default: TOMO_THREADS or all cores)");
  i->add_option("--order", inv.order, "Model order: 0 = estimate, 1 or 2 = fixed")
      ->check(CLI::Range(0, 2));

  BenchmarkArgs bench;
  auto* b = app.add_subcommand("benchmark", "Run Monte-Carlo experiments from a spec file");
  b->add_option("--config", bench.config, "Experiment spec (JSON)")->required();
  b->add_option("--out", bench.out, "Output prefix (writes PREFIX.tsv and PREFIX.json)")->required();
  b->add_option("--trials", bench.trials, "Override trial count");
  b->add_option("--seed", bench.seed, "Override rng_seed");
  b->add_option("--threads", bench.threads, "Worker count (default: TOMO_THREADS or all cores)");
  b->add_option("--method", bench.methods, "Restrict to these methods (repeatable)");
  b->add_option("--weights", bench.weights, "Weight file for method unfolded");
  b->add_flag("--timing", bench.timing, "Record per-pixel wall time (output no longer reproducible)");
  b->add_flag("--per-trial", bench.per_trial, "Also write PREFIX_trials.tsv");

  std::string weights_path;
  auto* w = app.add_subcommand("inspect-weights", "Print the header and layer summary of a weight file");
  w->add_option("--weights", weights_path, "Weight file")->required();

  EmbeddingArgs emb;
  auto* e = app.add_subcommand("export-embedding", "Dump pairs, lags and interpolation weights");
  e->add_option("--config", emb.config, "Scene config (geometry keys suffice)")->required();
  e->add_option("--out", emb.out, "Text file to write")->required();
  e->add_option("--n-virtual", emb.n_virtual, "Virtual lag count N_v");
  e->add_option("--lag-spacing", emb.spacing, "Virtual lag spacing (m)");

  InitWeightsArgs iw;
  auto* z = app.add_subcommand("init-weights", "Write an untrained (zero or random) weight file");
  z->add_option("--out", iw.out, "Weight file to write")->required();
  z->add_option("--kind", iw.kind, "zero or random");
  z->add_option("--n-virtual", iw.n_virtual, "Virtual lag count N_v");
  z->add_option("--lag-spacing", iw.spacing, "Virtual lag spacing (m)");
  z->add_option("--layers", iw.layers, "Layer count M");
  z->add_option("--channels", iw.channels, "Hidden channels C");
  z->add_option("--kernel", iw.kernel, "Kernel size");
  z->add_option("--raw-rho", iw.raw_rho, "Raw (pre-softplus) rho of every layer");
  z->add_option("--raw-eig", iw.raw_eig, "Raw (pre-softplus) eigenvalue floor of every layer");
  z->add_option("--scale", iw.scale, "Standard deviation of random parameters");
  z->add_option("--seed", iw.seed, "Seed of random parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*s) return cmd_simulate(sim);
    if (*i) return cmd_invert(inv);
    if (*b) return cmd_benchmark(bench);
    if (*w) return cmd_inspect_weights(weights_path);
    if (*e) return cmd_export_embedding(emb);
    if (*z) return cmd_init_weights(iw);
  } catch (const CLI::Error& err) {
    return app.exit(err);
  } catch (const CoverageError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitCoverage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
