#include "tomo/inversion.hpp"

#include "inversion_json.hpp"
#include "tomo/scene_config.hpp"

#include <algorithm>
#include <cmath>

namespace tomo {

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::kGridless, Method::kUnfolded, Method::kSl1mmer,
                                           Method::kMusic, Method::kAnmAdmm};
  return methods;
}

std::string method_name(Method method) {
  switch (method) {
    case Method::kGridless: return "gridless";
    case Method::kUnfolded: return "unfolded";
    case Method::kSl1mmer: return "sl1mmer";
    case Method::kMusic: return "music";
    case Method::kAnmAdmm: return "anm_admm";
  }
  throw TomoError("unknown method enum value");
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  std::string list;
  for (Method m : all_methods()) list += (list.empty() ? "" : ", ") + method_name(m);
  throw TomoError("unknown method '" + name + "'; available methods: " + list);
}

void InversionConfig::validate() const {
  lag_grid.validate();
  solver.validate();
  if (order.k_max < 1 || order.k_max > 2) throw TomoError("k_max must be 1 or 2");
  if (!(order.ratio_threshold >= 0.0)) throw TomoError("ratio_threshold must be >= 0");
  if (!(order.min_sep_frac >= 0.0)) throw TomoError("min_sep_frac must be >= 0");
  if (!(grid_spacing > 0.0)) throw TomoError("grid spacing must be positive");
  if (!(sl1mmer.mu_rel > 0.0)) throw TomoError("sl1mmer mu_rel must be positive");
  if (sl1mmer.max_iters < 1) throw TomoError("sl1mmer max_iters must be >= 1");
  if (!(music_ridge > 0.0)) throw TomoError("music ridge must be positive");
  if (!(anm.rho > 0.0)) throw TomoError("anm rho must be positive");
  if (anm.max_iters < 1) throw TomoError("anm max_iters must be >= 1");
}

InversionConfig inversion_config_from_json(const json& j, const std::string& where) {
  jsonu::reject_unknown_keys(j, {"lag_grid", "solver", "order", "grid", "sl1mmer", "music", "anm",
                                 "weights"},
                             where);
  InversionConfig c;
  if (j.contains("lag_grid")) {
    const json& g = j.at("lag_grid");
    jsonu::reject_unknown_keys(g, {"n_virtual", "spacing"}, where + ".lag_grid");
    c.lag_grid.n_virtual = jsonu::optional_int(g, "n_virtual", c.lag_grid.n_virtual);
    c.lag_grid.spacing = jsonu::optional_number(g, "spacing", c.lag_grid.spacing);
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    jsonu::reject_unknown_keys(s, {"iterations", "rho", "dykstra_iters", "psd_eig_floor",
                                   "regularizer", "alpha_rel"},
                               where + ".solver");
    c.solver.iterations = jsonu::optional_int(s, "iterations", c.solver.iterations);
    if (s.contains("rho")) {
      c.solver.rho = s.at("rho").is_array() ? jsonu::number_array(s.at("rho"), "rho")
                                            : std::vector<double>{jsonu::as_number(s.at("rho"), "rho")};
    }
    c.solver.dykstra_iters = jsonu::optional_int(s, "dykstra_iters", c.solver.dykstra_iters);
    c.solver.psd_eig_floor = jsonu::optional_number(s, "psd_eig_floor", c.solver.psd_eig_floor);
    const std::string reg =
        s.contains("regularizer") ? jsonu::get_string(s.at("regularizer"), "regularizer")
                                  : std::string("soft_threshold");
    if (reg == "identity") {
      if (s.contains("alpha_rel")) throw TomoError(where + ".solver: alpha_rel needs soft_threshold");
      c.solver.regularizer = IdentityRegularizer{};
    } else if (reg == "soft_threshold") {
      SoftThresholdRegularizer st;
      st.alpha_rel = jsonu::optional_number(s, "alpha_rel", st.alpha_rel);
      c.solver.regularizer = st;
    } else {
      throw TomoError(where + ".solver: unknown regularizer '" + reg +
                      "' (expected identity or soft_threshold)");
    }
  }
  if (j.contains("order")) {
    const json& o = j.at("order");
    jsonu::reject_unknown_keys(o, {"k_max", "ratio_threshold", "min_sep_frac",
                                   "admissible_elevation"},
                               where + ".order");
    c.order.k_max = jsonu::optional_int(o, "k_max", c.order.k_max);
    c.order.ratio_threshold = jsonu::optional_number(o, "ratio_threshold", c.order.ratio_threshold);
    c.order.min_sep_frac = jsonu::optional_number(o, "min_sep_frac", c.order.min_sep_frac);
    if (o.contains("admissible_elevation")) {
      c.order.admissible = jsonu::interval(o.at("admissible_elevation"), "admissible_elevation");
    }
  }
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    jsonu::reject_unknown_keys(g, {"spacing"}, where + ".grid");
    c.grid_spacing = jsonu::optional_number(g, "spacing", c.grid_spacing);
  }
  if (j.contains("sl1mmer")) {
    const json& s = j.at("sl1mmer");
    jsonu::reject_unknown_keys(s, {"mu_rel", "max_iters", "tol", "peak_rel"}, where + ".sl1mmer");
    c.sl1mmer.mu_rel = jsonu::optional_number(s, "mu_rel", c.sl1mmer.mu_rel);
    c.sl1mmer.max_iters = jsonu::optional_int(s, "max_iters", c.sl1mmer.max_iters);
    c.sl1mmer.tol = jsonu::optional_number(s, "tol", c.sl1mmer.tol);
    c.sl1mmer.peak_rel = jsonu::optional_number(s, "peak_rel", c.sl1mmer.peak_rel);
  }
  if (j.contains("music")) {
    const json& m = j.at("music");
    jsonu::reject_unknown_keys(m, {"ridge"}, where + ".music");
    c.music_ridge = jsonu::optional_number(m, "ridge", c.music_ridge);
  }
  if (j.contains("anm")) {
    const json& a = j.at("anm");
    jsonu::reject_unknown_keys(a, {"tau", "tau_scale", "rho", "max_iters", "tol"}, where + ".anm");
    c.anm.tau = jsonu::optional_number(a, "tau", c.anm.tau);
    c.anm.tau_scale = jsonu::optional_number(a, "tau_scale", c.anm.tau_scale);
    c.anm.rho = jsonu::optional_number(a, "rho", c.anm.rho);
    c.anm.max_iters = jsonu::optional_int(a, "max_iters", c.anm.max_iters);
    c.anm.tol = jsonu::optional_number(a, "tol", c.anm.tol);
  }
  if (j.contains("weights")) c.weights = jsonu::get_string(j.at("weights"), "weights");
  c.validate();
  return c;
}

InversionConfig parse_inversion_config(const std::string& text) {
  return inversion_config_from_json(jsonu::parse(text, "inversion config"), "inversion config");
}

InversionConfig load_inversion_config(const std::filesystem::path& path) {
  InversionConfig c = parse_inversion_config(read_text_file(path));
  if (c.weights && c.weights->is_relative()) c.weights = path.parent_path() / *c.weights;
  return c;
}

double implied_noise_sigma(const CVector& g, double snr_db) {
  if (!std::isfinite(snr_db)) return 0.0;
  const double power = g.squaredNorm() / static_cast<double>(g.size());
  return std::sqrt(power / (1.0 + std::pow(10.0, snr_db / 10.0)));
}

struct Inverter::Impl {
  InversionConfig config;
  double rayleigh = 0.0;
  ReadoutScale virtual_scale;
  ReadoutScale physical_scale;
  bool uniform = false;
  std::unique_ptr<LagEmbedding> embedding;
  std::optional<ClassicalSolver> solver;
  std::optional<UnfoldedNetwork> network;
  std::optional<ElevationGrid> grid;

  PixelEstimate readout(const CMatrix& t, int known_order, const ReadoutScale& scale) const {
    PixelEstimate out;
    const RVector ev = eigenvalues_descending(t);
    out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    if (!(ev(0) > 0.0)) return out;
    const int k = known_order > 0 ? known_order
                                  : estimate_order(t, scale, rayleigh, config.order);
    const ElevationEstimate est = root_music(t, k, scale);
    out.elevations = est.elevations;
    out.root_moduli = est.root_moduli;
    out.order = k;
    return out;
  }
};

Inverter::Inverter(Method method, const AcquisitionGeometry& geometry,
                   const InversionConfig& config, const UnfoldedModelWeights* weights)
    : method_(method), geometry_(geometry), impl_(std::make_unique<Impl>()) {
  config.validate();
  Impl& im = *impl_;
  im.config = config;
  im.rayleigh = rayleigh_resolution(geometry_);
  im.uniform = is_uniform(geometry_);
  im.virtual_scale = ReadoutScale::from(geometry_, config.lag_grid.spacing);
  switch (method) {
    case Method::kGridless:
      im.embedding = std::make_unique<LagEmbedding>(geometry_, config.lag_grid);
      check_branch(config.order.admissible, im.virtual_scale);
      im.solver.emplace(*im.embedding, config.solver);
      break;
    case Method::kUnfolded: {
      if (weights == nullptr) throw TomoError("method 'unfolded' requires a weight file");
      VirtualLagGrid grid{weights->n_virtual, weights->lag_spacing};
      im.embedding = std::make_unique<LagEmbedding>(geometry_, grid);
      im.virtual_scale = ReadoutScale::from(geometry_, grid.spacing);
      check_branch(config.order.admissible, im.virtual_scale);
      im.network.emplace(*im.embedding, *weights);
      break;
    }
    case Method::kSl1mmer:
      im.grid.emplace(geometry_, config.order.admissible.lo, config.order.admissible.hi,
                      config.grid_spacing);
      break;
    case Method::kMusic:
      im.grid.emplace(geometry_, config.order.admissible.lo, config.order.admissible.hi,
                      config.grid_spacing);
      if (im.uniform) {
        im.physical_scale = uniform_array_scale(geometry_);
        check_branch(config.order.admissible, im.physical_scale);
      } else {
        im.embedding = std::make_unique<LagEmbedding>(geometry_, config.lag_grid);
        check_branch(config.order.admissible, im.virtual_scale);
      }
      break;
    case Method::kAnmAdmm:
      im.physical_scale = uniform_array_scale(geometry_);
      check_branch(config.order.admissible, im.physical_scale);
      break;
  }
}

Inverter::~Inverter() = default;
Inverter::Inverter(Inverter&&) noexcept = default;
Inverter& Inverter::operator=(Inverter&&) noexcept = default;

bool Inverter::supports(Method method, const AcquisitionGeometry& geometry,
                        const InversionConfig& config) {
  switch (method) {
    case Method::kAnmAdmm: return is_uniform(geometry);
    case Method::kGridless:
    case Method::kUnfolded: return geometry.span() <= config.lag_grid.max_lag() * (1.0 + 1e-9);
    case Method::kMusic:
      return is_uniform(geometry) || geometry.span() <= config.lag_grid.max_lag() * (1.0 + 1e-9);
    case Method::kSl1mmer: return true;
  }
  return false;
}

PixelEstimate Inverter::invert(const CVector& g, int known_order, double noise_sigma) const {
  if (g.size() != geometry_.size()) {
    throw TomoError("observation has " + std::to_string(g.size()) + " values, geometry has " +
                    std::to_string(geometry_.size()) + " baselines");
  }
  if (known_order < 0 || known_order > 2) throw TomoError("known order must be 0, 1 or 2");
  const Impl& im = *impl_;
  switch (method_) {
    case Method::kGridless: {
      const ToeplitzCovariance t = im.solver->solve(pairwise_products(g, *im.embedding));
      return im.readout(t.matrix(), known_order, im.virtual_scale);
    }
    case Method::kUnfolded: {
      const ToeplitzCovariance t = im.network->forward(pairwise_products(g, *im.embedding));
      return im.readout(t.matrix(), known_order, im.virtual_scale);
    }
    case Method::kSl1mmer: {
      const int k = known_order > 0 ? known_order : -im.config.order.k_max;
      const L1Result r = l1_grid_inversion(g, *im.grid, im.config.sl1mmer, k);
      PixelEstimate out;
      out.elevations = r.peaks;
      out.order = static_cast<int>(r.peaks.size());
      out.converged = r.converged;
      return out;
    }
    case Method::kMusic: {
      CMatrix t;
      const ReadoutScale* scale = &im.physical_scale;
      if (im.uniform) {
        t = direct_toeplitz(g);
      } else {
        t = toeplitz_from_lags(
            ls_lag_estimate(pairwise_products(g, *im.embedding), *im.embedding, im.config.music_ridge));
        scale = &im.virtual_scale;
      }
      PixelEstimate out;
      const RVector ev = eigenvalues_descending(t);
      out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
      if (!(ev(0) > 0.0)) return out;
      const int k = known_order > 0 ? known_order
                                    : estimate_order(t, *scale, im.rayleigh, im.config.order);
      out.elevations = music_grid(t, im.grid->points(), k, *scale);
      out.order = static_cast<int>(out.elevations.size());
      return out;
    }
    case Method::kAnmAdmm: {
      const double power = g.squaredNorm() / static_cast<double>(g.size());
      // Noiseless input leaves the default tau at zero; fall back to a small
      // fraction of the signal level so the atomic norm still regularizes.
      const double sigma = noise_sigma > 0.0 ? noise_sigma : 1e-3 * std::sqrt(power);
      const AnmResult r = anm_admm(g, geometry_, im.config.anm, sigma);
      if (!(r.lags(0).real() > 1e-9 * power)) {
        PixelEstimate out;
        out.converged = r.iterations < im.config.anm.max_iters;
        return out;
      }
      PixelEstimate out = im.readout(toeplitz_from_lags(r.lags), known_order, im.physical_scale);
      out.converged = r.iterations < im.config.anm.max_iters;
      return out;
    }
  }
  throw TomoError("unknown method");
}

}  // namespace tomo
