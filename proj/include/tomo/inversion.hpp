#pragma once

#include "tomo/baselines.hpp"
#include "tomo/solver.hpp"
#include "tomo/spectral_readout.hpp"
#include "tomo/unfolded.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tomo {

enum class Method { kGridless, kUnfolded, kSl1mmer, kMusic, kAnmAdmm };

[[nodiscard]] const std::vector<Method>& all_methods();
[[nodiscard]] std::string method_name(Method method);
/// Throws TomoError listing the available names for an unknown method.
[[nodiscard]] Method parse_method(const std::string& name);

/// Settings for every inversion method. All keys of the JSON form are
/// optional; see README for the schema.
struct InversionConfig {
  VirtualLagGrid lag_grid;
  SolverConfig solver;
  OrderConfig order;
  double grid_spacing = 1.0;  ///< elevation grid of SL1MMER and MUSIC (m)
  L1Config sl1mmer;
  double music_ridge = 1e-3;  ///< ridge of the LS lag estimate (nonuniform MUSIC)
  AnmConfig anm;
  std::optional<std::filesystem::path> weights;

  void validate() const;
};

[[nodiscard]] InversionConfig parse_inversion_config(const std::string& text);
[[nodiscard]] InversionConfig load_inversion_config(const std::filesystem::path& path);

struct PixelEstimate {
  std::vector<double> elevations;   ///< ascending; empty when nothing was detected
  int order = 0;
  std::vector<double> eigenvalues;  ///< descending, of the covariance used for readout
  std::vector<double> root_moduli;  ///< Root-MUSIC methods only
  bool converged = true;            ///< false when an iterative baseline hit its cap
};

/// One method bound to one geometry with all geometry-dependent
/// precomputation done in the constructor. invert() is const and
/// thread-safe.
class Inverter {
 public:
  /// `weights` is required for Method::kUnfolded and ignored otherwise.
  Inverter(Method method, const AcquisitionGeometry& geometry, const InversionConfig& config,
           const UnfoldedModelWeights* weights = nullptr);
  ~Inverter();
  Inverter(Inverter&&) noexcept;
  Inverter& operator=(Inverter&&) noexcept;

  [[nodiscard]] Method method() const noexcept { return method_; }
  [[nodiscard]] const AcquisitionGeometry& geometry() const noexcept { return geometry_; }

  /// Whether `method` can run on `geometry` (ANM-ADMM needs uniform
  /// baselines; the lag methods need the coverage condition).
  [[nodiscard]] static bool supports(Method method, const AcquisitionGeometry& geometry,
                                     const InversionConfig& config);

  /// `known_order` in {1, 2} fixes K; 0 estimates it. `noise_sigma` is used
  /// by ANM-ADMM's default regularization weight only.
  [[nodiscard]] PixelEstimate invert(const CVector& g, int known_order, double noise_sigma) const;

 private:
  struct Impl;
  Method method_;
  AcquisitionGeometry geometry_;
  std::unique_ptr<Impl> impl_;
};

/// Noise standard deviation implied by a noisy observation at a given
/// per-element SNR: sigma^2 = (||g||^2/N) / (1 + 10^(snr/10)).
[[nodiscard]] double implied_noise_sigma(const CVector& g, double snr_db);

}  // namespace tomo
