#pragma once

#include "tomo/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tomo {

/// Multibaseline sensing configuration for one resolution cell.
class AcquisitionGeometry {
 public:
  AcquisitionGeometry(std::vector<double> baselines, double wavelength, double slant_range);

  /// N baselines evenly spaced over [lo, hi].
  static AcquisitionGeometry uniform(double lo, double hi, int count, double wavelength,
                                     double slant_range);

  [[nodiscard]] const std::vector<double>& baselines() const noexcept { return baselines_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(baselines_.size()); }
  [[nodiscard]] double wavelength() const noexcept { return wavelength_; }
  [[nodiscard]] double slant_range() const noexcept { return slant_range_; }
  [[nodiscard]] double min_baseline() const;
  [[nodiscard]] double max_baseline() const;
  [[nodiscard]] double span() const { return max_baseline() - min_baseline(); }

  /// 4*pi/(lambda*r): phase per meter of baseline per meter of elevation.
  [[nodiscard]] double phase_scale() const noexcept {
    return 4.0 * kPi / (wavelength_ * slant_range_);
  }

  /// FNV-1a hash of the textual geometry, used as a provenance tag.
  [[nodiscard]] std::uint64_t hash() const;

 private:
  std::vector<double> baselines_;
  double wavelength_;
  double slant_range_;
};

struct Scatterer {
  double elevation = 0.0;  ///< meters
  double amplitude = 1.0;  ///< >= 0
  double phase = 0.0;      ///< radians

  [[nodiscard]] cdouble reflectivity() const { return std::polar(amplitude, phase); }
};

using ScattererSet = std::vector<Scatterer>;

struct RunConfig {
  Interval admissible_elevation{-100.0, 100.0};
  double snr_db = 10.0;
  int k_max = 2;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Checks amplitudes, phases and elevation bounds of a scatterer set.
void validate_scatterers(const ScattererSet& scatterers, const Interval& admissible, int k_max);

/// Phase 4*pi*b_n*s/(lambda*r) of acquisition n for a point at elevation s.
[[nodiscard]] double steering_phase(const AcquisitionGeometry& geometry, int baseline_index,
                                    double elevation);

/// Noiseless stacked signal x_n = sum_k gamma_k exp(j*phase(n, s_k)).
[[nodiscard]] CVector noiseless_signal(const AcquisitionGeometry& geometry,
                                       std::span<const Scatterer> scatterers);

/// Noise variance for a target per-element SNR given the signal power.
[[nodiscard]] double noise_variance(double mean_signal_power, double snr_db);

/// g = x + eps, eps circular complex Gaussian with variance sigma^2 set
/// against the mean per-element signal power. snr_db = +inf is noiseless.
/// `reference_power` replaces the signal power when given (required for
/// an empty scene at finite SNR).
[[nodiscard]] CVector simulate_observation(const AcquisitionGeometry& geometry,
                                           std::span<const Scatterer> scatterers, double snr_db,
                                           Rng& rng,
                                           std::optional<double> reference_power = std::nullopt);

/// Adds i.i.d. CN(0, sigma^2) noise in place.
void add_complex_noise(CVector& values, double variance, Rng& rng);

/// lambda*r/(2B) with B the baseline span.
[[nodiscard]] double rayleigh_resolution(const AcquisitionGeometry& geometry);

/// Gaussian jitter on interior baselines; the min and max baselines stay
/// fixed and perturbed values are clipped to [min, max].
[[nodiscard]] AcquisitionGeometry perturb_baselines(const AcquisitionGeometry& geometry,
                                                    double sigma_b, Rng& rng);

}  // namespace tomo
