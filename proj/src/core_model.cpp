#include "tomo/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <set>
#include <string>

namespace tomo {

AcquisitionGeometry::AcquisitionGeometry(std::vector<double> baselines, double wavelength,
                                         double slant_range)
    : baselines_(std::move(baselines)), wavelength_(wavelength), slant_range_(slant_range) {
  if (baselines_.size() < 2) {
    throw TomoError("geometry needs at least two baselines, got " +
                    std::to_string(baselines_.size()));
  }
  for (double b : baselines_) {
    if (!std::isfinite(b)) throw TomoError("geometry contains a non-finite baseline");
  }
  if (std::set<double>(baselines_.begin(), baselines_.end()).size() < 2) {
    throw TomoError("geometry needs at least two distinct baselines");
  }
  if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) {
    throw TomoError("wavelength must be positive");
  }
  if (!(slant_range_ > 0.0) || !std::isfinite(slant_range_)) {
    throw TomoError("slant_range must be positive");
  }
}

AcquisitionGeometry AcquisitionGeometry::uniform(double lo, double hi, int count,
                                                 double wavelength, double slant_range) {
  if (count < 2) throw TomoError("uniform geometry needs count >= 2");
  std::vector<double> b(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    b[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  // Pin the endpoints exactly.
  b.front() = lo;
  b.back() = hi;
  return {std::move(b), wavelength, slant_range};
}

double AcquisitionGeometry::min_baseline() const {
  return *std::min_element(baselines_.begin(), baselines_.end());
}

double AcquisitionGeometry::max_baseline() const {
  return *std::max_element(baselines_.begin(), baselines_.end());
}

std::uint64_t AcquisitionGeometry::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffULL;
      h *= 0x100000001b3ULL;
    }
  };
  feed(wavelength_);
  feed(slant_range_);
  for (double b : baselines_) feed(b);
  return h;
}

void RunConfig::validate() const {
  if (!(admissible_elevation.hi > admissible_elevation.lo)) {
    throw TomoError("admissible elevation interval is empty");
  }
  if (k_max < 1 || k_max > 2) throw TomoError("k_max must be 1 or 2");
}

void validate_scatterers(const ScattererSet& scatterers, const Interval& admissible, int k_max) {
  if (static_cast<int>(scatterers.size()) > k_max) {
    throw TomoError("scene has " + std::to_string(scatterers.size()) +
                    " scatterers, more than k_max = " + std::to_string(k_max));
  }
  for (const auto& s : scatterers) {
    if (!std::isfinite(s.elevation) || !admissible.contains(s.elevation)) {
      throw TomoError("scatterer elevation " + std::to_string(s.elevation) +
                      " m outside the admissible interval [" + std::to_string(admissible.lo) +
                      ", " + std::to_string(admissible.hi) + "]");
    }
    if (!(s.amplitude >= 0.0) || !std::isfinite(s.amplitude)) {
      throw TomoError("scatterer amplitude must be finite and non-negative");
    }
    if (!std::isfinite(s.phase)) throw TomoError("scatterer phase must be finite");
  }
}

double steering_phase(const AcquisitionGeometry& geometry, int baseline_index, double elevation) {
  if (baseline_index < 0 || baseline_index >= geometry.size()) {
    throw TomoError("baseline index " + std::to_string(baseline_index) + " out of range [0, " +
                    std::to_string(geometry.size()) + ")");
  }
  return geometry.phase_scale() * geometry.baselines()[static_cast<std::size_t>(baseline_index)] *
         elevation;
}

CVector noiseless_signal(const AcquisitionGeometry& geometry,
                         std::span<const Scatterer> scatterers) {
  const int n = geometry.size();
  CVector x = CVector::Zero(n);
  for (const auto& sc : scatterers) {
    const cdouble gamma = sc.reflectivity();
    for (int i = 0; i < n; ++i) {
      x(i) += gamma * std::polar(1.0, steering_phase(geometry, i, sc.elevation));
    }
  }
  return x;
}

double noise_variance(double mean_signal_power, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  if (!std::isfinite(snr_db)) throw TomoError("snr_db must be finite or +inf");
  return mean_signal_power / std::pow(10.0, snr_db / 10.0);
}

void add_complex_noise(CVector& values, double variance, Rng& rng) {
  if (variance <= 0.0) return;
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    values(i) += cdouble(re, im);
  }
}

CVector simulate_observation(const AcquisitionGeometry& geometry,
                             std::span<const Scatterer> scatterers, double snr_db, Rng& rng,
                             std::optional<double> reference_power) {
  CVector g = noiseless_signal(geometry, scatterers);
  const bool noiseless = std::isinf(snr_db) && snr_db > 0;
  if (noiseless) return g;
  double power = 0.0;
  if (reference_power) {
    power = *reference_power;
  } else if (scatterers.empty()) {
    throw TomoError("empty scene at finite SNR needs a reference signal power");
  } else {
    power = g.squaredNorm() / static_cast<double>(g.size());
  }
  add_complex_noise(g, noise_variance(power, snr_db), rng);
  return g;
}

double rayleigh_resolution(const AcquisitionGeometry& geometry) {
  const double span = geometry.span();
  if (!(span > 0.0)) throw TomoError("degenerate baseline span");
  return geometry.wavelength() * geometry.slant_range() / (2.0 * span);
}

AcquisitionGeometry perturb_baselines(const AcquisitionGeometry& geometry, double sigma_b,
                                      Rng& rng) {
  if (!(sigma_b >= 0.0)) throw TomoError("sigma_b must be non-negative");
  if (geometry.size() < 3 || sigma_b == 0.0) return geometry;

  const auto& b = geometry.baselines();
  const auto lo_it = std::min_element(b.begin(), b.end());
  const auto hi_it = std::max_element(b.begin(), b.end());
  const auto lo_idx = static_cast<std::size_t>(lo_it - b.begin());
  const auto hi_idx = static_cast<std::size_t>(hi_it - b.begin());
  const double lo = *lo_it;
  const double hi = *hi_it;

  std::normal_distribution<double> jitter(0.0, sigma_b);
  std::vector<double> out = b;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i == lo_idx || i == hi_idx) continue;
    out[i] = std::clamp(out[i] + jitter(rng), lo, hi);
  }
  return {std::move(out), geometry.wavelength(), geometry.slant_range()};
}

}  // namespace tomo
