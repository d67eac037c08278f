#pragma once

#include "tomo/core_model.hpp"

#include <vector>

namespace tomo {

/// Maps virtual-array phase increments to elevation: the covariance lag
/// spacing `lag_spacing` (meters of baseline) together with lambda and r.
struct ReadoutScale {
  double wavelength = 0.031;
  double slant_range = 7.0e5;
  double lag_spacing = 10.0;

  /// Elevation per radian of phase increment, lambda*r/(4*pi*spacing).
  [[nodiscard]] double meters_per_radian() const noexcept {
    return wavelength * slant_range / (4.0 * kPi * lag_spacing);
  }
  /// Half-width of the unambiguous elevation interval, lambda*r/(4*spacing).
  [[nodiscard]] double branch_limit() const noexcept { return kPi * meters_per_radian(); }
  /// Phase increment between adjacent virtual elements for elevation s.
  [[nodiscard]] double phase_step(double elevation) const noexcept {
    return elevation / meters_per_radian();
  }

  static ReadoutScale from(const AcquisitionGeometry& geometry, double lag_spacing) {
    return {geometry.wavelength(), geometry.slant_range(), lag_spacing};
  }
};

struct ElevationEstimate {
  std::vector<double> elevations;   ///< ascending
  int order = 0;
  RVector eigenvalues;              ///< descending
  std::vector<double> root_moduli;  ///< modulus of the inner root of each selected pair
};

/// Eigenvalues of a Hermitian matrix in descending order.
[[nodiscard]] RVector eigenvalues_descending(const CMatrix& t);

/// Orthonormal basis of the eigenvectors belonging to the N-K smallest
/// eigenvalues.
[[nodiscard]] CMatrix noise_subspace(const CMatrix& t, int k);

/// Coefficients (ascending powers of z) of z^{N-1} a^T(1/z) U U^H a(z) with
/// a(z) = [1, z, ..., z^{N-1}]. Degree 2(N-1).
[[nodiscard]] CVector root_music_polynomial(const CMatrix& noise_basis);

/// Roots of a polynomial given by ascending coefficients, via the
/// eigenvalues of its companion matrix. Leading zeros are trimmed.
[[nodiscard]] std::vector<cdouble> polynomial_roots(const CVector& ascending);

/// Root-MUSIC readout of K elevations from a Hermitian (Toeplitz) covariance.
[[nodiscard]] ElevationEstimate root_music(const CMatrix& t, int k, const ReadoutScale& scale);

/// Steering vector of the virtual uniform array, a_i = exp(j*i*phase_step(s)).
[[nodiscard]] CVector virtual_steering(int n, double elevation, const ReadoutScale& scale);

/// MUSIC pseudo-spectrum 1/||U_N^H a(s)||^2 at each elevation.
[[nodiscard]] RVector music_spectrum(const CMatrix& noise_basis, const std::vector<double>& points,
                                     const ReadoutScale& scale);

struct OrderConfig {
  int k_max = 2;
  double ratio_threshold = 0.3;
  double min_sep_frac = 0.1;
  Interval admissible{-100.0, 100.0};
};

/// Eigenvalue-ratio test with physical validation. `rayleigh` is the
/// Rayleigh resolution of the acquisition, used for the separation rule.
[[nodiscard]] int estimate_order(const CMatrix& t, const ReadoutScale& scale, double rayleigh,
                                 const OrderConfig& config);

/// Throws when the admissible interval exceeds the unambiguous branch.
void check_branch(const Interval& admissible, const ReadoutScale& scale);

}  // namespace tomo
