#pragma once

#include "tomo/lag_embedding.hpp"
#include "tomo/spectral_readout.hpp"

#include <vector>

namespace tomo {

/// Uniform elevation grid with its N x L steering matrix.
class ElevationGrid {
 public:
  ElevationGrid(const AcquisitionGeometry& geometry, double lo, double hi, double spacing);

  [[nodiscard]] const std::vector<double>& points() const noexcept { return points_; }
  [[nodiscard]] double spacing() const noexcept { return spacing_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(points_.size()); }
  [[nodiscard]] const CMatrix& steering() const noexcept { return steering_; }
  /// Largest eigenvalue of R^H R.
  [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }

 private:
  std::vector<double> points_;
  double spacing_;
  CMatrix steering_;
  double lipschitz_;
};

struct L1Config {
  /// mu = mu_rel * max_l |R^H g|_l; zero data gives the zero solution.
  double mu_rel = 0.2;
  int max_iters = 500;
  double tol = 1e-6;
  /// Peaks kept for order selection: |gamma| >= peak_rel * largest peak.
  double peak_rel = 0.3;
};

struct L1Result {
  CVector coefficients;
  std::vector<double> peaks;             ///< elevations of the selected peaks, ascending
  std::vector<cdouble> amplitudes;       ///< debiased amplitudes aligned with peaks
  std::vector<double> objective;         ///< objective after each iteration
  double mu = 0.0;
  int iterations = 0;
  bool converged = false;                ///< false: best iterate returned at max_iters
};

/// 0.5*||g - R gamma||^2 + mu*||gamma||_1
[[nodiscard]] double l1_objective(const CVector& g, const ElevationGrid& grid,
                                  const CVector& gamma, double mu);

/// Monotone accelerated proximal gradient (MFISTA) for the l1-regularized
/// grid inversion, then K largest-magnitude local maxima and a
/// least-squares amplitude refit on the selected columns. `k` < 0 selects
/// the order from the peaks (at most -k), using peak_rel.
[[nodiscard]] L1Result l1_grid_inversion(const CVector& g, const ElevationGrid& grid,
                                         const L1Config& config, int k);

/// Indices of the `count` largest local maxima of `values`, in descending
/// value order. Plateaus count once; endpoints qualify.
[[nodiscard]] std::vector<int> largest_local_maxima(const RVector& values, int count);

/// Direct Toeplitz covariance of a uniform stack: subdiagonal means of g g^H.
[[nodiscard]] CMatrix direct_toeplitz(const CVector& g);

/// Whether baselines are uniformly spaced (relative tolerance on the step).
[[nodiscard]] bool is_uniform(const AcquisitionGeometry& geometry, double rel_tol = 1e-6);

/// K largest peaks of the MUSIC pseudo-spectrum of `t` on `points`,
/// ascending.
[[nodiscard]] std::vector<double> music_grid(const CMatrix& t, const std::vector<double>& points,
                                             int k, const ReadoutScale& scale);

struct AnmConfig {
  /// Absolute tau; when <= 0, tau = tau_scale * sigma * N * sqrt(ln N).
  double tau = 0.0;
  double tau_scale = 1.0;
  double rho = 1.0;
  int max_iters = 300;
  double tol = 1e-6;
};

struct AnmResult {
  CVector lags;    ///< recovered u, first column of T(u)
  CVector signal;  ///< denoised x
  double t = 0.0;
  double tau = 0.0;
  int iterations = 0;
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  std::vector<double> min_eig;  ///< smallest eigenvalue of Z after each projection
};

/// ADMM for the atomic-norm SDP on the (N+1)x(N+1) augmented matrix.
/// Requires uniform baselines. `noise_sigma` feeds the default tau.
[[nodiscard]] AnmResult anm_admm(const CVector& g, const AcquisitionGeometry& geometry,
                                 const AnmConfig& config, double noise_sigma);

/// Readout scale of the physical uniform array.
[[nodiscard]] ReadoutScale uniform_array_scale(const AcquisitionGeometry& geometry);

}  // namespace tomo
