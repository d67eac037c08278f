#pragma once

#include "tomo/types.hpp"

namespace tomo {

/// Hermitian Toeplitz matrix T(c) with first column c. The diagonal uses
/// Re(c_0) so the result is exactly Hermitian.
[[nodiscard]] CMatrix toeplitz_from_lags(const CVector& lags);

/// k-th output is the mean of the k-th subdiagonal (row >= column).
[[nodiscard]] CVector extract_lags(const CMatrix& t);

/// Nonnegative-lag sequence of a structured covariance estimate.
struct ToeplitzCovariance {
  CVector lags;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(lags.size()); }
  [[nodiscard]] CMatrix matrix() const { return toeplitz_from_lags(lags); }
};

/// (A + A^H) / 2
[[nodiscard]] CMatrix hermitian_part(const CMatrix& a);

/// Orthogonal projection onto Hermitian Toeplitz matrices.
[[nodiscard]] CMatrix project_toeplitz(const CMatrix& t);

/// Frobenius distance from t to its Hermitian Toeplitz projection.
[[nodiscard]] double toeplitz_residual(const CMatrix& t);

/// Eigenvalues below `eig_floor` are raised to it; the input is
/// symmetrized first.
[[nodiscard]] CMatrix project_psd(const CMatrix& t, double eig_floor = 0.0);

[[nodiscard]] double min_eigenvalue(const CMatrix& hermitian);

/// J rounds of Dykstra's algorithm (with correction terms) between the PSD
/// cone and the Hermitian Toeplitz subspace, starting from t. Returns the
/// lags of the final Toeplitz-subspace iterate.
[[nodiscard]] CVector dykstra_rounds(const CMatrix& t, int rounds, double eig_floor = 0.0);

/// dykstra_rounds followed by diagonal loading: when the Toeplitz iterate
/// has a negative eigenvalue lambda_min, c_0 is raised by -lambda_min so the
/// returned matrix is exactly Toeplitz and PSD. Loading by a multiple of I
/// leaves eigenvectors, and hence any subspace readout, unchanged.
[[nodiscard]] ToeplitzCovariance dykstra_project(const CMatrix& t, int rounds,
                                                 double eig_floor = 0.0);

}  // namespace tomo
