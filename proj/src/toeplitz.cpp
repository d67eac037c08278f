#include "tomo/toeplitz.hpp"

#include <cmath>

namespace tomo {

CMatrix toeplitz_from_lags(const CVector& lags) {
  const Eigen::Index n = lags.size();
  CMatrix t(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    t(j, j) = cdouble(lags(0).real(), 0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      t(i, j) = lags(i - j);
      t(j, i) = std::conj(lags(i - j));
    }
  }
  return t;
}

CVector extract_lags(const CMatrix& t) {
  if (t.rows() != t.cols()) throw TomoError("extract_lags needs a square matrix");
  const Eigen::Index n = t.rows();
  CVector c(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    cdouble sum = 0.0;
    for (Eigen::Index j = 0; j + k < n; ++j) sum += t(j + k, j);
    c(k) = sum / static_cast<double>(n - k);
  }
  return c;
}

CMatrix hermitian_part(const CMatrix& a) { return 0.5 * (a + a.adjoint()); }

CMatrix project_toeplitz(const CMatrix& t) {
  return toeplitz_from_lags(extract_lags(hermitian_part(t)));
}

double toeplitz_residual(const CMatrix& t) { return (t - project_toeplitz(t)).norm(); }

CMatrix project_psd(const CMatrix& t, double eig_floor) {
  if (t.rows() != t.cols()) throw TomoError("project_psd needs a square matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(t));
  if (es.info() != Eigen::Success) throw TomoError("eigendecomposition failed in PSD projection");
  const RVector clamped = es.eigenvalues().cwiseMax(eig_floor);
  const CMatrix& v = es.eigenvectors();
  CMatrix out = v * clamped.cast<cdouble>().asDiagonal() * v.adjoint();
  return hermitian_part(out);
}

double min_eigenvalue(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw TomoError("eigendecomposition failed");
  return es.eigenvalues()(0);
}

CVector dykstra_rounds(const CMatrix& t, int rounds, double eig_floor) {
  if (rounds < 1) throw TomoError("Dykstra needs at least one round");
  if (t.rows() != t.cols()) throw TomoError("Dykstra projection needs a square matrix");
  const Eigen::Index n = t.rows();
  CMatrix x = hermitian_part(t);
  CMatrix p = CMatrix::Zero(n, n);
  CMatrix q = CMatrix::Zero(n, n);
  CVector lags;
  for (int j = 0; j < rounds; ++j) {
    const CMatrix y = project_psd(x + p, eig_floor);
    p = x + p - y;
    lags = extract_lags(y + q);
    lags(0) = cdouble(lags(0).real(), 0.0);
    x = toeplitz_from_lags(lags);
    q = y + q - x;
  }
  return lags;
}

ToeplitzCovariance dykstra_project(const CMatrix& t, int rounds, double eig_floor) {
  CVector lags = dykstra_rounds(t, rounds, eig_floor);
  const double lo = min_eigenvalue(toeplitz_from_lags(lags));
  if (lo < 0.0) lags(0) += -lo;
  return {std::move(lags)};
}

}  // namespace tomo
