#include "tomo/crlb.hpp"

#include <cmath>

namespace tomo {

CMatrix signal_jacobian(const AcquisitionGeometry& geometry, const ScattererSet& scatterers) {
  const int n = geometry.size();
  const auto k = static_cast<Eigen::Index>(scatterers.size());
  CMatrix j(n, 3 * k);
  const double scale = geometry.phase_scale();
  for (Eigen::Index q = 0; q < k; ++q) {
    const auto& sc = scatterers[static_cast<std::size_t>(q)];
    const cdouble gamma = sc.reflectivity();
    for (int i = 0; i < n; ++i) {
      const double b = geometry.baselines()[static_cast<std::size_t>(i)];
      const cdouble e = std::polar(1.0, scale * b * sc.elevation);
      j(i, 3 * q) = gamma * cdouble(0.0, scale * b) * e;
      j(i, 3 * q + 1) = e;
      j(i, 3 * q + 2) = cdouble(0.0, 1.0) * e;
    }
  }
  return j;
}

RMatrix fisher_information(const CMatrix& jacobian, double noise_variance) {
  if (!(noise_variance > 0.0)) throw TomoError("Fisher information needs positive noise variance");
  return (2.0 / noise_variance) * (jacobian.adjoint() * jacobian).real();
}

std::vector<double> crlb_elevation(const AcquisitionGeometry& geometry,
                                   const ScattererSet& scatterers, double snr_db) {
  if (scatterers.empty()) throw TomoError("CRLB needs at least one scatterer");
  if (!std::isfinite(snr_db)) throw TomoError("CRLB needs a finite SNR");
  const CVector x = noiseless_signal(geometry, scatterers);
  const double var = noise_variance(x.squaredNorm() / geometry.size(), snr_db);
  const RMatrix fim = fisher_information(signal_jacobian(geometry, scatterers), var);
  Eigen::SelfAdjointEigenSolver<RMatrix> es(fim);
  const double hi = es.eigenvalues().maxCoeff();
  const double lo = es.eigenvalues().minCoeff();
  if (!(hi > 0.0) || lo <= 1e-12 * hi) {
    throw TomoError("Fisher information is singular (coincident scatterers or zero amplitude)");
  }
  const RMatrix inv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                      es.eigenvectors().transpose();
  std::vector<double> out;
  for (std::size_t q = 0; q < scatterers.size(); ++q) {
    const auto i = static_cast<Eigen::Index>(3 * q);
    out.push_back(std::sqrt(inv(i, i)));
  }
  return out;
}

}  // namespace tomo
