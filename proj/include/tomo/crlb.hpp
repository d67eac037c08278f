#pragma once

#include "tomo/core_model.hpp"

#include <vector>

namespace tomo {

/// Jacobian of the noiseless signal with respect to the parameter vector
/// (s_1, Re gamma_1, Im gamma_1, s_2, ...), N x 3K.
[[nodiscard]] CMatrix signal_jacobian(const AcquisitionGeometry& geometry,
                                      const ScattererSet& scatterers);

/// Deterministic single-snapshot Fisher information (2/sigma^2) Re(J^H J).
[[nodiscard]] RMatrix fisher_information(const CMatrix& jacobian, double noise_variance);

/// Elevation standard-deviation bounds (meters), one per scatterer, for
/// the deterministic model at the given per-element SNR. Throws when the
/// Fisher matrix is singular.
[[nodiscard]] std::vector<double> crlb_elevation(const AcquisitionGeometry& geometry,
                                                 const ScattererSet& scatterers, double snr_db);

}  // namespace tomo
