#pragma once

#include "tomo/core_model.hpp"

#include <iosfwd>
#include <vector>

namespace tomo {

/// Uniform virtual lag grid {0, spacing, ..., (n_virtual-1)*spacing}.
struct VirtualLagGrid {
  int n_virtual = 32;
  double spacing = 10.0;  ///< meters

  [[nodiscard]] double max_lag() const noexcept { return (n_virtual - 1) * spacing; }
  void validate() const;
};

/// One row of the interpolation operator: at most two nonzeros.
struct InterpolationRow {
  int column = 0;         ///< d_p
  double weight = 1.0;    ///< 1 - eta_p
  double next_weight = 0; ///< eta_p, applied to column + 1 (0 on the boundary row)
};

/// Ordered baseline pair (m, n) with lag b_m - b_n > 0.
struct BaselinePair {
  int m = 0;
  int n = 0;
};

/// Signal-independent mapping from the virtual lag sequence to the
/// pairwise products of one geometry. Immutable; share across pixels.
class LagEmbedding {
 public:
  /// Throws CoverageError when the baseline span exceeds the grid range.
  LagEmbedding(const AcquisitionGeometry& geometry, VirtualLagGrid grid);

  [[nodiscard]] const AcquisitionGeometry& geometry() const noexcept { return geometry_; }
  [[nodiscard]] const VirtualLagGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] int n_virtual() const noexcept { return grid_.n_virtual; }
  [[nodiscard]] int n_pairs() const noexcept { return static_cast<int>(pairs_.size()); }
  [[nodiscard]] const std::vector<BaselinePair>& pairs() const noexcept { return pairs_; }
  [[nodiscard]] const std::vector<double>& lags() const noexcept { return lags_; }
  [[nodiscard]] const std::vector<InterpolationRow>& rows() const noexcept { return rows_; }
  /// Psi^T Psi (Psi is real, so this is also Psi^H Psi).
  [[nodiscard]] const RMatrix& gram() const noexcept { return gram_; }

  /// Dense P x N_v copy of Psi.
  [[nodiscard]] RMatrix psi_dense() const;
  /// Psi * c
  [[nodiscard]] CVector apply(const CVector& lags) const;
  /// Psi^H * y
  [[nodiscard]] CVector adjoint(const CVector& y) const;

  /// Text dump of pairs, lags and Psi nonzeros.
  void write_text(std::ostream& out) const;

 private:
  AcquisitionGeometry geometry_;
  VirtualLagGrid grid_;
  std::vector<BaselinePair> pairs_;
  std::vector<double> lags_;
  std::vector<InterpolationRow> rows_;
  RMatrix gram_;
};

/// y_p = g_{m_p} * conj(g_{n_p}) in embedding order.
[[nodiscard]] CVector pairwise_products(const CVector& observation, const LagEmbedding& embedding);

/// (Psi^H Psi + ridge*I)^{-1} Psi^H y. ridge = 0 is ordinary least squares
/// and throws when the Gram matrix is singular.
[[nodiscard]] CVector ls_lag_estimate(const CVector& y, const LagEmbedding& embedding,
                                      double ridge);

}  // namespace tomo
