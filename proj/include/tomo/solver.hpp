#pragma once

#include "tomo/lag_embedding.hpp"
#include "tomo/toeplitz.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace tomo {

/// Cached factorization of (Psi^H Psi + rho*I) for one geometry and one
/// rho. Psi is real, so the real Cholesky factor serves the real and
/// imaginary parts of the right-hand side at once.
class DataConsistency {
 public:
  DataConsistency(const LagEmbedding& embedding, double rho);

  [[nodiscard]] double rho() const noexcept { return rho_; }

  /// (Psi^H Psi + rho*I)^{-1} (psi_h_y + rho*v), where psi_h_y = Psi^H y is
  /// precomputed by the caller.
  [[nodiscard]] CVector solve(const CVector& psi_h_y, const CVector& v) const;

 private:
  double rho_;
  Eigen::LLT<RMatrix> llt_;
};

/// One-shot data-consistency step: argmin_c ||y - Psi c||^2 + rho ||c - v||^2.
[[nodiscard]] CVector data_consistency(const CVector& y, const LagEmbedding& embedding,
                                       const CVector& v, double rho);

/// Leaves the lag sequence unchanged.
struct IdentityRegularizer {};

/// Magnitude shrinkage max(|u_k| - alpha, 0) * u_k/|u_k| per lag, with
/// alpha = alpha_rel * mean_p |y_p| so the threshold follows the pixel's
/// power.
struct SoftThresholdRegularizer {
  double alpha_rel = 0.05;
};

using Regularizer = std::variant<IdentityRegularizer, SoftThresholdRegularizer>;

[[nodiscard]] CVector complex_soft_threshold(const CVector& u, double alpha);

struct SolverConfig {
  int iterations = 20;
  /// One value applies to every iteration; otherwise one value per iteration.
  std::vector<double> rho{1.0};
  int dykstra_iters = 3;
  double psd_eig_floor = 0.0;
  Regularizer regularizer = SoftThresholdRegularizer{};

  [[nodiscard]] double rho_at(int iteration) const;
  void validate() const;
};

/// Per-iteration callback: (iteration index, structured iterate).
using IterationObserver = std::function<void(int, const ToeplitzCovariance&)>;

/// Iterates prox -> data consistency -> Dykstra projection -> lag
/// extraction starting from u = Psi^H y. Holds the cached factorizations;
/// immutable after construction and shareable across threads.
class ClassicalSolver {
 public:
  ClassicalSolver(const LagEmbedding& embedding, SolverConfig config);

  [[nodiscard]] const SolverConfig& config() const noexcept { return config_; }
  [[nodiscard]] const LagEmbedding& embedding() const noexcept { return embedding_; }

  /// Throws TomoError naming the iteration when an iterate is non-finite.
  [[nodiscard]] ToeplitzCovariance solve(const CVector& y,
                                         const IterationObserver& observer = {}) const;

 private:
  const DataConsistency& factor_for(int iteration) const;

  const LagEmbedding& embedding_;
  SolverConfig config_;
  std::vector<DataConsistency> factors_;
};

[[nodiscard]] ToeplitzCovariance solve_classical(const CVector& y, const LagEmbedding& embedding,
                                                 const SolverConfig& config);

/// Throws TomoError mentioning `where` if any entry is NaN or infinite.
void require_finite(const CVector& v, const std::string& where);

}  // namespace tomo
