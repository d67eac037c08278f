#include "tomo/solver.hpp"

#include <cmath>

namespace tomo {

void require_finite(const CVector& v, const std::string& where) {
  if (!v.allFinite()) throw TomoError("non-finite values in " + where);
}

DataConsistency::DataConsistency(const LagEmbedding& embedding, double rho) : rho_(rho) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw TomoError("rho must be positive and finite");
  const int nv = embedding.n_virtual();
  llt_.compute(embedding.gram() + rho * RMatrix::Identity(nv, nv));
  if (llt_.info() != Eigen::Success) throw TomoError("data-consistency factorization failed");
}

CVector DataConsistency::solve(const CVector& psi_h_y, const CVector& v) const {
  const Eigen::Index nv = llt_.matrixLLT().rows();
  if (psi_h_y.size() != nv || v.size() != nv) {
    throw TomoError("data-consistency input length does not match N_v");
  }
  RMatrix rhs(nv, 2);
  rhs.col(0) = psi_h_y.real() + rho_ * v.real();
  rhs.col(1) = psi_h_y.imag() + rho_ * v.imag();
  llt_.solveInPlace(rhs);
  CVector out(nv);
  out.real() = rhs.col(0);
  out.imag() = rhs.col(1);
  return out;
}

CVector data_consistency(const CVector& y, const LagEmbedding& embedding, const CVector& v,
                         double rho) {
  require_finite(y, "data_consistency input y");
  require_finite(v, "data_consistency input v");
  const DataConsistency dc(embedding, rho);
  return dc.solve(embedding.adjoint(y), v);
}

CVector complex_soft_threshold(const CVector& u, double alpha) {
  CVector out(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double mag = std::abs(u(k));
    out(k) = mag > alpha ? u(k) * ((mag - alpha) / mag) : cdouble(0.0, 0.0);
  }
  return out;
}

double SolverConfig::rho_at(int iteration) const {
  if (rho.size() == 1) return rho.front();
  return rho.at(static_cast<std::size_t>(iteration));
}

void SolverConfig::validate() const {
  if (iterations < 1) throw TomoError("solver needs at least one iteration");
  if (dykstra_iters < 1) throw TomoError("dykstra_iters must be >= 1");
  if (rho.empty()) throw TomoError("solver rho list is empty");
  if (rho.size() != 1 && rho.size() != static_cast<std::size_t>(iterations)) {
    throw TomoError("solver rho list must have 1 or `iterations` entries");
  }
  for (double r : rho) {
    if (!(r > 0.0) || !std::isfinite(r)) throw TomoError("every rho must be positive");
  }
  if (!(psd_eig_floor >= 0.0)) throw TomoError("psd_eig_floor must be non-negative");
  if (const auto* st = std::get_if<SoftThresholdRegularizer>(&regularizer)) {
    if (!(st->alpha_rel >= 0.0)) throw TomoError("soft-threshold alpha must be non-negative");
  }
}

ClassicalSolver::ClassicalSolver(const LagEmbedding& embedding, SolverConfig config)
    : embedding_(embedding), config_(std::move(config)) {
  config_.validate();
  factors_.reserve(config_.rho.size());
  for (double r : config_.rho) factors_.emplace_back(embedding_, r);
}

const DataConsistency& ClassicalSolver::factor_for(int iteration) const {
  return factors_.size() == 1 ? factors_.front() : factors_[static_cast<std::size_t>(iteration)];
}

ToeplitzCovariance ClassicalSolver::solve(const CVector& y, const IterationObserver& observer) const {
  if (y.size() != embedding_.n_pairs()) {
    throw TomoError("pairwise vector length does not match the embedding");
  }
  require_finite(y, "pairwise products");
  const CVector psi_h_y = embedding_.adjoint(y);
  const double scale = y.size() > 0 ? y.cwiseAbs().mean() : 0.0;

  CVector u = psi_h_y;
  ToeplitzCovariance t{CVector::Zero(embedding_.n_virtual())};
  for (int it = 0; it < config_.iterations; ++it) {
    CVector v = std::visit(
        [&](const auto& reg) -> CVector {
          using R = std::decay_t<decltype(reg)>;
          if constexpr (std::is_same_v<R, SoftThresholdRegularizer>) {
            return complex_soft_threshold(u, reg.alpha_rel * scale);
          } else {
            return u;
          }
        },
        config_.regularizer);
    v(0) = cdouble(v(0).real(), 0.0);

    const CVector c = factor_for(it).solve(psi_h_y, v);
    t = dykstra_project(toeplitz_from_lags(c), config_.dykstra_iters, config_.psd_eig_floor);
    if (!t.lags.allFinite()) {
      throw TomoError("classical solver diverged at iteration " + std::to_string(it));
    }
    u = t.lags;
    if (observer) observer(it, t);
  }
  return t;
}

ToeplitzCovariance solve_classical(const CVector& y, const LagEmbedding& embedding,
                                   const SolverConfig& config) {
  return ClassicalSolver(embedding, config).solve(y);
}

}  // namespace tomo
