#include "tomo/lag_embedding.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace tomo {

void VirtualLagGrid::validate() const {
  if (n_virtual < 2) throw TomoError("virtual lag grid needs n_virtual >= 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw TomoError("virtual lag spacing must be positive");
  }
}

namespace {

constexpr double kSnap = 1e-9;

InterpolationRow interpolation_row(double lag, const VirtualLagGrid& grid) {
  const double pos = lag / grid.spacing;
  const int last = grid.n_virtual - 1;
  if (pos >= last - kSnap) return {last, 1.0, 0.0};
  int d = static_cast<int>(std::floor(pos));
  double eta = pos - d;
  if (eta > 1.0 - kSnap) {
    ++d;
    eta = 0.0;
  } else if (eta < kSnap) {
    eta = 0.0;
  }
  if (d >= last) return {last, 1.0, 0.0};
  return {d, 1.0 - eta, eta};
}

}  // namespace

LagEmbedding::LagEmbedding(const AcquisitionGeometry& geometry, VirtualLagGrid grid)
    : geometry_(geometry), grid_(grid) {
  grid_.validate();
  const double max_lag = grid_.max_lag();
  const double span = geometry_.span();
  const double tol = 1e-9 * std::max(1.0, max_lag);
  if (span > max_lag + tol) {
    std::ostringstream msg;
    msg << "coverage condition violated: baseline span " << span
        << " m exceeds the virtual lag range (N_v-1)*spacing = " << max_lag << " m (N_v = "
        << grid_.n_virtual << ", spacing = " << grid_.spacing
        << " m); a larger virtual lag grid (and a model trained for it) is required";
    throw CoverageError(msg.str());
  }

  const auto& b = geometry_.baselines();
  const int n = geometry_.size();
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      const double lag = b[static_cast<std::size_t>(m)] - b[static_cast<std::size_t>(k)];
      if (!(lag > 0.0) || lag > max_lag + tol) continue;
      pairs_.push_back({m, k});
      lags_.push_back(lag);
      rows_.push_back(interpolation_row(lag, grid_));
    }
  }

  const int nv = grid_.n_virtual;
  gram_ = RMatrix::Zero(nv, nv);
  for (const auto& r : rows_) {
    gram_(r.column, r.column) += r.weight * r.weight;
    if (r.next_weight != 0.0) {
      gram_(r.column + 1, r.column + 1) += r.next_weight * r.next_weight;
      gram_(r.column, r.column + 1) += r.weight * r.next_weight;
      gram_(r.column + 1, r.column) += r.weight * r.next_weight;
    }
  }
}

RMatrix LagEmbedding::psi_dense() const {
  RMatrix psi = RMatrix::Zero(n_pairs(), n_virtual());
  for (int p = 0; p < n_pairs(); ++p) {
    const auto& r = rows_[static_cast<std::size_t>(p)];
    psi(p, r.column) = r.weight;
    if (r.next_weight != 0.0) psi(p, r.column + 1) = r.next_weight;
  }
  return psi;
}

CVector LagEmbedding::apply(const CVector& lags) const {
  if (lags.size() != n_virtual()) throw TomoError("lag vector length does not match N_v");
  CVector y(n_pairs());
  for (int p = 0; p < n_pairs(); ++p) {
    const auto& r = rows_[static_cast<std::size_t>(p)];
    cdouble v = r.weight * lags(r.column);
    if (r.next_weight != 0.0) v += r.next_weight * lags(r.column + 1);
    y(p) = v;
  }
  return y;
}

CVector LagEmbedding::adjoint(const CVector& y) const {
  if (y.size() != n_pairs()) throw TomoError("pairwise vector length does not match P");
  CVector out = CVector::Zero(n_virtual());
  for (int p = 0; p < n_pairs(); ++p) {
    const auto& r = rows_[static_cast<std::size_t>(p)];
    out(r.column) += r.weight * y(p);
    if (r.next_weight != 0.0) out(r.column + 1) += r.next_weight * y(p);
  }
  return out;
}

void LagEmbedding::write_text(std::ostream& out) const {
  out << "# lag embedding\n";
  out << "# n_baselines " << geometry_.size() << "\n";
  out << "# n_virtual " << grid_.n_virtual << "\n";
  out << "# lag_spacing " << std::setprecision(17) << grid_.spacing << "\n";
  out << "# n_pairs " << n_pairs() << "\n";
  out << "# columns: p m n lag col weight [col+1 weight]\n";
  for (int p = 0; p < n_pairs(); ++p) {
    const auto& pr = pairs_[static_cast<std::size_t>(p)];
    const auto& r = rows_[static_cast<std::size_t>(p)];
    out << p << ' ' << pr.m << ' ' << pr.n << ' ' << std::setprecision(17)
        << lags_[static_cast<std::size_t>(p)] << ' ' << r.column << ' ' << r.weight;
    if (r.next_weight != 0.0) out << ' ' << r.column + 1 << ' ' << r.next_weight;
    out << '\n';
  }
}

CVector pairwise_products(const CVector& observation, const LagEmbedding& embedding) {
  if (observation.size() != embedding.geometry().size()) {
    throw TomoError("observation length " + std::to_string(observation.size()) +
                    " does not match the embedding geometry (N = " +
                    std::to_string(embedding.geometry().size()) + ")");
  }
  CVector y(embedding.n_pairs());
  const auto& pairs = embedding.pairs();
  for (int p = 0; p < embedding.n_pairs(); ++p) {
    const auto& pr = pairs[static_cast<std::size_t>(p)];
    y(p) = observation(pr.m) * std::conj(observation(pr.n));
  }
  return y;
}

CVector ls_lag_estimate(const CVector& y, const LagEmbedding& embedding, double ridge) {
  if (!(ridge >= 0.0)) throw TomoError("ridge must be non-negative");
  const int nv = embedding.n_virtual();
  RMatrix a = embedding.gram() + ridge * RMatrix::Identity(nv, nv);
  if (ridge == 0.0) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(a, Eigen::EigenvaluesOnly);
    const double hi = es.eigenvalues().maxCoeff();
    const double lo = es.eigenvalues().minCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi) {
      throw TomoError(
          "Psi^H Psi is singular for this geometry (some virtual lags are unobserved); "
          "use a positive ridge");
    }
  }
  const CVector rhs = embedding.adjoint(y);
  Eigen::LDLT<RMatrix> ldlt(a);
  RMatrix parts(nv, 2);
  parts.col(0) = rhs.real();
  parts.col(1) = rhs.imag();
  const RMatrix sol = ldlt.solve(parts);
  CVector out(nv);
  out.real() = sol.col(0);
  out.imag() = sol.col(1);
  return out;
}

}  // namespace tomo
