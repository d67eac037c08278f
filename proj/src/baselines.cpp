#include "tomo/baselines.hpp"

#include "tomo/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tomo {

ElevationGrid::ElevationGrid(const AcquisitionGeometry& geometry, double lo, double hi,
                             double spacing)
    : spacing_(spacing) {
  if (!(spacing > 0.0)) throw TomoError("elevation grid spacing must be positive");
  if (!(hi >= lo)) throw TomoError("elevation grid needs hi >= lo");
  const int count = static_cast<int>(std::floor((hi - lo) / spacing + 1e-9)) + 1;
  for (int l = 0; l < count; ++l) points_.push_back(lo + l * spacing);
  const int n = geometry.size();
  steering_.resize(n, count);
  for (int l = 0; l < count; ++l) {
    for (int i = 0; i < n; ++i) {
      steering_(i, l) = std::polar(1.0, steering_phase(geometry, i, points_[static_cast<std::size_t>(l)]));
    }
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(steering_ * steering_.adjoint(),
                                            Eigen::EigenvaluesOnly);
  lipschitz_ = es.eigenvalues().maxCoeff();
}

double l1_objective(const CVector& g, const ElevationGrid& grid, const CVector& gamma, double mu) {
  return 0.5 * (g - grid.steering() * gamma).squaredNorm() + mu * gamma.cwiseAbs().sum();
}

std::vector<int> largest_local_maxima(const RVector& values, int count) {
  const int n = static_cast<int>(values.size());
  std::vector<int> maxima;
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && values(j + 1) == values(i)) ++j;
    const bool left_ok = i == 0 || values(i - 1) < values(i);
    const bool right_ok = j == n - 1 || values(j + 1) < values(i);
    if (left_ok && right_ok && values(i) > 0.0) maxima.push_back((i + j) / 2);
    i = j + 1;
  }
  std::stable_sort(maxima.begin(), maxima.end(),
                   [&](int a, int b) { return values(a) > values(b); });
  if (static_cast<int>(maxima.size()) > count) maxima.resize(static_cast<std::size_t>(count));
  return maxima;
}

L1Result l1_grid_inversion(const CVector& g, const ElevationGrid& grid, const L1Config& config,
                           int k) {
  if (g.size() != grid.steering().rows()) throw TomoError("observation length does not match grid");
  if (!(config.mu_rel > 0.0)) throw TomoError("mu must be positive");
  if (k == 0) throw TomoError("l1_grid_inversion needs K != 0");
  const CMatrix& r = grid.steering();
  const Eigen::Index l = r.cols();
  const CVector rhg = r.adjoint() * g;
  L1Result res;
  res.mu = config.mu_rel * rhg.cwiseAbs().maxCoeff();
  res.coefficients = CVector::Zero(l);
  if (!(res.mu > 0.0)) {
    res.converged = true;
    return res;
  }
  const double step = 1.0 / grid.lipschitz();
  const CMatrix gram = r.adjoint() * r;

  CVector x = CVector::Zero(l);
  CVector zk = x;
  double tk = 1.0;
  double fx = l1_objective(g, grid, x, res.mu);
  for (int it = 0; it < config.max_iters; ++it) {
    const CVector grad = gram * zk - rhg;
    const CVector cand = [&] {
      CVector w = zk - step * grad;
      const double thr = step * res.mu;
      for (Eigen::Index i = 0; i < l; ++i) {
        const double mag = std::abs(w(i));
        w(i) = mag > thr ? w(i) * ((mag - thr) / mag) : cdouble(0.0, 0.0);
      }
      return w;
    }();
    const double fc = l1_objective(g, grid, cand, res.mu);
    const CVector prev = x;
    const bool accepted = fc <= fx;
    if (accepted) {
      x = cand;
      fx = fc;
    }
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    zk = x + (tk / tn) * (cand - x) + ((tk - 1.0) / tn) * (x - prev);
    tk = tn;
    res.objective.push_back(fx);
    res.iterations = it + 1;
    const double denom = std::max(prev.norm(), 1e-300);
    if (accepted && it > 0 && (x - prev).norm() / denom < config.tol) {
      res.converged = true;
      break;
    }
  }
  res.coefficients = x;

  const RVector mag = x.cwiseAbs();
  const int want = std::abs(k);
  std::vector<int> peaks = largest_local_maxima(mag, want);
  if (k < 0 && !peaks.empty()) {
    const double top = mag(peaks.front());
    std::erase_if(peaks, [&](int p) { return mag(p) < config.peak_rel * top; });
  }
  std::sort(peaks.begin(), peaks.end());
  if (peaks.empty()) return res;
  CMatrix sub(r.rows(), static_cast<Eigen::Index>(peaks.size()));
  for (std::size_t i = 0; i < peaks.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = r.col(peaks[i]);
  const CVector amp = sub.colPivHouseholderQr().solve(g);
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    res.peaks.push_back(grid.points()[static_cast<std::size_t>(peaks[i])]);
    res.amplitudes.push_back(amp(static_cast<Eigen::Index>(i)));
  }
  return res;
}

CMatrix direct_toeplitz(const CVector& g) {
  return toeplitz_from_lags(extract_lags(g * g.adjoint()));
}

bool is_uniform(const AcquisitionGeometry& geometry, double rel_tol) {
  const auto& b = geometry.baselines();
  const std::size_t n = b.size();
  const double step = (b.back() - b.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(b[i] - (b.front() + step * static_cast<double>(i))) > rel_tol * step) return false;
  }
  return true;
}

ReadoutScale uniform_array_scale(const AcquisitionGeometry& geometry) {
  if (!is_uniform(geometry)) {
    throw TomoError("method requires uniformly spaced ascending baselines");
  }
  const double step = geometry.span() / (geometry.size() - 1);
  return {geometry.wavelength(), geometry.slant_range(), step};
}

std::vector<double> music_grid(const CMatrix& t, const std::vector<double>& points, int k,
                               const ReadoutScale& scale) {
  const CMatrix un = noise_subspace(t, k);
  const RVector p = music_spectrum(un, points, scale);
  std::vector<int> idx = largest_local_maxima(p, k);
  std::vector<double> out;
  for (int i : idx) out.push_back(points[static_cast<std::size_t>(i)]);
  std::sort(out.begin(), out.end());
  return out;
}

AnmResult anm_admm(const CVector& g, const AcquisitionGeometry& geometry, const AnmConfig& config,
                   double noise_sigma) {
  if (!is_uniform(geometry)) {
    throw TomoError("ANM-ADMM supports uniformly spaced baselines only");
  }
  const int n = geometry.size();
  if (g.size() != n) throw TomoError("observation length does not match geometry");
  if (!(config.rho > 0.0)) throw TomoError("ANM-ADMM rho must be positive");
  if (config.max_iters < 1) throw TomoError("ANM-ADMM needs at least one iteration");
  AnmResult res;
  res.tau = config.tau > 0.0
                ? config.tau
                : config.tau_scale * noise_sigma * n * std::sqrt(std::log(static_cast<double>(n)));
  if (!(res.tau > 0.0)) throw TomoError("ANM-ADMM tau must be positive (set tau or noise sigma)");
  const double rho = config.rho;
  const double tau = res.tau;

  CMatrix z = CMatrix::Zero(n + 1, n + 1);
  CMatrix lam = CMatrix::Zero(n + 1, n + 1);
  CVector u = CVector::Zero(n);
  CVector x = CVector::Zero(n);
  double t = 0.0;
  for (int it = 0; it < config.max_iters; ++it) {
    const CMatrix w = hermitian_part(z - lam / rho);
    u = extract_lags(w.topLeftCorner(n, n));
    u(0) = cdouble(u(0).real() - tau / (2.0 * rho * n), 0.0);
    const CVector wx = w.topRightCorner(n, 1);
    x = (g + 2.0 * rho * wx) / (1.0 + 2.0 * rho);
    t = w(n, n).real() - tau / (2.0 * n * rho);

    CMatrix theta(n + 1, n + 1);
    theta.topLeftCorner(n, n) = toeplitz_from_lags(u);
    theta.topRightCorner(n, 1) = x;
    theta.bottomLeftCorner(1, n) = x.adjoint();
    theta(n, n) = t;

    const CMatrix z_prev = z;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(theta + lam / rho));
    if (es.info() != Eigen::Success) throw TomoError("ANM-ADMM eigendecomposition failed");
    const RVector clamped = es.eigenvalues().cwiseMax(0.0);
    z = hermitian_part(es.eigenvectors() * clamped.cast<cdouble>().asDiagonal() *
                       es.eigenvectors().adjoint());
    lam += rho * (theta - z);

    const double primal = (theta - z).norm();
    const double dual = rho * (z - z_prev).norm();
    res.primal_residual.push_back(primal);
    res.dual_residual.push_back(dual);
    res.min_eig.push_back(min_eigenvalue(z));
    res.iterations = it + 1;
    if (!u.allFinite() || !x.allFinite()) {
      throw TomoError("ANM-ADMM diverged at iteration " + std::to_string(it));
    }
    const double scale = std::max(1.0, z.norm());
    if (primal < config.tol * scale && dual < config.tol * scale) break;
  }
  res.lags = u;
  res.signal = x;
  res.t = t;
  return res;
}

}  // namespace tomo
