#include "tomo/spectral_readout.hpp"

#include "tomo/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tomo {

RVector eigenvalues_descending(const CMatrix& t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(t), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw TomoError("eigendecomposition failed");
  return es.eigenvalues().reverse();
}

CMatrix noise_subspace(const CMatrix& t, int k) {
  if (t.rows() != t.cols()) throw TomoError("noise_subspace needs a square matrix");
  const int n = static_cast<int>(t.rows());
  if (k < 1 || k >= n) {
    throw TomoError("noise_subspace needs 1 <= K < N (K = " + std::to_string(k) +
                    ", N = " + std::to_string(n) + ")");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(t));
  if (es.info() != Eigen::Success) throw TomoError("eigendecomposition failed");
  // Eigen sorts ascending, so the N-K smallest come first.
  return es.eigenvectors().leftCols(n - k);
}

CVector root_music_polynomial(const CMatrix& noise_basis) {
  const Eigen::Index n = noise_basis.rows();
  const CMatrix c = noise_basis * noise_basis.adjoint();
  CVector coeffs = CVector::Zero(2 * n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) coeffs(j - i + n - 1) += c(i, j);
  }
  return coeffs;
}

std::vector<cdouble> polynomial_roots(const CVector& ascending) {
  Eigen::Index deg = ascending.size() - 1;
  const double scale = ascending.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) throw TomoError("cannot root the zero polynomial");
  while (deg > 0 && std::abs(ascending(deg)) <= 1e-14 * scale) --deg;
  if (deg == 0) return {};
  CMatrix companion = CMatrix::Zero(deg, deg);
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  const cdouble lead = ascending(deg);
  for (Eigen::Index i = 0; i < deg; ++i) companion(i, deg - 1) = -ascending(i) / lead;
  Eigen::ComplexEigenSolver<CMatrix> es(companion, false);
  if (es.info() != Eigen::Success) throw TomoError("polynomial rooting failed");
  const CVector& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

namespace {

struct RootPair {
  cdouble center;
  double distance;
  double inner_modulus;
};

// Groups roots into conjugate-reciprocal pairs (z, 1/conj(z)). The pair
// mean cancels the first-order splitting of double roots on the circle.
std::vector<RootPair> pair_roots(const std::vector<cdouble>& roots) {
  std::vector<std::size_t> order(roots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(roots[a]) < std::abs(roots[b]);
  });
  std::vector<bool> used(roots.size(), false);
  std::vector<RootPair> pairs;
  for (std::size_t idx : order) {
    if (used[idx]) continue;
    used[idx] = true;
    const cdouble z = roots[idx];
    const cdouble mirror = std::abs(z) > 0.0 ? 1.0 / std::conj(z) : cdouble(1e300, 0.0);
    std::size_t best = roots.size();
    double best_d = 0.0;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(roots[j] - mirror);
      if (best == roots.size() || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    if (best == roots.size()) {
      pairs.push_back({z, std::abs(1.0 - std::abs(z)), std::abs(z)});
      continue;
    }
    used[best] = true;
    const cdouble w = roots[best];
    const double dist = std::min(std::abs(1.0 - std::abs(z)), std::abs(1.0 - std::abs(w)));
    pairs.push_back({0.5 * (z + w), dist, std::min(std::abs(z), std::abs(w))});
  }
  return pairs;
}

}  // namespace

ElevationEstimate root_music(const CMatrix& t, int k, const ReadoutScale& scale) {
  ElevationEstimate est;
  est.eigenvalues = eigenvalues_descending(t);
  const CMatrix un = noise_subspace(t, k);
  const auto roots = polynomial_roots(root_music_polynomial(un));
  auto pairs = pair_roots(roots);
  if (pairs.size() < static_cast<std::size_t>(k)) {
    throw TomoError("Root-MUSIC found fewer than K admissible roots");
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const RootPair& a, const RootPair& b) { return a.distance < b.distance; });
  for (int i = 0; i < k; ++i) {
    double phi = std::arg(pairs[static_cast<std::size_t>(i)].center);
    if (phi <= -kPi) phi = kPi;
    est.elevations.push_back(phi * scale.meters_per_radian());
    est.root_moduli.push_back(pairs[static_cast<std::size_t>(i)].inner_modulus);
  }
  // Sort elevations ascending and keep the moduli aligned.
  std::vector<std::size_t> idx(est.elevations.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return est.elevations[a] < est.elevations[b]; });
  std::vector<double> el, mod;
  for (std::size_t i : idx) {
    el.push_back(est.elevations[i]);
    mod.push_back(est.root_moduli[i]);
  }
  est.elevations = std::move(el);
  est.root_moduli = std::move(mod);
  est.order = k;
  return est;
}

CVector virtual_steering(int n, double elevation, const ReadoutScale& scale) {
  const double step = scale.phase_step(elevation);
  CVector a(n);
  for (int i = 0; i < n; ++i) a(i) = std::polar(1.0, step * i);
  return a;
}

RVector music_spectrum(const CMatrix& noise_basis, const std::vector<double>& points,
                       const ReadoutScale& scale) {
  const int n = static_cast<int>(noise_basis.rows());
  RVector p(static_cast<Eigen::Index>(points.size()));
  for (std::size_t l = 0; l < points.size(); ++l) {
    const CVector a = virtual_steering(n, points[l], scale);
    const double denom = (noise_basis.adjoint() * a).squaredNorm();
    p(static_cast<Eigen::Index>(l)) = 1.0 / std::max(denom, 1e-300);
  }
  return p;
}

void check_branch(const Interval& admissible, const ReadoutScale& scale) {
  const double lim = scale.branch_limit();
  if (admissible.lo <= -lim || admissible.hi > lim) {
    std::ostringstream msg;
    msg << "admissible elevation interval [" << admissible.lo << ", " << admissible.hi
        << "] exceeds the unambiguous readout branch (-" << lim << ", " << lim
        << "]; phase unwrapping is not supported";
    throw TomoError(msg.str());
  }
}

int estimate_order(const CMatrix& t, const ReadoutScale& scale, double rayleigh,
                   const OrderConfig& config) {
  if (config.k_max < 2 || t.rows() < 3) return 1;
  const RVector ev = eigenvalues_descending(t);
  if (!(ev(0) > 0.0)) return 1;
  const double ratio = ev(1) / ev(0);
  if (!(ratio > config.ratio_threshold)) return 1;
  const ElevationEstimate two = root_music(t, 2, scale);
  for (double s : two.elevations) {
    if (!config.admissible.contains(s)) return 1;
  }
  const double sep = std::abs(two.elevations[1] - two.elevations[0]);
  if (sep < config.min_sep_frac * rayleigh) return 1;
  return 2;
}

}  // namespace tomo
