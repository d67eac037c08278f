#include "tomo/inversion.hpp"
#include "tomo/toeplitz.hpp"

#include <gtest/gtest.h>

using namespace tomo;

namespace {

AcquisitionGeometry xband20() { return AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5); }

CVector noiseless(const AcquisitionGeometry& geom, const ScattererSet& sc) {
  Rng rng(0);
  return simulate_observation(geom, sc, INFINITY, rng);
}

}  // namespace

TEST(ElevationGrid, SteeringEntriesMatchPhase) {
  const auto geom = xband20();
  const ElevationGrid grid(geom, -10.0, 10.0, 0.5);
  EXPECT_EQ(grid.size(), 41);
  for (int n = 0; n < geom.size(); n += 5) {
    for (int l = 0; l < grid.size(); l += 7) {
      const cdouble e = std::exp(cdouble(0.0, steering_phase(geom, n, grid.points()[static_cast<std::size_t>(l)])));
      EXPECT_LT(std::abs(grid.steering()(n, l) - e), 1e-14);
    }
  }
  const RMatrix gram = (grid.steering().adjoint() * grid.steering()).real();
  EXPECT_NEAR(grid.lipschitz(), Eigen::SelfAdjointEigenSolver<CMatrix>(grid.steering().adjoint() * grid.steering()).eigenvalues().maxCoeff(), 1e-8 * gram.norm());
  EXPECT_THROW(ElevationGrid(geom, 0.0, 1.0, 0.0), TomoError);
}

TEST(L1, OnGridScattererPeaksExactly) {
  const auto geom = xband20();
  const ElevationGrid grid(geom, -100.0, 100.0, 1.0);
  L1Config cfg;
  cfg.mu_rel = 0.05;
  const auto res = l1_grid_inversion(noiseless(geom, {{23.0, 1.0, 0.4}}), grid, cfg, 1);
  ASSERT_EQ(res.peaks.size(), 1u);
  EXPECT_EQ(res.peaks[0], 23.0);
  EXPECT_NEAR(std::abs(res.amplitudes[0]), 1.0, 1e-6);
}

TEST(L1, ZeroDataZeroSolution) {
  const auto geom = xband20();
  const ElevationGrid grid(geom, -100.0, 100.0, 1.0);
  const auto res = l1_grid_inversion(CVector::Zero(20), grid, L1Config{}, 1);
  EXPECT_EQ(res.coefficients.norm(), 0.0);
  EXPECT_TRUE(res.peaks.empty());
}

TEST(L1, ObjectiveNonIncreasing) {
  const auto geom = xband20();
  const ElevationGrid grid(geom, -100.0, 100.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const ScattererSet sc{{-14.3, 1.0, 0.0}, {27.6, 0.8, 1.3}};
    const CVector g = simulate_observation(geom, sc, 5.0, rng);
    const auto res = l1_grid_inversion(g, grid, L1Config{}, 2);
    ASSERT_FALSE(res.objective.empty());
    for (std::size_t i = 1; i < res.objective.size(); ++i) {
      EXPECT_LE(res.objective[i], res.objective[i - 1] + 1e-12);
    }
    EXPECT_NEAR(res.objective.back(), l1_objective(g, grid, res.coefficients, res.mu), 1e-9);
  }
}

TEST(L1, OrderSelectionFindsTwoWellSeparated) {
  const auto geom = xband20();
  const ElevationGrid grid(geom, -100.0, 100.0, 1.0);
  const auto res = l1_grid_inversion(noiseless(geom, {{-40.0, 1.0, 0.0}, {40.0, 1.0, 2.0}}), grid,
                                     L1Config{}, -2);
  ASSERT_EQ(res.peaks.size(), 2u);
  EXPECT_NEAR(res.peaks[0], -40.0, 1.0);
  EXPECT_NEAR(res.peaks[1], 40.0, 1.0);
}

TEST(LocalMaxima, PicksLargestPeaks) {
  RVector v(9);
  v << 0, 3, 1, 1, 5, 5, 2, 0, 4;
  const auto idx = largest_local_maxima(v, 3);
  ASSERT_EQ(idx.size(), 3u);
  EXPECT_EQ(idx[0], 4);  // plateau counted once
  EXPECT_EQ(idx[1], 8);  // endpoint
  EXPECT_EQ(idx[2], 1);
}

TEST(DirectToeplitz, SubdiagonalMeansOfOuterProduct) {
  CVector g(3);
  g << cdouble(1, 1), cdouble(2, 0), cdouble(0, -1);
  const CMatrix outer = g * g.adjoint();
  const CMatrix t = direct_toeplitz(g);
  EXPECT_LT((t - toeplitz_from_lags(extract_lags(outer))).norm(), 1e-14);
}

TEST(IsUniform, DetectsSpacing) {
  EXPECT_TRUE(is_uniform(xband20()));
  EXPECT_FALSE(is_uniform(AcquisitionGeometry({0.0, 10.0, 25.0}, 0.031, 7.0e5)));
}

TEST(MusicGrid, OnGridRankOneHitsGridPoint) {
  const auto geom = xband20();
  const ReadoutScale scale = uniform_array_scale(geom);
  const CVector a = virtual_steering(20, 31.0, scale);
  std::vector<double> pts;
  for (int s = -100; s <= 100; ++s) pts.push_back(s);
  const auto est = music_grid(a * a.adjoint() + 1e-6 * CMatrix::Identity(20, 20), pts, 1, scale);
  ASSERT_EQ(est.size(), 1u);
  EXPECT_EQ(est[0], 31.0);
}

TEST(MusicGrid, WithinOneStepOfRootMusic) {
  const auto geom = xband20();
  const ReadoutScale scale = uniform_array_scale(geom);
  std::vector<double> pts;
  for (int s = -100; s <= 100; ++s) pts.push_back(s);
  for (double s : {-55.3, -3.7, 18.45, 66.6}) {
    const CMatrix t = direct_toeplitz(noiseless(geom, {{s, 1.0, 0.0}}));
    const auto grid_est = music_grid(t, pts, 1, scale);
    const auto root_est = root_music(t, 1, scale);
    EXPECT_LE(std::abs(grid_est[0] - root_est.elevations[0]), 1.0);
  }
}

TEST(Anm, NoiselessSingleScatterer) {
  const auto geom = xband20();
  AnmConfig cfg;
  cfg.tau = 1e-3;
  cfg.max_iters = 2000;
  for (double s : {-42.0, 6.3, 29.9}) {
    const auto res = anm_admm(noiseless(geom, {{s, 1.0, 0.5}}), geom, cfg, 0.0);
    const auto est = root_music(toeplitz_from_lags(res.lags), 1, uniform_array_scale(geom));
    EXPECT_NEAR(est.elevations[0], s, 0.05);
  }
}

TEST(Anm, HugeTauGivesZeroSignal) {
  const auto geom = xband20();
  AnmConfig cfg;
  cfg.tau = 1e8;
  const auto res = anm_admm(noiseless(geom, {{5.0, 1.0, 0.0}}), geom, cfg, 0.0);
  EXPECT_LT(res.signal.norm(), 1e-3);

  InversionConfig icfg;
  icfg.anm.tau = 1e8;
  const Inverter inv(Method::kAnmAdmm, geom, icfg);
  const auto est = inv.invert(noiseless(geom, {{5.0, 1.0, 0.0}}), 0, 0.1);
  EXPECT_LE(est.order, 1);
}

TEST(Anm, AugmentedMatrixStaysPsdAndDualResidualFalls) {
  const auto geom = xband20();
  Rng rng(3);
  const CVector g = simulate_observation(geom, ScattererSet{{-20.0, 1.0, 0.0}, {30.0, 1.0, 1.0}}, 10.0, rng);
  AnmConfig cfg;
  cfg.max_iters = 200;
  cfg.tol = 0.0;
  const auto res = anm_admm(g, geom, cfg, 0.3);
  for (double e : res.min_eig) EXPECT_GE(e, -1e-8);
  ASSERT_GE(res.dual_residual.size(), 100u);
  double early = 0.0, late = 0.0;
  for (int i = 0; i < 20; ++i) early += res.dual_residual[static_cast<std::size_t>(i)];
  for (std::size_t i = res.dual_residual.size() - 20; i < res.dual_residual.size(); ++i) late += res.dual_residual[i];
  EXPECT_LT(late, early);
}

TEST(Anm, RejectsNonuniform) {
  const AcquisitionGeometry g({0.0, 10.0, 25.0, 40.0}, 0.031, 7.0e5);
  EXPECT_THROW((void)anm_admm(CVector::Ones(4), g, AnmConfig{}, 0.1), TomoError);
  EXPECT_FALSE(Inverter::supports(Method::kAnmAdmm, g, InversionConfig{}));
}
