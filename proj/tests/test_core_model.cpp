#include "tomo/core_model.hpp"
#include "tomo/scene_config.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tomo;

namespace {

AcquisitionGeometry xband20() { return AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5); }

constexpr double kRho = 0.031 * 7.0e5 / 600.0;  // 36.1666...

}  // namespace

TEST(SteeringPhase, ZeroBaselineGivesZero) {
  const AcquisitionGeometry g({0.0, 100.0}, 0.031, 7.0e5);
  EXPECT_EQ(steering_phase(g, 0, 50.0), 0.0);
}

TEST(SteeringPhase, RayleighElevationAtEdgeBaselineIsPi) {
  const auto g = xband20();
  EXPECT_NEAR(steering_phase(g, 19, kRho), kPi, 1e-12);
  EXPECT_NEAR(steering_phase(g, 0, kRho), -kPi, 1e-12);
}

TEST(SteeringPhase, LinearInElevationAndBaseline) {
  const AcquisitionGeometry g({-40.0, 12.5, 80.0}, 0.031, 7.0e5);
  for (int n = 0; n < 3; ++n) {
    const double a = steering_phase(g, n, 3.0);
    EXPECT_NEAR(steering_phase(g, n, 6.0), 2.0 * a, 1e-12);
    EXPECT_NEAR(steering_phase(g, n, -3.0), -a, 1e-12);
  }
  EXPECT_NEAR(steering_phase(g, 2, 7.0) / 80.0, steering_phase(g, 1, 7.0) / 12.5, 1e-14);
}

TEST(SteeringPhase, IndexOutOfRangeThrows) {
  EXPECT_THROW((void)steering_phase(xband20(), 20, 0.0), TomoError);
  EXPECT_THROW((void)steering_phase(xband20(), -1, 0.0), TomoError);
}

TEST(Simulate, ZeroElevationNoiselessIsAllOnes) {
  Rng rng(1);
  const ScattererSet sc{{0.0, 1.0, 0.0}};
  const CVector g = simulate_observation(xband20(), sc, INFINITY, rng);
  ASSERT_EQ(g.size(), 20);
  for (int n = 0; n < 20; ++n) EXPECT_EQ(g(n), cdouble(1.0, 0.0));
}

TEST(Simulate, SymmetricPairIsTwiceCosine) {
  Rng rng(1);
  const auto geom = xband20();
  const ScattererSet sc{{-kRho, 1.0, 0.0}, {kRho, 1.0, 0.0}};
  const CVector g = simulate_observation(geom, sc, INFINITY, rng);
  for (int n = 0; n < geom.size(); ++n) {
    const double b = geom.baselines()[static_cast<std::size_t>(n)];
    const double expected = 2.0 * std::cos(4.0 * kPi * b * kRho / (0.031 * 7.0e5));
    EXPECT_NEAR(g(n).real(), expected, 1e-12);
    EXPECT_NEAR(g(n).imag(), 0.0, 1e-12);
  }
}

TEST(Simulate, NoiselessMatchesAnalyticSum) {
  Rng pick(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> b;
    for (int n = 0; n < 7; ++n) b.push_back(200.0 * u(pick));
    const AcquisitionGeometry geom(b, 0.031, 7.0e5);
    ScattererSet sc;
    for (int k = 0; k < 2; ++k) sc.push_back({80.0 * u(pick), 1.0 + u(pick) * 0.5, 3.0 * u(pick)});
    Rng rng(3);
    const CVector g = simulate_observation(geom, sc, INFINITY, rng);
    for (int n = 0; n < geom.size(); ++n) {
      cdouble x = 0.0;
      for (const auto& s : sc) {
        x += std::polar(s.amplitude, s.phase) *
             std::exp(cdouble(0.0, 4.0 * kPi * b[static_cast<std::size_t>(n)] * s.elevation /
                                       (0.031 * 7.0e5)));
      }
      EXPECT_LT(std::abs(g(n) - x), 1e-12);
    }
  }
}

TEST(Simulate, SameSeedSameVector) {
  const ScattererSet sc{{5.0, 1.0, 0.3}};
  Rng a(1234), b(1234);
  const CVector ga = simulate_observation(xband20(), sc, 5.0, a);
  const CVector gb = simulate_observation(xband20(), sc, 5.0, b);
  EXPECT_EQ(ga, gb);
}

TEST(Simulate, MeasuredSnrWithinTolerance) {
  const auto geom = xband20();
  const ScattererSet sc{{12.0, 2.0, 0.0}, {-30.0, 1.0, 1.0}};
  Rng clean_rng(0);
  const CVector x = simulate_observation(geom, sc, INFINITY, clean_rng);
  const double signal_power = x.squaredNorm() / geom.size();
  for (double snr : {0.0, 6.0, 10.0}) {
    Rng rng(77);
    double noise_power = 0.0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
      noise_power += (simulate_observation(geom, sc, snr, rng) - x).squaredNorm();
    }
    noise_power /= static_cast<double>(reps) * geom.size();
    EXPECT_NEAR(10.0 * std::log10(signal_power / noise_power), snr, 0.2);
  }
}

TEST(Simulate, EmptySceneNeedsReferencePower) {
  Rng rng(1);
  EXPECT_THROW((void)simulate_observation(xband20(), {}, 10.0, rng), TomoError);
  const CVector g = simulate_observation(xband20(), {}, 10.0, rng, 1.0);
  EXPECT_EQ(g.size(), 20);
  EXPECT_GT(g.norm(), 0.0);
}

TEST(Simulate, NoiseIsCircular) {
  CVector v = CVector::Zero(200000);
  Rng rng(5);
  add_complex_noise(v, 2.0, rng);
  const double re = v.real().squaredNorm() / v.size();
  const double im = v.imag().squaredNorm() / v.size();
  const double cross = v.real().dot(v.imag()) / v.size();
  EXPECT_NEAR(re, 1.0, 0.02);
  EXPECT_NEAR(im, 1.0, 0.02);
  EXPECT_NEAR(cross, 0.0, 0.02);
}

TEST(Rayleigh, ReferenceGeometryValue) { EXPECT_NEAR(rayleigh_resolution(xband20()), 36.17, 0.01); }

TEST(Rayleigh, DoubledSpanHalves) {
  const auto wide = AcquisitionGeometry::uniform(-300.0, 300.0, 20, 0.031, 7.0e5);
  EXPECT_NEAR(rayleigh_resolution(wide), rayleigh_resolution(xband20()) / 2.0, 1e-12);
}

TEST(Rayleigh, Span363) {
  const AcquisitionGeometry g({-181.5, 0.0, 181.5}, 0.031, 7.0e5);
  // lambda*r/(2*363) evaluates to 29.89; the quoted 29.84 is within 0.1.
  EXPECT_NEAR(rayleigh_resolution(g), 29.8898, 1e-4);
  EXPECT_NEAR(rayleigh_resolution(g), 29.84, 0.1);
}

TEST(Rayleigh, DegenerateSpanThrows) {
  EXPECT_THROW((void)AcquisitionGeometry({5.0, 5.0}, 0.031, 7.0e5), TomoError);
}

TEST(Perturb, ZeroSigmaIsIdentity) {
  Rng rng(1);
  const auto g = xband20();
  EXPECT_EQ(perturb_baselines(g, 0.0, rng).baselines(), g.baselines());
}

TEST(Perturb, EndpointsFixedAndValuesClipped) {
  Rng rng(8);
  const auto g = xband20();
  for (int r = 0; r < 200; ++r) {
    const auto p = perturb_baselines(g, 10.0, rng);
    ASSERT_EQ(p.size(), 20);
    EXPECT_EQ(p.baselines().front(), -150.0);
    EXPECT_EQ(p.baselines().back(), 150.0);
    for (double b : p.baselines()) {
      EXPECT_GE(b, -150.0);
      EXPECT_LE(b, 150.0);
    }
  }
}

TEST(Perturb, LargeJitterClipsExactlyToBoundary) {
  Rng rng(3);
  const auto p = perturb_baselines(xband20(), 1.0e4, rng);
  int at_boundary = 0;
  for (std::size_t i = 1; i + 1 < p.baselines().size(); ++i) {
    const double b = p.baselines()[i];
    if (b == 150.0 || b == -150.0) ++at_boundary;
  }
  EXPECT_GT(at_boundary, 10);
}

TEST(Perturb, TwoBaselinesUnchanged) {
  Rng rng(1);
  const AcquisitionGeometry g({-10.0, 10.0}, 0.031, 7.0e5);
  EXPECT_EQ(perturb_baselines(g, 50.0, rng).baselines(), g.baselines());
}

TEST(Perturb, NegativeSigmaThrows) {
  Rng rng(1);
  EXPECT_THROW((void)perturb_baselines(xband20(), -1.0, rng), TomoError);
}

TEST(Seeds, DeriveSeedSeparatesStreams) {
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
  EXPECT_EQ(derive_seed(7, 3, 4), derive_seed(7, 3, 4));
}

TEST(Softplus, MatchesDefinition) {
  for (double x : {-40.0, -3.0, 0.0, 2.5, 29.0}) {
    EXPECT_NEAR(softplus(x), std::log(1.0 + std::exp(x)), 1e-12 * (1.0 + std::abs(x)));
  }
  EXPECT_EQ(softplus(100.0), 100.0);
}

TEST(SceneConfig, ParsesUniformBaselines) {
  const auto cfg = parse_scene_config(R"({
    "wavelength": 0.031, "slant_range": 700000,
    "baselines_uniform": {"min": -150, "max": 150, "count": 20},
    "scatterers": [{"elevation": 10.0, "amplitude": 2.0, "phase": 0.5}],
    "snr_db": "inf", "rng_seed": 9, "pixels": 3})");
  EXPECT_EQ(cfg.geometry.size(), 20);
  EXPECT_EQ(cfg.geometry.baselines().front(), -150.0);
  EXPECT_EQ(cfg.geometry.baselines().back(), 150.0);
  ASSERT_EQ(cfg.scatterers.size(), 1u);
  EXPECT_EQ(cfg.scatterers[0].amplitude, 2.0);
  EXPECT_TRUE(std::isinf(cfg.run.snr_db));
  EXPECT_EQ(cfg.run.rng_seed, 9u);
  EXPECT_EQ(cfg.pixels, 3);
}

TEST(SceneConfig, MissingWavelengthNamesKey) {
  try {
    (void)parse_scene_config(R"({"slant_range": 7e5, "baselines": [0, 10],
      "scatterers": [], "snr_db": 10, "rng_seed": 1})");
    FAIL() << "expected TomoError";
  } catch (const TomoError& e) {
    EXPECT_NE(std::string(e.what()).find("wavelength"), std::string::npos) << e.what();
  }
}

TEST(SceneConfig, RejectsUnknownKey) {
  EXPECT_THROW((void)parse_scene_config(R"({"wavelength": 0.031, "slant_range": 7e5,
      "baselines": [0, 10], "scatterers": [], "snr_db": 10, "rng_seed": 1, "colour": 3})"),
               TomoError);
}

TEST(SceneConfig, RejectsBothBaselineForms) {
  EXPECT_THROW((void)parse_scene_config(R"({"wavelength": 0.031, "slant_range": 7e5,
      "baselines": [0, 10], "baselines_uniform": {"min": 0, "max": 10, "count": 2}})",
                                        SceneParts::kGeometryOnly),
               TomoError);
}

TEST(SceneConfig, RejectsOutOfRangeScatterer) {
  EXPECT_THROW((void)parse_scene_config(R"({"wavelength": 0.031, "slant_range": 7e5,
      "baselines": [0, 10], "scatterers": [{"elevation": 150}], "snr_db": 10, "rng_seed": 1})"),
               TomoError);
}

TEST(SceneConfig, GeometryOnlyNeedsNoScene) {
  const auto cfg = parse_scene_config(R"({"wavelength": 0.031, "slant_range": 7e5,
      "baselines": [-20, 0, 35]})",
                                      SceneParts::kGeometryOnly);
  EXPECT_EQ(cfg.geometry.size(), 3);
  EXPECT_TRUE(cfg.scatterers.empty());
}
