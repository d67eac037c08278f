#include "tomo/crlb.hpp"

#include <gtest/gtest.h>

using namespace tomo;

namespace {

AcquisitionGeometry toy5() { return AcquisitionGeometry({-60.0, -25.0, 0.0, 30.0, 60.0}, 0.031, 7.0e5); }

CVector model(const AcquisitionGeometry& g, const RVector& theta) {
  ScattererSet sc;
  for (int k = 0; k < theta.size() / 3; ++k) {
    const cdouble gamma(theta(3 * k + 1), theta(3 * k + 2));
    sc.push_back({theta(3 * k), std::abs(gamma), std::arg(gamma)});
  }
  return noiseless_signal(g, sc);
}

// Bound from a central-difference Jacobian of the noiseless model.
std::vector<double> fd_crlb(const AcquisitionGeometry& g, const ScattererSet& sc, double snr_db) {
  const int k = static_cast<int>(sc.size());
  RVector theta(3 * k);
  for (int i = 0; i < k; ++i) {
    const cdouble gamma = sc[static_cast<std::size_t>(i)].reflectivity();
    theta.segment(3 * i, 3) << sc[static_cast<std::size_t>(i)].elevation, gamma.real(), gamma.imag();
  }
  CMatrix jac(g.size(), 3 * k);
  for (int p = 0; p < 3 * k; ++p) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta(p)));
    RVector plus = theta, minus = theta;
    plus(p) += h;
    minus(p) -= h;
    jac.col(p) = (model(g, plus) - model(g, minus)) / (2.0 * h);
  }
  const CVector x = noiseless_signal(g, sc);
  const double sigma2 = (x.squaredNorm() / g.size()) / std::pow(10.0, snr_db / 10.0);
  const RMatrix fisher = (2.0 / sigma2) * (jac.adjoint() * jac).real();
  const RMatrix inv = fisher.inverse();
  std::vector<double> out;
  for (int i = 0; i < k; ++i) out.push_back(std::sqrt(inv(3 * i, 3 * i)));
  return out;
}

}  // namespace

TEST(Crlb, MatchesFiniteDifferenceFisher) {
  const auto g = toy5();
  for (const ScattererSet& sc : {ScattererSet{{12.0, 1.0, 0.3}},
                                 ScattererSet{{-30.0, 1.0, 0.0}, {25.0, 1.5, 2.0}}}) {
    const auto bound = crlb_elevation(g, sc, 10.0);
    const auto oracle = fd_crlb(g, sc, 10.0);
    ASSERT_EQ(bound.size(), oracle.size());
    for (std::size_t i = 0; i < bound.size(); ++i) EXPECT_NEAR(bound[i], oracle[i], 0.01 * oracle[i]);
  }
}

TEST(Crlb, JacobianMatchesFiniteDifferences) {
  const auto g = toy5();
  const ScattererSet sc{{-30.0, 1.0, 0.0}, {25.0, 1.5, 2.0}};
  const CMatrix jac = signal_jacobian(g, sc);
  ASSERT_EQ(jac.cols(), 6);
  RVector theta(6);
  theta << -30.0, 1.0, 0.0, 25.0, std::polar(1.5, 2.0).real(), std::polar(1.5, 2.0).imag();
  for (int p = 0; p < 6; ++p) {
    RVector plus = theta, minus = theta;
    plus(p) += 1e-6;
    minus(p) -= 1e-6;
    const CVector fd = (model(g, plus) - model(g, minus)) / 2e-6;
    EXPECT_LT((jac.col(p) - fd).norm(), 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST(Crlb, ScalesWithSnr) {
  const auto g = AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5);
  const ScattererSet sc{{-18.0, 1.0, 0.0}, {18.0, 1.0, 1.0}};
  const auto a = crlb_elevation(g, sc, 0.0);
  const auto b = crlb_elevation(g, sc, 20.0);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(a[i] / b[i], 10.0, 1e-9);
}

TEST(Crlb, ReferenceGeometrySingleScattererAt10dB) {
  const auto g = AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5);
  // Frozen from the finite-difference oracle above.
  const double oracle = fd_crlb(g, {{0.0, 1.0, 0.0}}, 10.0)[0];
  EXPECT_NEAR(crlb_elevation(g, {{0.0, 1.0, 0.0}}, 10.0)[0], oracle, 1e-6);
  EXPECT_NEAR(oracle, 0.9483, 1e-4);
}

TEST(Crlb, GrowsAsSeparationShrinks) {
  const auto g = AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5);
  double previous = 0.0;
  for (double sep : {20.0, 10.0, 5.0, 2.0, 0.5}) {
    const double b = crlb_elevation(g, {{-sep / 2, 1.0, 0.0}, {sep / 2, 1.0, 0.7}}, 10.0)[0];
    EXPECT_GT(b, previous);
    previous = b;
  }
  EXPECT_GT(previous, 100.0);
}

TEST(Crlb, CoincidentScatterersSingular) {
  const auto g = toy5();
  EXPECT_THROW((void)crlb_elevation(g, {{5.0, 1.0, 0.0}, {5.0, 1.0, 0.0}}, 10.0), TomoError);
}
