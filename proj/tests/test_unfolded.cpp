#include "tomo/batch.hpp"
#include "tomo/unfolded.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace tomo;

namespace {

AcquisitionGeometry xband20() { return AcquisitionGeometry::uniform(-150.0, 150.0, 20, 0.031, 7.0e5); }

std::string dump(const UnfoldedModelWeights& w) {
  std::ostringstream out;
  write_weights(w, out);
  return out.str();
}

void replace_once(std::string& s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  ASSERT_NE(pos, std::string::npos) << from;
  s.replace(pos, from.size(), to);
}

}  // namespace

TEST(Conv1d, MatchesDirectCrossCorrelation) {
  Rng rng(1);
  std::normal_distribution<double> n01;
  Conv1dParams c;
  c.out_channels = 3;
  c.in_channels = 2;
  c.kernel = 5;
  for (int i = 0; i < 30; ++i) c.weight.push_back(n01(rng));
  for (int i = 0; i < 3; ++i) c.bias.push_back(n01(rng));
  RMatrix x(2, 9);
  for (int i = 0; i < 2; ++i) {
    for (int t = 0; t < 9; ++t) x(i, t) = n01(rng);
  }
  const RMatrix y = conv1d(c, x);
  // out[o][t] = b[o] + sum_i sum_k w[o][i][k] * xpad[i][t + k], xpad = x padded by 2 zeros.
  RMatrix xpad = RMatrix::Zero(2, 13);
  xpad.middleCols(2, 9) = x;
  for (int o = 0; o < 3; ++o) {
    for (int t = 0; t < 9; ++t) {
      double acc = c.bias[static_cast<std::size_t>(o)];
      for (int i = 0; i < 2; ++i) {
        for (int k = 0; k < 5; ++k) acc += c.weight[static_cast<std::size_t>((o * 2 + i) * 5 + k)] * xpad(i, t + k);
      }
      EXPECT_NEAR(y(o, t), acc, 1e-13);
    }
  }
}

TEST(Weights, RoundTripIsExact) {
  const auto w = make_random_weights(32, 10.0, 3, 4, 5, 0.3, 11);
  const auto back = parse_weights(dump(w));
  EXPECT_EQ(back.n_virtual, 32);
  EXPECT_EQ(back.lag_spacing, 10.0);
  ASSERT_EQ(back.layers.size(), 3u);
  for (std::size_t m = 0; m < 3; ++m) {
    EXPECT_EQ(back.layers[m].conv1.weight, w.layers[m].conv1.weight);
    EXPECT_EQ(back.layers[m].conv2.weight, w.layers[m].conv2.weight);
    EXPECT_EQ(back.layers[m].conv3.bias, w.layers[m].conv3.bias);
    EXPECT_EQ(back.layers[m].raw_rho, w.layers[m].raw_rho);
    EXPECT_EQ(back.layers[m].raw_eig_threshold, w.layers[m].raw_eig_threshold);
  }
  EXPECT_EQ(dump(back), dump(w));
}

TEST(Weights, RejectsOtherVersion) {
  std::string text = dump(make_zero_weights(8, 10.0, 1, 2, 3, 0.0, -40.0));
  replace_once(text, "\"format_version\": 1", "\"format_version\": 2");
  try {
    (void)parse_weights(text);
    FAIL() << "expected TomoError";
  } catch (const TomoError& e) {
    EXPECT_NE(std::string(e.what()).find("format_version"), std::string::npos);
  }
}

TEST(Weights, RejectsUnknownKeyAndBadShape) {
  const std::string base = dump(make_zero_weights(8, 10.0, 1, 2, 3, 0.0, -40.0));
  std::string extra = base;
  replace_once(extra, "\"kernel\": 3", "\"kernel\": 3,\n \"dropout\": 0.1");
  EXPECT_THROW((void)parse_weights(extra), TomoError);

  std::string layers = base;
  replace_once(layers, "\"n_layers\": 1", "\"n_layers\": 2");
  EXPECT_THROW((void)parse_weights(layers), TomoError);

  std::string tag = base;
  replace_once(tag, "\"activation\": \"relu\"", "\"activation\": \"tanh\"");
  EXPECT_THROW((void)parse_weights(tag), TomoError);
}

TEST(Unfolded, RejectsGridMismatch) {
  const LagEmbedding emb(xband20(), {32, 10.0});
  EXPECT_THROW(UnfoldedNetwork(emb, make_zero_weights(40, 10.0, 2, 4, 5, 0.0, -40.0)), TomoError);
  EXPECT_THROW(UnfoldedNetwork(emb, make_zero_weights(32, 12.0, 2, 4, 5, 0.0, -40.0)), TomoError);
}

TEST(Unfolded, ZeroWeightsReduceToClassicalIdentity) {
  const auto geom = xband20();
  const LagEmbedding emb(geom, {32, 10.0});
  const double raw_rho = std::log(std::exp(0.8) - 1.0);  // softplus -> 0.8
  const UnfoldedNetwork net(emb, make_zero_weights(32, 10.0, 12, 16, 5, raw_rho, -40.0));
  SolverConfig cfg;
  cfg.iterations = 12;
  cfg.rho = {0.8};
  cfg.dykstra_iters = 3;
  cfg.regularizer = IdentityRegularizer{};
  const ClassicalSolver solver(emb, cfg);
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(derive_seed(3, static_cast<std::uint64_t>(trial)));
    const ScattererSet sc{{-30.0 + 7.0 * trial, 1.0, 0.2}, {40.0 - 3.0 * trial, 0.6, -1.0}};
    const CVector y = pairwise_products(simulate_observation(geom, sc, 5.0, rng), emb);
    const CVector a = net.forward(y).lags;
    const CVector b = solver.solve(y).lags;
    EXPECT_LT((a - b).norm(), 1e-9 * std::max(1.0, b.norm()));
  }
}

TEST(Unfolded, LearnedBlockZeroForZeroWeights) {
  const LagEmbedding emb(xband20(), {32, 10.0});
  const UnfoldedNetwork net(emb, make_zero_weights(32, 10.0, 2, 4, 5, 0.0, -40.0));
  Rng rng(1);
  std::normal_distribution<double> n01;
  CVector u(32);
  for (auto& x : u) x = {n01(rng), n01(rng)};
  EXPECT_EQ(net.learned_block(0, u).norm(), 0.0);
}

TEST(Unfolded, OutputFeasibleAndZeroLagReal) {
  const auto geom = xband20();
  const LagEmbedding emb(geom, {32, 10.0});
  const UnfoldedNetwork net(emb, make_random_weights(32, 10.0, 4, 8, 5, 0.2, 5));
  Rng rng(2);
  const ScattererSet sc{{12.0, 1.0, 0.0}};
  const CVector y = pairwise_products(simulate_observation(geom, sc, 0.0, rng), emb);
  int layers = 0;
  const auto out = net.forward(y, [&](int, const ToeplitzCovariance& t) {
    ++layers;
    EXPECT_EQ(t.lags(0).imag(), 0.0);
    EXPECT_GE(min_eigenvalue(t.matrix()), -1e-9 * t.matrix().norm());
  });
  EXPECT_EQ(layers, 4);
  EXPECT_TRUE(out.lags.allFinite());
}

TEST(Unfolded, BitStableAcrossRunsAndWorkers) {
  const auto geom = xband20();
  InversionConfig cfg;
  const auto weights = make_random_weights(32, 10.0, 12, 16, 5, 0.05, 7);
  const Inverter inv(Method::kUnfolded, geom, cfg, &weights);
  std::vector<CVector> pixels;
  for (int p = 0; p < 24; ++p) {
    Rng rng(derive_seed(1, static_cast<std::uint64_t>(p)));
    const ScattererSet sc{{-25.0 + 2.0 * p, 1.0, 0.1 * p}};
    pixels.push_back(simulate_observation(geom, sc, 10.0, rng));
  }
  const auto serial = invert_batch_serial(inv, pixels, 0, {});
  const auto again = invert_batch_serial(inv, pixels, 0, {});
  const auto parallel = invert_batch(inv, pixels, 0, {}, 4);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    EXPECT_EQ(serial[i].elevations, again[i].elevations);
    EXPECT_EQ(serial[i].elevations, parallel[i].elevations);
    EXPECT_EQ(serial[i].eigenvalues, parallel[i].eigenvalues);
  }
}

TEST(Unfolded, SameWeightsRunOnAnotherGeometry) {
  const auto weights = make_random_weights(32, 10.0, 3, 4, 5, 0.1, 1);
  Rng rng(4);
  const auto jittered = perturb_baselines(xband20(), 10.0, rng);
  const LagEmbedding a(xband20(), {32, 10.0});
  const LagEmbedding b(jittered, {32, 10.0});
  const UnfoldedNetwork na(a, weights);
  const UnfoldedNetwork nb(b, weights);
  EXPECT_EQ(dump(na.weights()), dump(nb.weights()));
  const CVector y = pairwise_products(CVector::Ones(20), b);
  EXPECT_TRUE(nb.forward(y).lags.allFinite());
}
