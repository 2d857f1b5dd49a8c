#include <gtest/gtest.h>

#include <cmath>

#include "divot/error.hpp"
#include "divot/synth.hpp"
#include "unit/oracles.hpp"

using namespace divot;

namespace {
std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }
}  // namespace

TEST(Mechanism, HandValues) {
  EXPECT_DOUBLE_EQ(mechanism_value(Mechanism::piecewise, -1.0), 0.5);
  EXPECT_DOUBLE_EQ(mechanism_value(Mechanism::piecewise, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(mechanism_value(Mechanism::piecewise, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(mechanism_value(Mechanism::linear, 0.3), 0.3);
  EXPECT_DOUBLE_EQ(mechanism_value(Mechanism::cubic, 0.4), 0.1 * 1.0 - 0.04);
  EXPECT_DOUBLE_EQ(mechanism_value(Mechanism::sine, 0.25), std::sin(1.0));
}

TEST(Generate, SupportAndDeterminism) {
  for (auto m : {Mechanism::linear, Mechanism::cubic, Mechanism::sine, Mechanism::piecewise}) {
    GeneratorSpec g;
    g.mechanism = m;
    g.n = 2000;
    g.seed = 8;
    const auto a = generate(g);
    const auto b = generate(g);
    EXPECT_EQ(vec(a.xs()), vec(b.xs()));
    EXPECT_EQ(vec(a.ys()), vec(b.ys()));
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_GT(a.xs()[i], -1.0);
      EXPECT_LT(a.xs()[i], 1.0);
      const double e = a.ys()[i] - mechanism_value(m, a.xs()[i]);
      EXPECT_GE(e, -1e-12);
      EXPECT_LT(e, 1.0 + 1e-12);
    }
  }
}

TEST(Generate, ZeroWeightIsPureNoise) {
  GeneratorSpec g;
  g.weight = 0.0;
  g.n = 50000;
  g.seed = 2;
  const auto p = generate(g);
  const auto [slope, resid] = oracle::ols(vec(p.xs()), vec(p.ys()));
  EXPECT_NEAR(slope, 0.0, 0.01);
  EXPECT_NEAR(resid, 1.0 / 12.0, 0.002);
}

TEST(Generate, LinearRegressionOracle) {
  for (double w : {0.5, 1.0, 2.0}) {
    GeneratorSpec g;
    g.weight = w;
    g.n = 100000;
    g.seed = 13;
    const auto p = generate(g);
    const auto [slope, resid] = oracle::ols(vec(p.xs()), vec(p.ys()));
    EXPECT_NEAR(slope, w, 0.01);
    EXPECT_NEAR(resid, 1.0 / 12.0, 0.01);
  }
}

TEST(Generate, NoiseShift) {
  GeneratorSpec g;
  g.weight = 0.0;
  g.noise_shift = -0.5;
  g.n = 1000;
  for (double y : generate(g).ys()) {
    EXPECT_GE(y, -0.5);
    EXPECT_LT(y, 0.5);
  }
}

TEST(Generate, LaplaceNoiseVariance) {
  GeneratorSpec g;
  g.weight = 0.0;
  g.noise = SynthNoise::laplace;
  g.n = 200000;
  g.seed = 3;
  EXPECT_NEAR(oracle::naive_variance(vec(generate(g).ys())), 2.0, 0.05);
}

TEST(Generate, Fcm1IsIdentity) {
  GeneratorSpec g;
  g.confounder = Confounder{1.0, 1.0, 1};
  g.n = 100;
  const auto p = generate(g);
  EXPECT_EQ(vec(p.xs()), vec(p.ys()));
}

TEST(Generate, Fcm2Structure) {
  GeneratorSpec g;
  g.confounder = Confounder{0.0, 0.0, 2};
  g.n = 50000;
  g.seed = 6;
  const auto p = generate(g);
  // With zero confounding both columns are independent U(0,1).
  const auto [slope, resid] = oracle::ols(vec(p.xs()), vec(p.ys()));
  EXPECT_NEAR(slope, 0.0, 0.02);
  EXPECT_NEAR(resid, 1.0 / 12.0, 0.002);

  g.confounder = Confounder{10.0, 10.0, 2};
  const auto q = generate(g);
  const auto [s2, r2] = oracle::ols(vec(q.xs()), vec(q.ys()));
  // Var(x) = 1/12 + 100/12, Cov = 100/12.
  EXPECT_NEAR(s2, 100.0 / 101.0, 0.02);
  (void)r2;
}

TEST(Generate, Fcm3AddsMechanism) {
  GeneratorSpec g;
  g.mechanism = Mechanism::linear;
  g.confounder = Confounder{0.0, 0.0, 3};
  g.n = 50000;
  g.seed = 7;
  const auto p = generate(g);
  const auto [slope, resid] = oracle::ols(vec(p.xs()), vec(p.ys()));
  EXPECT_NEAR(slope, 1.0, 0.02);
  EXPECT_NEAR(resid, 1.0 / 12.0, 0.002);
}

TEST(SynthNames, RoundTrip) {
  for (auto m : {Mechanism::linear, Mechanism::cubic, Mechanism::sine, Mechanism::piecewise}) {
    EXPECT_EQ(parse_mechanism(to_string(m)), m);
  }
  EXPECT_EQ(parse_synth_noise("laplace"), SynthNoise::laplace);
  EXPECT_THROW(parse_mechanism("quartic"), Error);
}
