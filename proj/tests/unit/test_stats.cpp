#include <gtest/gtest.h>

#include <random>

#include "divot/stats.hpp"
#include "unit/oracles.hpp"

using namespace divot;

// Reference statistics and two-sided p-values computed offline with an
// independent statistics package (Welch's unequal-variance test).
TEST(Welch, ReferenceValues) {
  struct Case {
    std::vector<double> a, b;
    double t, p;
  };
  const Case cases[] = {
      {{1, 2, 3, 4, 5}, {2, 4, 6, 8, 10}, -1.8973665961010275, 0.10753119493062718},
      {{0.1, 0.4, 0.35, 0.8}, {1.2, 0.9, 1.5, 1.1, 1.3, 0.95}, -4.350353537445879,
       0.006250213851357054},
      {{3.0, 3.1, 2.9, 3.05, 2.95, 3.02, 3.01}, {3.2, 2.4, 3.9, 3.0, 2.8}, -0.22338660390262752,
       0.8339785886886606},
  };
  for (const auto& c : cases) {
    const auto r = welch_t_test(c.a, c.b);
    EXPECT_NEAR(r.t, c.t, 1e-10);
    EXPECT_NEAR(r.p_value, c.p, 1e-9);
    EXPECT_FALSE(r.degenerate);
  }
}

TEST(Welch, DegreesOfFreedomFormula) {
  const std::vector<double> a{1, 2, 3, 4, 5, 9};
  const std::vector<double> b{2, 2.5, 2.7};
  const double va = oracle::naive_variance(a) / 6, vb = oracle::naive_variance(b) / 3;
  const double df = (va + vb) * (va + vb) / (va * va / 5 + vb * vb / 2);
  EXPECT_NEAR(welch_t_test(a, b).df, df, 1e-12);
}

TEST(Welch, IdenticalSamplesGivePOne) {
  const std::vector<double> a{0.3, 0.1, 0.7, 0.2};
  EXPECT_NEAR(welch_t_test(a, a).p_value, 1.0, 1e-15);
  const std::vector<double> c{2.0, 2.0, 2.0};
  const auto r = welch_t_test(c, c);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_TRUE(r.degenerate);
}

TEST(Welch, PValueBounds) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(10), b(12);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng) + 0.05 * t;
    const auto r = welch_t_test(a, b);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
  }
}

TEST(Welch, AntisymmetricStatistic) {
  const std::vector<double> a{1, 3, 2, 5};
  const std::vector<double> b{4, 6, 5, 8, 7};
  const auto ab = welch_t_test(a, b);
  const auto ba = welch_t_test(b, a);
  EXPECT_DOUBLE_EQ(ab.t, -ba.t);
  EXPECT_DOUBLE_EQ(ab.p_value, ba.p_value);
}

TEST(Welch, TooFewObservationsRejected) {
  const std::vector<double> one{1.0};
  const std::vector<double> two{1.0, 2.0};
  EXPECT_ANY_THROW(welch_t_test(one, two));
}

TEST(Moments, MeanAndVariance) {
  const std::vector<double> v{2, 4, 4, 4, 5, 5, 7, 9};
  EXPECT_DOUBLE_EQ(mean(v), 5.0);
  EXPECT_DOUBLE_EQ(sample_variance(v), 32.0 / 7.0);
}
