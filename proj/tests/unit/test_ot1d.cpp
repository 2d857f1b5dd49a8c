#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "divot/error.hpp"
#include "divot/ot1d.hpp"
#include "unit/oracles.hpp"

using namespace divot;

TEST(W2, IdenticalUpToPermutationIsZero) {
  const std::vector<double> a{3, -1, 2, 7};
  const std::vector<double> b{7, 2, 3, -1};
  EXPECT_EQ(w2_squared_1d(a, b), 0.0);
}

TEST(W2, HandExample) {
  const std::vector<double> a{0, 1};
  const std::vector<double> b{1, 2};
  EXPECT_DOUBLE_EQ(w2_squared_1d(a, b), 1.0);
  EXPECT_DOUBLE_EQ(oracle::brute_force_w2(a, b), 1.0);
}

TEST(W2, MatchesExhaustiveAssignment) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 3.0);
  std::uniform_int_distribution<int> size(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = size(rng);
    std::vector<double> a(m), b(m);
    for (auto& v : a) v = g(rng);
    for (auto& v : b) v = g(rng);
    EXPECT_NEAR(w2_squared_1d(a, b), oracle::brute_force_w2(a, b), 1e-10);
  }
}

TEST(W2, SymmetryTranslationScaling) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double base = w2_squared_1d(a, b);
    EXPECT_DOUBLE_EQ(w2_squared_1d(b, a), base);

    auto shuffled = a;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_DOUBLE_EQ(w2_squared_1d(shuffled, b), base);

    const double c = u(rng);
    auto ac = a, bc = b;
    for (auto& v : ac) v += c;
    for (auto& v : bc) v += c;
    EXPECT_NEAR(w2_squared_1d(ac, bc), base, 1e-10);

    const double k = 0.5 + std::abs(u(rng));
    auto ak = a, bk = b;
    for (auto& v : ak) v *= k;
    for (auto& v : bk) v *= k;
    EXPECT_NEAR(w2_squared_1d(ak, bk), k * k * base, 1e-9 * std::max(1.0, k * k * base));
  }
}

TEST(W2, ShapeErrors) {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{1};
  const std::vector<double> empty;
  try {
    w2_squared_1d(a, b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::shape);
  }
  EXPECT_THROW(w2_squared_1d(empty, empty), Error);
}

TEST(Coupling, SortedPairsAndVelocities) {
  const std::vector<double> src{2, 0, 1};
  const std::vector<double> tgt{5, 3, 10};
  const auto c = couple_1d(src, tgt);
  ASSERT_EQ(c.pairs.size(), 3u);
  EXPECT_EQ(c.pairs[0], (std::pair<double, double>{0, 3}));
  EXPECT_EQ(c.pairs[1], (std::pair<double, double>{1, 5}));
  EXPECT_EQ(c.pairs[2], (std::pair<double, double>{2, 10}));
  EXPECT_EQ(c.velocities(), (std::vector<double>{3, 4, 8}));
}

TEST(Coupling, BothCoordinatesAscend) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<double> a(64), b(64);
  for (auto& v : a) v = g(rng);
  for (auto& v : b) v = g(rng);
  const auto c = couple_1d(a, b);
  for (std::size_t i = 1; i < c.pairs.size(); ++i) {
    EXPECT_LE(c.pairs[i - 1].first, c.pairs[i].first);
    EXPECT_LE(c.pairs[i - 1].second, c.pairs[i].second);
  }
}

TEST(ConditionalW2, IdentityCouplingIsZero) {
  const std::vector<std::size_t> sizes{4, 6, 5};
  const auto draws = draw_sources(NoiseSource::uniform, sizes, 9);
  const double theta = 1.7;
  std::vector<std::vector<double>> batches;
  for (const auto& s : draws.sorted) {
    std::vector<double> y(s.rbegin(), s.rend());
    for (auto& v : y) v *= theta;
    batches.push_back(y);
  }
  EXPECT_EQ(conditional_w2(batches, draws, theta), 0.0);
}

TEST(ConditionalW2, HandExample) {
  SourceDraws draws{NoiseSource::uniform, {{0.0, 1.0}}};
  const std::vector<std::vector<double>> batches{{2.0, 0.0}};
  EXPECT_DOUBLE_EQ(conditional_w2(batches, draws, 1.0), 0.5);
}

TEST(ConditionalW2, UnweightedMeanOfBatches) {
  SourceDraws draws{NoiseSource::uniform, {{0.0, 1.0, 2.0}, {0.5, 0.6, 0.7}}};
  const std::vector<std::vector<double>> batches{{1.0, 3.0, 2.0}, {0.0, 0.0, 4.0}};
  const double w0 = oracle::brute_force_w2(batches[0], draws.sorted[0]);
  const double w1 = oracle::brute_force_w2(batches[1], draws.sorted[1]);
  EXPECT_NEAR(conditional_w2(batches, draws, 1.0), 0.5 * (w0 + w1), 1e-12);
}

TEST(ConditionalW2, SeededOverloadIsDeterministic) {
  const std::vector<std::vector<double>> batches{{0.1, 0.9, 0.4}, {2.0, 1.0}};
  const NoiseModel model{NoiseSource::standard_normal, 0.8};
  EXPECT_EQ(conditional_w2(batches, model, 5), conditional_w2(batches, model, 5));
}

TEST(Draws, SortedAndSized) {
  const std::vector<std::size_t> sizes{3, 10, 2};
  const auto d = draw_sources(NoiseSource::laplace, sizes, 1);
  ASSERT_EQ(d.sorted.size(), 3u);
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    EXPECT_EQ(d.sorted[b].size(), sizes[b]);
    EXPECT_TRUE(std::is_sorted(d.sorted[b].begin(), d.sorted[b].end()));
  }
}
