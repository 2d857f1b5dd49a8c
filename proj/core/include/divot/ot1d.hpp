#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "divot/noise.hpp"

namespace divot {

// Matched (source, target) values of the monotone rearrangement between two
// equal-size samples. Both coordinates ascend.
struct Coupling {
  std::vector<std::pair<double, double>> pairs;

  // Displacement target - source per matched pair (the t = 0 velocity).
  std::vector<double> velocities() const;
};

Coupling couple_1d(std::span<const double> source, std::span<const double> target);

// (1/m) * sum_i (sort(a)_i - sort(b)_i)^2.
double w2_squared_1d(std::span<const double> a, std::span<const double> b);

// Sorted, unscaled source draws, one vector per batch, sized to match the batch.
struct SourceDraws {
  NoiseSource source = NoiseSource::standard_normal;
  std::vector<std::vector<double>> sorted;
};

// Batch b draws from the sub-stream derive_seed(seed, b).
SourceDraws draw_sources(NoiseSource source, std::span<const std::size_t> batch_sizes,
                         std::uint64_t seed);

// Monte Carlo estimate of E_x[W2^2(p(E_y; theta), p(Y | x))]: the mean over
// batches of w2_squared_1d(batch values, theta * draws).
double conditional_w2(std::span<const std::vector<double>> batch_values, const SourceDraws& draws,
                      double theta);
double conditional_w2(std::span<const std::vector<double>> batch_values, const NoiseModel& noise,
                      std::uint64_t seed);

}  // namespace divot
