#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace divot {

// Source distributions for the reparameterized noise e = theta * e_source.
enum class NoiseSource {
  standard_normal,
  uniform,    // U(0, 1)
  beta_half,  // Beta(0.5, 0.5), the arcsine law
  laplace,    // Laplace(0, 1)
};

std::string_view to_string(NoiseSource source);
// Accepts "normal"/"gaussian"/"standard-normal", "uniform", "beta", "laplace".
NoiseSource parse_noise_source(std::string_view name);

struct NoiseModel {
  NoiseSource source = NoiseSource::standard_normal;
  double theta = 1.0;
};

// n unscaled i.i.d. draws; identical seeds give identical vectors.
std::vector<double> sample_source(NoiseSource source, std::size_t n, std::uint64_t seed);
inline std::vector<double> sample_source(const NoiseModel& model, std::size_t n,
                                         std::uint64_t seed) {
  return sample_source(model.source, n, seed);
}

// Var(e_source).
double unit_variance(NoiseSource source);
// Var(theta * e_source) = theta^2 * unit_variance(source).
double model_variance(const NoiseModel& model);

}  // namespace divot
