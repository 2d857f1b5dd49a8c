#include "divot/noise.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "divot/error.hpp"

namespace divot {

namespace {

// 53 random mantissa bits -> [0, 1).
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(NoiseSource source) {
  switch (source) {
    case NoiseSource::standard_normal: return "normal";
    case NoiseSource::uniform: return "uniform";
    case NoiseSource::beta_half: return "beta";
    case NoiseSource::laplace: return "laplace";
  }
  return "unknown";
}

NoiseSource parse_noise_source(std::string_view name) {
  if (name == "normal" || name == "gaussian" || name == "standard-normal") {
    return NoiseSource::standard_normal;
  }
  if (name == "uniform") return NoiseSource::uniform;
  if (name == "beta" || name == "beta-0.5") return NoiseSource::beta_half;
  if (name == "laplace") return NoiseSource::laplace;
  throw Error(ErrorKind::invalid_argument, "unknown noise source '" + std::string(name) + "'");
}

std::vector<double> sample_source(NoiseSource source, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  switch (source) {
    case NoiseSource::standard_normal: {
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& v : out) v = normal(rng);
      break;
    }
    case NoiseSource::uniform:
      for (auto& v : out) v = unit_uniform(rng);
      break;
    case NoiseSource::beta_half:
      // Beta(1/2, 1/2) is the arcsine law: sin^2(pi U / 2).
      for (auto& v : out) {
        const double s = std::sin(0.5 * std::numbers::pi * unit_uniform(rng));
        v = s * s;
      }
      break;
    case NoiseSource::laplace:
      for (auto& v : out) {
        // Open interval (-1/2, 1/2) keeps the inverse CDF finite.
        const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
        v = u < 0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u);
      }
      break;
  }
  return out;
}

double unit_variance(NoiseSource source) {
  switch (source) {
    case NoiseSource::standard_normal: return 1.0;
    case NoiseSource::uniform: return 1.0 / 12.0;
    case NoiseSource::beta_half: return 1.0 / 8.0;
    case NoiseSource::laplace: return 2.0;
  }
  return 1.0;
}

double model_variance(const NoiseModel& model) {
  if (!(model.theta > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "noise scale theta must be positive");
  }
  return model.theta * model.theta * unit_variance(model.source);
}

}  // namespace divot
