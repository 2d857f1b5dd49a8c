#include "divot/synth.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "divot/error.hpp"

namespace divot {

std::string_view to_string(Mechanism m) {
  switch (m) {
    case Mechanism::linear: return "linear";
    case Mechanism::cubic: return "cubic";
    case Mechanism::sine: return "sine";
    case Mechanism::piecewise: return "piecewise";
  }
  return "linear";
}

Mechanism parse_mechanism(std::string_view name) {
  if (name == "linear") return Mechanism::linear;
  if (name == "cubic") return Mechanism::cubic;
  if (name == "sine" || name == "sin") return Mechanism::sine;
  if (name == "piecewise") return Mechanism::piecewise;
  throw Error(ErrorKind::invalid_argument, "unknown mechanism '" + std::string(name) + "'");
}

std::string_view to_string(SynthNoise n) { return n == SynthNoise::uniform ? "uniform" : "laplace"; }

SynthNoise parse_synth_noise(std::string_view name) {
  if (name == "uniform") return SynthNoise::uniform;
  if (name == "laplace") return SynthNoise::laplace;
  throw Error(ErrorKind::invalid_argument, "unknown synthetic noise '" + std::string(name) + "'");
}

double mechanism_value(Mechanism m, double x) {
  switch (m) {
    case Mechanism::linear: return x;
    case Mechanism::cubic: {
      const double t = 2.5 * x;
      return 0.1 * t * t * t - 0.1 * x;
    }
    case Mechanism::sine: return std::sin(4.0 * x);
    case Mechanism::piecewise:
      return x <= 0.0 ? 0.5 * x * x * x - x : 1.0 - 0.5 * x * x * x + x;
  }
  return x;
}

namespace {

class Draws {
 public:
  Draws(std::uint64_t seed, SynthNoise noise, double shift) : rng_(seed), noise_(noise), shift_(shift) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  // Cause in the open interval (-1, 1).
  double cause() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-52 - 1.0;
  }

  double noise() {
    if (noise_ == SynthNoise::uniform) return unit() + shift_;
    const double u = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
    return (u < 0 ? std::log1p(2.0 * u) : -std::log1p(-2.0 * u)) + shift_;
  }

 private:
  std::mt19937_64 rng_;
  SynthNoise noise_;
  double shift_;
};

}  // namespace

SamplePair generate(const GeneratorSpec& spec) {
  if (spec.n < 1) throw Error(ErrorKind::invalid_argument, "generator needs n >= 1");
  if (spec.confounder && (spec.confounder->fcm < 1 || spec.confounder->fcm > 3)) {
    throw Error(ErrorKind::invalid_argument, "confounder fcm must be 1, 2 or 3");
  }
  Draws draw(spec.seed, spec.noise, spec.noise_shift);
  std::vector<double> xs(spec.n), ys(spec.n);
  std::string label;
  if (!spec.confounder) {
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double x = draw.cause();
      xs[i] = x;
      ys[i] = spec.weight * mechanism_value(spec.mechanism, x) + draw.noise();
    }
    label = "generate(" + std::string(to_string(spec.mechanism)) + ",w=" + std::to_string(spec.weight) +
            ",n=" + std::to_string(spec.n) + ",seed=" + std::to_string(spec.seed) + ")";
  } else {
    const auto& c = *spec.confounder;
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double u = draw.unit();
      switch (c.fcm) {
        case 1:
          xs[i] = u;
          ys[i] = u;
          break;
        case 2:
          xs[i] = draw.noise() + c.w_x * u;
          ys[i] = draw.noise() + c.w_y * u;
          break;
        default: {
          const double x = draw.noise() + c.w_x * u;
          xs[i] = x;
          ys[i] = spec.weight * mechanism_value(spec.mechanism, x) + draw.noise() + c.w_y * u;
          break;
        }
      }
    }
    label = "generate(fcm" + std::to_string(c.fcm) + ",w_x=" + std::to_string(c.w_x) +
            ",w_y=" + std::to_string(c.w_y) + ",n=" + std::to_string(spec.n) +
            ",seed=" + std::to_string(spec.seed) + ")";
  }
  return SamplePair(std::move(xs), std::move(ys), {label});
}

}  // namespace divot
