#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "divot/pairdata.hpp"

namespace divot {

enum class Mechanism { linear, cubic, sine, piecewise };
enum class SynthNoise { uniform, laplace };

std::string_view to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view name);
std::string_view to_string(SynthNoise n);
SynthNoise parse_synth_noise(std::string_view name);

// Unweighted mechanism g(x):
//   linear    x
//   cubic     0.1 (2.5 x)^3 - 0.1 x
//   sine      sin(4 x)
//   piecewise 0.5 x^3 - x for x <= 0, 1 - 0.5 x^3 + x otherwise
double mechanism_value(Mechanism m, double x);

// Hidden common cause U.
//   fcm 1: x = u, y = u
//   fcm 2: x = e_x + w_x u, y = e_y + w_y u
//   fcm 3: x = e_x + w_x u, y = weight * g(x) + e_y + w_y u
struct Confounder {
  double w_x = 1.0;
  double w_y = 1.0;
  int fcm = 2;
};

struct GeneratorSpec {
  Mechanism mechanism = Mechanism::linear;
  double weight = 1.0;
  SynthNoise noise = SynthNoise::uniform;
  // Added to every noise draw; -0.5 turns U(0,1) into U(-0.5, 0.5).
  double noise_shift = 0.0;
  std::optional<Confounder> confounder;
  std::size_t n = 500;
  std::uint64_t seed = 0;
};

// Without a confounder: x ~ U(-1, 1), y = weight * g(x) + e.
SamplePair generate(const GeneratorSpec& spec);

}  // namespace divot
