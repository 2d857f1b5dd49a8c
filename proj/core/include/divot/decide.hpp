#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "divot/divergence.hpp"
#include "divot/optimize.hpp"
#include "divot/pairdata.hpp"

namespace divot {

enum class Direction { x_to_y, y_to_x };
enum class Decision { x_to_y, y_to_x, independent };
enum class Mode { anm, pnl };

std::string_view to_string(Direction d);
std::string_view to_string(Decision d);  // "x->y", "y->x", "independent"
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view name);

struct PipelineConfig {
  Mode mode = Mode::anm;
  NoiseSource noise = NoiseSource::standard_normal;
  std::optional<double> batch_frac;  // unset: default_batch_frac(n)
  std::size_t max_positions = 50;
  bool debias = false;
  DebiasAnchor debias_anchor = DebiasAnchor::row;
  FitConfig fit;
  // Starting point; theta is refitted before the first step anyway.
  MeasureParams init{1.0, DebiasFn{0.0}, PnlTransform{0.1, 0.1, 0.0}, DebiasAnchor::row};
  // Extra PNL/debias fits from random starting points; the best one is kept.
  std::size_t restarts = 0;
  double tie_tolerance = 1e-12;

  // PNL mode gets the cyclic learning rate.
  static PipelineConfig defaults(Mode mode);
  double resolved_batch_frac(std::size_t n) const;
};

struct DirectionScore {
  Direction direction = Direction::x_to_y;
  Mode mode = Mode::anm;
  double loss = 0.0;  // measure.raw / model_variance(theta*)
  MeasureValue measure;
  MeasureParams fitted;
  std::size_t batches = 0;
  std::size_t iterations = 0;
};

struct BootstrapResult {
  std::size_t replicates = 0;
  std::vector<std::pair<double, double>> losses;  // (x->y, y->x) per replicate
  double t_statistic = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

struct Verdict {
  Decision decision = Decision::independent;
  DirectionScore forward;   // x -> y
  DirectionScore backward;  // y -> x
  std::optional<double> p_value;
  double alpha = 0.05;
  std::optional<BootstrapResult> bootstrap;
};

struct BootstrapOptions {
  std::size_t replicates = 50;
  double alpha = 0.05;
  std::size_t workers = 0;  // 0: hardware concurrency
};

DirectionScore score_direction(const SamplePair& pairs, Direction direction,
                               const PipelineConfig& config, std::uint64_t seed);

// Decision by strictly smaller loss; |difference| within tie_tolerance is "independent".
Verdict infer_direction(const SamplePair& pairs, const PipelineConfig& config, std::uint64_t seed);
// Same scores, decision gated by the bootstrap test: p >= alpha means independent.
Verdict infer_direction(const SamplePair& pairs, const PipelineConfig& config, std::uint64_t seed,
              const BootstrapOptions& bootstrap);

// Replicate b resamples rows with replacement using derive_seed(seed, b) and
// scores both directions; a two-sided Welch t-test compares the two loss samples.
BootstrapResult bootstrap_test(const SamplePair& pairs, const PipelineConfig& config,
                               const BootstrapOptions& options, std::uint64_t seed);

// Decision from a bootstrap p-value: p < alpha picks the smaller loss.
Decision gated_decision(double loss_xy, double loss_yx, std::optional<double> p_value,
                        double alpha, double tie_tolerance = 1e-12);

}  // namespace divot
