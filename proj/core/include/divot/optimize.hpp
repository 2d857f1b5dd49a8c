#pragma once

#include <cstddef>
#include <vector>

#include "divot/divergence.hpp"

namespace divot {

enum class LrSchedule { constant, cyclic };
enum class ThetaMethod { closed_form, bisection };

struct FitConfig {
  double theta_lo = 1e-8;
  double theta_hi = 100.0;
  double step_size = 1.0;
  std::size_t theta_update_period = 10;
  std::size_t max_iters = 300;
  double tolerance = 1e-8;
  LrSchedule lr_schedule = LrSchedule::constant;
  // Triangular cycle between 0.1 * step_size and step_size.
  std::size_t cycle_period = 50;
  ThetaMethod theta_method = ThetaMethod::closed_form;
  bool fit_debias = false;
  bool fit_pnl = false;

  void validate() const;
};

double learning_rate(const FitConfig& config, std::size_t iteration);

// Minimizer of the raw measure over theta in [theta_lo, theta_hi] with the draws,
// debiasing and PNL parameters held fixed. The objective is a convex quadratic in
// theta; closed_form solves it directly, bisection finds the root of the gradient.
double fit_theta(const BatchedSample& sample, const SourceDraws& draws,
                 const MeasureParams& fixed, const FitConfig& config);
double fit_theta(const BatchedSample& sample, const SourceDraws& draws,
                 const MeasureParams& fixed, const FitConfig& config, ThetaMethod method);

struct FitResult {
  MeasureParams params;
  MeasureValue value;
  std::size_t iterations = 0;
  bool converged = false;
  // Best raw objective seen so far, sampled whenever theta is refreshed.
  std::vector<double> refresh_trace;
};

// Gradient descent on (w, omega) with theta refreshed by fit_theta every
// theta_update_period steps. Returns the best parameters observed.
FitResult fit_joint(const BatchedSample& sample, const SourceDraws& draws,
                    const MeasureParams& init, const FitConfig& config);

}  // namespace divot
