#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "divot/noise.hpp"
#include "divot/ot1d.hpp"
#include "divot/pairdata.hpp"

namespace divot {

// g_d(x; w) = w * x, subtracted from effect values to offset the bias of wide batches.
struct DebiasFn {
  double w = 0.0;
  double operator()(double x) const noexcept { return w * x; }
};

// Which cause value feeds the debiasing function.
enum class DebiasAnchor {
  row,       // each row's own cause value
  position,  // the batch anchor (a per-batch constant; cancels under centering)
};

// y + a * tanh(b * y + c).
struct PnlTransform {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double operator()(double y) const noexcept;
  // Strictly increasing everywhere iff a * b > -1.
  bool invertible() const noexcept { return a * b > -1.0; }
};

std::vector<double> pnl_transform(std::span<const double> ys, const PnlTransform& omega);

// Cause and effect values of each batch, in batch order.
struct BatchedSample {
  std::vector<double> positions;
  std::vector<std::vector<double>> causes;
  std::vector<std::vector<double>> effects;

  std::size_t size() const noexcept { return effects.size(); }
  std::vector<std::size_t> sizes() const;
};

BatchedSample gather(const BatchSet& batches, std::span<const double> cause,
                     std::span<const double> effect);

struct MeasureParams {
  double theta = 1.0;
  DebiasFn debias;
  std::optional<PnlTransform> pnl;
  DebiasAnchor anchor = DebiasAnchor::row;
};

struct MeasureValue {
  double raw = 0.0;         // variance-based divergence estimate
  double normalized = 0.0;  // raw / Var(theta * e_source)
};

// Partial derivatives of the raw measure with the sort permutations held fixed.
struct MeasureGradient {
  double theta = 0.0;
  double w = 0.0;
  double omega_a = 0.0;
  double omega_b = 0.0;
  double omega_c = 0.0;
};

// (1/N) sum_batches || sort(z) - theta*sort(s) - mean(z - theta*s) ||^2 / (N_x - 1)
// with z = pnl(y) - g_d(x). `grad`, when given, receives the gradient.
double raw_measure(const BatchedSample& sample, const SourceDraws& draws,
                   const MeasureParams& params, MeasureGradient* grad = nullptr);

MeasureValue variance_divergence(const BatchedSample& sample, const SourceDraws& draws,
                                 const MeasureParams& params);
// Draws a fresh SourceDraws from `seed` sized to the batches.
MeasureValue variance_divergence(const BatchedSample& sample, NoiseSource source,
                                 const MeasureParams& params, std::uint64_t seed);

// For fixed (w, omega) the raw measure is the quadratic
// (yy - 2 theta ys + theta^2 ss) / N in theta; the terms are sums over batches of
// centered sorted inner products, each scaled by 1 / (N_x - 1).
struct ThetaQuadratic {
  double yy = 0.0;
  double ys = 0.0;
  double ss = 0.0;
  double batches = 0.0;

  double value(double theta) const noexcept {
    return (yy - 2.0 * theta * ys + theta * theta * ss) / batches;
  }
  double derivative(double theta) const noexcept {
    return 2.0 * (theta * ss - ys) / batches;
  }
};

ThetaQuadratic theta_quadratic(const BatchedSample& sample, const SourceDraws& draws,
                               const MeasureParams& params);

}  // namespace divot
