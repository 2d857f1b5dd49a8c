#include "divot/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "divot/error.hpp"

namespace divot {

double PnlTransform::operator()(double y) const noexcept {
  return y + a * std::tanh(b * y + c);
}

std::vector<double> pnl_transform(std::span<const double> ys, const PnlTransform& omega) {
  std::vector<double> out(ys.size());
  std::transform(ys.begin(), ys.end(), out.begin(), omega);
  return out;
}

std::vector<std::size_t> BatchedSample::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(effects.size());
  for (const auto& e : effects) out.push_back(e.size());
  return out;
}

BatchedSample gather(const BatchSet& batches, std::span<const double> cause,
                     std::span<const double> effect) {
  if (cause.size() != effect.size()) {
    throw Error(ErrorKind::shape, "gather: cause and effect columns differ in length");
  }
  BatchedSample out;
  out.positions.reserve(batches.size());
  out.causes.reserve(batches.size());
  out.effects.reserve(batches.size());
  for (const auto& batch : batches.batches) {
    std::vector<double> xs, ys;
    xs.reserve(batch.indices.size());
    ys.reserve(batch.indices.size());
    for (auto i : batch.indices) {
      xs.push_back(cause[i]);
      ys.push_back(effect[i]);
    }
    out.positions.push_back(batch.position);
    out.causes.push_back(std::move(xs));
    out.effects.push_back(std::move(ys));
  }
  return out;
}

namespace {

void check_shapes(const BatchedSample& sample, const SourceDraws& draws,
                  const MeasureParams& params) {
  if (sample.size() == 0) throw Error(ErrorKind::insufficient_data, "no batches");
  if (draws.sorted.size() != sample.size()) {
    throw Error(ErrorKind::shape, "source draws cover " + std::to_string(draws.sorted.size()) +
                                      " batches, sample has " + std::to_string(sample.size()));
  }
  const bool need_causes = params.debias.w != 0.0 && params.anchor == DebiasAnchor::row;
  for (std::size_t b = 0; b < sample.size(); ++b) {
    const auto nb = sample.effects[b].size();
    if (nb < 2) {
      throw Error(ErrorKind::insufficient_data,
                  "batch " + std::to_string(b) + " has " + std::to_string(nb) + " rows (need 2)");
    }
    if (draws.sorted[b].size() != nb) {
      throw Error(ErrorKind::shape, "batch " + std::to_string(b) + ": " + std::to_string(nb) +
                                        " values but " + std::to_string(draws.sorted[b].size()) +
                                        " source draws");
    }
    if (need_causes && sample.causes.size() != sample.size()) {
      throw Error(ErrorKind::shape, "row debiasing needs per-row cause values");
    }
    if (need_causes && sample.causes[b].size() != nb) {
      throw Error(ErrorKind::shape, "batch " + std::to_string(b) + ": cause/effect length mismatch");
    }
  }
  if (params.anchor == DebiasAnchor::position && sample.positions.size() != sample.size()) {
    throw Error(ErrorKind::shape, "position debiasing needs batch positions");
  }
}

// Transformed effect values z = pnl(y) - g_d(x) of batch b.
void transformed_batch(const BatchedSample& sample, std::size_t b, const MeasureParams& params,
                       std::vector<double>& z) {
  const auto& ys = sample.effects[b];
  z.resize(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double y = params.pnl ? (*params.pnl)(ys[i]) : ys[i];
    double shift = 0.0;
    if (params.debias.w != 0.0) {
      shift = params.anchor == DebiasAnchor::row ? params.debias(sample.causes[b][i])
                                                 : params.debias(sample.positions[b]);
    }
    z[i] = y - shift;
  }
}

}  // namespace

double raw_measure(const BatchedSample& sample, const SourceDraws& draws,
                   const MeasureParams& params, MeasureGradient* grad) {
  check_shapes(sample, draws, params);
  const double theta = params.theta;
  const double inv_batches = 1.0 / static_cast<double>(sample.size());
  if (grad) *grad = {};

  std::vector<double> z, d;
  std::vector<std::size_t> perm;
  double total = 0.0;
  for (std::size_t b = 0; b < sample.size(); ++b) {
    transformed_batch(sample, b, params, z);
    const auto& s = draws.sorted[b];
    const std::size_t nb = z.size();
    perm.resize(nb);
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](std::size_t i, std::size_t j) { return z[i] < z[j]; });

    d.resize(nb);
    double mean = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
      d[j] = z[perm[j]] - theta * s[j];
      mean += d[j];
    }
    mean /= static_cast<double>(nb);
    double ss = 0.0;
    for (auto& v : d) {
      v -= mean;  // d now holds the centered residual r
      ss += v * v;
    }
    const double scale = inv_batches / static_cast<double>(nb - 1);
    total += ss * scale;

    if (grad) {
      // d f / d z_(j) = 2 r_j * scale; r is centered so the mean term drops out.
      double g_theta = 0.0;
      for (std::size_t j = 0; j < nb; ++j) {
        const double dz = 2.0 * d[j] * scale;
        g_theta -= dz * s[j];
        const std::size_t row = perm[j];
        if (params.anchor == DebiasAnchor::row) {
          if (!sample.causes.empty() && sample.causes[b].size() == nb) grad->w -= dz * sample.causes[b][row];
        } else {
          grad->w -= dz * sample.positions[b];
        }
        if (params.pnl) {
          const auto& om = *params.pnl;
          const double y = sample.effects[b][row];
          const double t = std::tanh(om.b * y + om.c);
          const double sech2 = 1.0 - t * t;
          grad->omega_a += dz * t;
          grad->omega_b += dz * om.a * sech2 * y;
          grad->omega_c += dz * om.a * sech2;
        }
      }
      grad->theta += g_theta;
    }
  }
  if (!std::isfinite(total)) throw Error(ErrorKind::numeric, "divergence measure is not finite");
  return total;
}

MeasureValue variance_divergence(const BatchedSample& sample, const SourceDraws& draws,
                                 const MeasureParams& params) {
  const double raw = raw_measure(sample, draws, params);
  return {raw, raw / model_variance(NoiseModel{draws.source, params.theta})};
}

MeasureValue variance_divergence(const BatchedSample& sample, NoiseSource source,
                                 const MeasureParams& params, std::uint64_t seed) {
  const auto sizes = sample.sizes();
  return variance_divergence(sample, draw_sources(source, sizes, seed), params);
}

ThetaQuadratic theta_quadratic(const BatchedSample& sample, const SourceDraws& draws,
                               const MeasureParams& params) {
  check_shapes(sample, draws, params);
  ThetaQuadratic q;
  q.batches = static_cast<double>(sample.size());
  std::vector<double> z;
  for (std::size_t b = 0; b < sample.size(); ++b) {
    transformed_batch(sample, b, params, z);
    std::sort(z.begin(), z.end());
    const auto& s = draws.sorted[b];
    const double nb = static_cast<double>(z.size());
    const double zbar = std::accumulate(z.begin(), z.end(), 0.0) / nb;
    const double sbar = std::accumulate(s.begin(), s.end(), 0.0) / nb;
    double yy = 0.0, ys = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      const double zc = z[j] - zbar;
      const double sc = s[j] - sbar;
      yy += zc * zc;
      ys += zc * sc;
      ss += sc * sc;
    }
    const double w = 1.0 / (nb - 1.0);
    q.yy += yy * w;
    q.ys += ys * w;
    q.ss += ss * w;
  }
  return q;
}

}  // namespace divot
