#include "divot/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "divot/error.hpp"

namespace divot {

void FitConfig::validate() const {
  if (!(theta_lo > 0.0) || !(theta_hi > theta_lo)) {
    throw Error(ErrorKind::invalid_argument, "theta range must satisfy 0 < lo < hi");
  }
  if (!(step_size > 0.0)) throw Error(ErrorKind::invalid_argument, "step size must be positive");
  if (max_iters < 1) throw Error(ErrorKind::invalid_argument, "max_iters must be at least 1");
  if (theta_update_period < 1) {
    throw Error(ErrorKind::invalid_argument, "theta_update_period must be at least 1");
  }
  if (!(tolerance > 0.0)) throw Error(ErrorKind::invalid_argument, "tolerance must be positive");
  if (lr_schedule == LrSchedule::cyclic && cycle_period < 2) {
    throw Error(ErrorKind::invalid_argument, "cycle_period must be at least 2");
  }
}

double learning_rate(const FitConfig& config, std::size_t iteration) {
  if (config.lr_schedule == LrSchedule::constant) return config.step_size;
  const double period = static_cast<double>(config.cycle_period);
  const double phase = std::fmod(static_cast<double>(iteration), period) / period;  // [0, 1)
  const double tri = 1.0 - std::abs(2.0 * phase - 1.0);                            // 0 -> 1 -> 0
  const double lo = 0.1 * config.step_size;
  return lo + (config.step_size - lo) * tri;
}

namespace {

double closed_form_theta(const BatchedSample& sample, const SourceDraws& draws,
                         const MeasureParams& fixed, const FitConfig& config) {
  const auto q = theta_quadratic(sample, draws, fixed);
  if (!(q.ss > 0.0) || !std::isfinite(q.ys)) {
    throw Error(ErrorKind::numeric, "theta objective is degenerate (source draws have no spread)");
  }
  return std::clamp(q.ys / q.ss, config.theta_lo, config.theta_hi);
}

double bisection_theta(const BatchedSample& sample, const SourceDraws& draws,
                       const MeasureParams& fixed, const FitConfig& config) {
  auto slope = [&](double theta) {
    MeasureParams p = fixed;
    p.theta = theta;
    MeasureGradient g;
    raw_measure(sample, draws, p, &g);
    if (!std::isfinite(g.theta)) throw Error(ErrorKind::numeric, "theta gradient is not finite");
    return g.theta;
  };
  double lo = config.theta_lo;
  double hi = config.theta_hi;
  if (slope(lo) >= 0.0) return lo;
  if (slope(hi) <= 0.0) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (slope(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double fit_theta(const BatchedSample& sample, const SourceDraws& draws,
                 const MeasureParams& fixed, const FitConfig& config) {
  return fit_theta(sample, draws, fixed, config, config.theta_method);
}

double fit_theta(const BatchedSample& sample, const SourceDraws& draws,
                 const MeasureParams& fixed, const FitConfig& config, ThetaMethod method) {
  config.validate();
  return method == ThetaMethod::closed_form ? closed_form_theta(sample, draws, fixed, config)
                                            : bisection_theta(sample, draws, fixed, config);
}

FitResult fit_joint(const BatchedSample& sample, const SourceDraws& draws,
                    const MeasureParams& init, const FitConfig& config) {
  config.validate();
  FitResult result;
  MeasureParams params = init;
  if (config.fit_pnl && !params.pnl) params.pnl = PnlTransform{};

  if (!config.fit_debias && !config.fit_pnl) {
    params.theta = fit_theta(sample, draws, params, config);
    result.params = params;
    result.value = variance_divergence(sample, draws, params);
    result.refresh_trace.push_back(result.value.raw);
    result.converged = true;
    return result;
  }

  MeasureParams best = params;
  double best_f = std::numeric_limits<double>::infinity();
  double prev_f = std::numeric_limits<double>::quiet_NaN();
  std::size_t it = 0;
  for (; it < config.max_iters; ++it) {
    if (it % config.theta_update_period == 0) {
      params.theta = fit_theta(sample, draws, params, config);
    }
    MeasureGradient g;
    double f = 0.0;
    try {
      f = raw_measure(sample, draws, params, &g);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numeric) throw;
      f = std::numeric_limits<double>::quiet_NaN();
    }
    const bool finite_grad = std::isfinite(g.w) && std::isfinite(g.omega_a) &&
                             std::isfinite(g.omega_b) && std::isfinite(g.omega_c);
    if (!std::isfinite(f) || !finite_grad) {
      throw Error(ErrorKind::numeric,
                  "objective diverged at iteration " + std::to_string(it));
    }
    if (f < best_f) {
      best_f = f;
      best = params;
    }
    if (it % config.theta_update_period == 0) result.refresh_trace.push_back(best_f);
    if (it > 0 && std::abs(prev_f - f) < config.tolerance) {
      result.converged = true;
      ++it;
      break;
    }
    prev_f = f;

    const double lr = learning_rate(config, it);
    if (config.fit_debias) params.debias.w -= lr * g.w;
    if (config.fit_pnl) {
      params.pnl->a -= lr * g.omega_a;
      params.pnl->b -= lr * g.omega_b;
      params.pnl->c -= lr * g.omega_c;
    }
  }
  result.iterations = it;
  result.params = best;
  result.value = variance_divergence(sample, draws, best);
  return result;
}

}  // namespace divot
