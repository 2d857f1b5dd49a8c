#include "divot/decide.hpp"

#include <cmath>
#include <random>

#include "divot/error.hpp"
#include "divot/parallel.hpp"
#include "divot/seed.hpp"
#include "divot/stats.hpp"

namespace divot {

std::string_view to_string(Direction d) { return d == Direction::x_to_y ? "x->y" : "y->x"; }

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::x_to_y: return "x->y";
    case Decision::y_to_x: return "y->x";
    case Decision::independent: return "independent";
  }
  return "independent";
}

std::string_view to_string(Mode m) { return m == Mode::anm ? "anm" : "pnl"; }

Mode parse_mode(std::string_view name) {
  if (name == "anm" || name == "ANM") return Mode::anm;
  if (name == "pnl" || name == "PNL") return Mode::pnl;
  throw Error(ErrorKind::invalid_argument, "unknown mode '" + std::string(name) + "'");
}

PipelineConfig PipelineConfig::defaults(Mode mode) {
  PipelineConfig c;
  c.mode = mode;
  if (mode == Mode::pnl) c.fit.lr_schedule = LrSchedule::cyclic;
  return c;
}

double PipelineConfig::resolved_batch_frac(std::size_t n) const {
  return batch_frac.value_or(default_batch_frac(n));
}

namespace {

constexpr std::uint64_t kRestartStream = 0x5245535441525453ULL;
constexpr std::uint64_t kResampleStream = 0x424f4f5453545250ULL;

DirectionScore score_oriented(std::span<const double> cause, std::span<const double> effect,
                              Direction direction, const PipelineConfig& config,
                              std::uint64_t seed) {
  const auto positions = select_positions(cause, config.max_positions);
  const auto batches = make_batches(cause, positions, config.resolved_batch_frac(cause.size()));
  const auto sample = gather(batches, cause, effect);
  const auto draws = draw_sources(config.noise, sample.sizes(), seed);

  FitConfig fit = config.fit;
  fit.fit_debias = config.debias;
  fit.fit_pnl = config.mode == Mode::pnl;

  MeasureParams init = config.init;
  init.anchor = config.debias_anchor;
  if (!fit.fit_pnl) init.pnl.reset();
  if (!fit.fit_debias) init.debias = DebiasFn{};

  auto best = fit_joint(sample, draws, init, fit);
  const bool iterative = fit.fit_pnl || fit.fit_debias;
  if (iterative && config.restarts > 0) {
    std::mt19937_64 rng(derive_seed(seed, kRestartStream));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t r = 0; r < config.restarts; ++r) {
      MeasureParams start = init;
      if (fit.fit_debias) start.debias.w = u(rng);
      if (fit.fit_pnl) start.pnl = PnlTransform{u(rng), u(rng), u(rng)};
      auto candidate = fit_joint(sample, draws, start, fit);
      if (candidate.value.raw < best.value.raw) best = std::move(candidate);
    }
  }

  DirectionScore score;
  score.direction = direction;
  score.mode = config.mode;
  score.measure = best.value;
  score.loss = best.value.normalized;
  score.fitted = best.params;
  score.batches = sample.size();
  score.iterations = best.iterations;
  return score;
}

}  // namespace

DirectionScore score_direction(const SamplePair& pairs, Direction direction,
                               const PipelineConfig& config, std::uint64_t seed) {
  if (pairs.size() < 2) throw Error(ErrorKind::insufficient_data, "score_direction: need 2 rows");
  return direction == Direction::x_to_y
             ? score_oriented(pairs.xs(), pairs.ys(), direction, config, seed)
             : score_oriented(pairs.ys(), pairs.xs(), direction, config, seed);
}

Decision gated_decision(double loss_xy, double loss_yx, std::optional<double> p_value,
                        double alpha, double tie_tolerance) {
  if (p_value && *p_value >= alpha) return Decision::independent;
  if (std::abs(loss_xy - loss_yx) <= tie_tolerance) return Decision::independent;
  return loss_xy < loss_yx ? Decision::x_to_y : Decision::y_to_x;
}

Verdict infer_direction(const SamplePair& pairs, const PipelineConfig& config, std::uint64_t seed) {
  Verdict v;
  v.forward = score_direction(pairs, Direction::x_to_y, config, seed);
  v.backward = score_direction(pairs, Direction::y_to_x, config, seed);
  v.decision = gated_decision(v.forward.loss, v.backward.loss, std::nullopt, v.alpha,
                              config.tie_tolerance);
  return v;
}

Verdict infer_direction(const SamplePair& pairs, const PipelineConfig& config, std::uint64_t seed,
              const BootstrapOptions& bootstrap) {
  Verdict v = infer_direction(pairs, config, seed);
  v.alpha = bootstrap.alpha;
  v.bootstrap = bootstrap_test(pairs, config, bootstrap, seed);
  v.p_value = v.bootstrap->p_value;
  v.decision = gated_decision(v.forward.loss, v.backward.loss, v.p_value, v.alpha,
                              config.tie_tolerance);
  return v;
}

BootstrapResult bootstrap_test(const SamplePair& pairs, const PipelineConfig& config,
                               const BootstrapOptions& options, std::uint64_t seed) {
  if (options.replicates < 2) {
    throw Error(ErrorKind::invalid_argument, "bootstrap needs at least 2 replicates");
  }
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "alpha must lie in (0, 1)");
  }
  const std::size_t n = pairs.size();
  auto replicate = [&](std::size_t b) {
    const std::uint64_t rs = derive_seed(seed, b);
    std::mt19937_64 rng(derive_seed(rs, kResampleStream));
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = pick(rng);
      xs[i] = pairs.xs()[j];
      ys[i] = pairs.ys()[j];
    }
    const SamplePair resampled(std::move(xs), std::move(ys));
    const double lxy = score_direction(resampled, Direction::x_to_y, config, rs).loss;
    const double lyx = score_direction(resampled, Direction::y_to_x, config, rs).loss;
    return std::pair<double, double>{lxy, lyx};
  };
  const std::size_t workers = options.workers == 0 ? default_workers() : options.workers;

  BootstrapResult result;
  result.replicates = options.replicates;
  result.losses = parallel_map(options.replicates, replicate, workers);
  std::vector<double> a, b;
  a.reserve(result.losses.size());
  b.reserve(result.losses.size());
  for (const auto& [lxy, lyx] : result.losses) {
    a.push_back(lxy);
    b.push_back(lyx);
  }
  const auto t = welch_t_test(a, b);
  result.t_statistic = t.t;
  result.p_value = t.p_value;
  result.degenerate = t.degenerate;
  return result;
}

}  // namespace divot
