#include "divot/ot1d.hpp"

#include <algorithm>

#include "divot/error.hpp"
#include "divot/seed.hpp"

namespace divot {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorKind::shape, std::string(what) + ": lengths differ (" + std::to_string(a) +
                                      " vs " + std::to_string(b) + ")");
  }
  if (a == 0) throw Error(ErrorKind::shape, std::string(what) + ": empty input");
}

std::vector<double> sorted_copy(std::span<const double> v) {
  std::vector<double> out(v.begin(), v.end());
  std::stable_sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<double> Coupling::velocities() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& [s, t] : pairs) out.push_back(t - s);
  return out;
}

Coupling couple_1d(std::span<const double> source, std::span<const double> target) {
  require_same_length(source.size(), target.size(), "couple_1d");
  const auto s = sorted_copy(source);
  const auto t = sorted_copy(target);
  Coupling c;
  c.pairs.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) c.pairs.emplace_back(s[i], t[i]);
  return c;
}

double w2_squared_1d(std::span<const double> a, std::span<const double> b) {
  require_same_length(a.size(), b.size(), "w2_squared_1d");
  const auto sa = sorted_copy(a);
  const auto sb = sorted_copy(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const double d = sa[i] - sb[i];
    acc += d * d;
  }
  return acc / static_cast<double>(sa.size());
}

SourceDraws draw_sources(NoiseSource source, std::span<const std::size_t> batch_sizes,
                         std::uint64_t seed) {
  SourceDraws draws{source, {}};
  draws.sorted.reserve(batch_sizes.size());
  for (std::size_t b = 0; b < batch_sizes.size(); ++b) {
    auto v = sample_source(source, batch_sizes[b], derive_seed(seed, b));
    std::sort(v.begin(), v.end());
    draws.sorted.push_back(std::move(v));
  }
  return draws;
}

double conditional_w2(std::span<const std::vector<double>> batch_values, const SourceDraws& draws,
                      double theta) {
  require_same_length(batch_values.size(), draws.sorted.size(), "conditional_w2 (batches)");
  double acc = 0.0;
  std::vector<double> scaled;
  for (std::size_t b = 0; b < batch_values.size(); ++b) {
    const auto& src = draws.sorted[b];
    scaled.resize(src.size());
    std::transform(src.begin(), src.end(), scaled.begin(), [theta](double e) { return theta * e; });
    acc += w2_squared_1d(batch_values[b], scaled);
  }
  return acc / static_cast<double>(batch_values.size());
}

double conditional_w2(std::span<const std::vector<double>> batch_values, const NoiseModel& noise,
                      std::uint64_t seed) {
  std::vector<std::size_t> sizes;
  sizes.reserve(batch_values.size());
  for (const auto& v : batch_values) sizes.push_back(v.size());
  return conditional_w2(batch_values, draw_sources(noise.source, sizes, seed), noise.theta);
}

}  // namespace divot
