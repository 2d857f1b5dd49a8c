#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace divot {

// Ordered (x, y) observations plus a log of the preprocessing applied to them.
class SamplePair {
 public:
  SamplePair() = default;
  SamplePair(std::vector<double> xs, std::vector<double> ys,
             std::vector<std::string> provenance = {});

  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> ys() const noexcept { return ys_; }
  std::size_t size() const noexcept { return xs_.size(); }
  const std::vector<std::string>& provenance() const noexcept { return provenance_; }

  // Columns exchanged; provenance carries over with a "swap" entry.
  SamplePair swapped() const;
  SamplePair with_step(std::string step) const;

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<std::string> provenance_;
};

using ColumnPair = std::pair<std::size_t, std::size_t>;

// Whitespace-separated numeric columns; '#' lines and blank lines skipped.
SamplePair parse_pairs(std::istream& in, std::optional<ColumnPair> columns = std::nullopt);
SamplePair load_pairs(const std::filesystem::path& path,
                      std::optional<ColumnPair> columns = std::nullopt);

struct PreprocessOptions {
  std::size_t max_n = 500;
  // Rows with |z| > k_std in either column are dropped. Infinity disables.
  double k_std = 2.0;
  std::uint64_t seed = 0;
};

// z-score with the n-1 sample standard deviation.
SamplePair normalize(const SamplePair& pairs);
SamplePair trim_outliers(const SamplePair& pairs, double k_std);
SamplePair subsample(const SamplePair& pairs, std::size_t max_n, std::uint64_t seed);

// normalize -> trim -> subsample.
SamplePair preprocess(const SamplePair& pairs, const PreprocessOptions& options = {});

// Anchor values on the cause axis, sorted ascending and deduplicated.
std::vector<double> select_positions(std::span<const double> xs, std::size_t max_positions = 50);
inline std::vector<double> select_positions(const SamplePair& pairs, std::size_t max_positions = 50) {
  return select_positions(pairs.xs(), max_positions);
}

struct Batch {
  double position = 0.0;
  std::vector<std::size_t> indices;  // rows, nearest first
};

struct BatchSet {
  std::vector<Batch> batches;
  std::size_t dropped = 0;  // positions whose batch could not reach two rows

  std::size_t size() const noexcept { return batches.size(); }
  std::vector<double> positions() const;
  std::vector<std::size_t> batch_sizes() const;
};

// ceil(batch_frac * n) with a guard against 0.6 * 5 = 3.0000000000000004.
std::size_t batch_size_for(double batch_frac, std::size_t n);

// The k = batch_size_for(batch_frac, n) nearest rows in |x - position| for every
// position; ties go to the smaller row index.
BatchSet make_batches(std::span<const double> xs, std::span<const double> positions,
                      double batch_frac);
inline BatchSet make_batches(const SamplePair& pairs, std::span<const double> positions,
                             double batch_frac) {
  return make_batches(pairs.xs(), positions, batch_frac);
}

// Batch fraction by sample size: 10 -> 0.4, 25/50 -> 0.2, 100/200 -> 0.15,
// 500 and above -> 0.05. Sizes in between take the value of the next listed size.
double default_batch_frac(std::size_t n);

}  // namespace divot
