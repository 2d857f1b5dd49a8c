#include "divot/pairdata.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "divot/error.hpp"

namespace divot {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct ColumnStats {
  double mean = 0.0;
  double sd = 0.0;
};

ColumnStats column_stats(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

void require_rows(std::size_t n, const char* what) {
  if (n < 2) {
    throw Error(ErrorKind::insufficient_data,
                std::string(what) + ": need at least 2 rows, have " + std::to_string(n));
  }
}

}  // namespace

SamplePair::SamplePair(std::vector<double> xs, std::vector<double> ys,
                       std::vector<std::string> provenance)
    : xs_(std::move(xs)), ys_(std::move(ys)), provenance_(std::move(provenance)) {
  if (xs_.size() != ys_.size()) {
    throw Error(ErrorKind::shape, "x and y columns differ in length (" +
                                      std::to_string(xs_.size()) + " vs " +
                                      std::to_string(ys_.size()) + ")");
  }
}

SamplePair SamplePair::swapped() const {
  auto prov = provenance_;
  prov.emplace_back("swap");
  return SamplePair(ys_, xs_, std::move(prov));
}

SamplePair SamplePair::with_step(std::string step) const {
  auto prov = provenance_;
  prov.push_back(std::move(step));
  return SamplePair(xs_, ys_, std::move(prov));
}

SamplePair parse_pairs(std::istream& in, std::optional<ColumnPair> columns) {
  const auto [cx, cy] = columns.value_or(ColumnPair{0, 1});
  const std::size_t needed = std::max(cx, cy) + 1;
  std::vector<double> xs, ys;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;

    fields.clear();
    std::size_t pos = first;
    while (pos < line.size()) {
      const auto end = line.find_first_of(" \t\r", pos);
      const auto stop = end == std::string::npos ? line.size() : end;
      fields.emplace_back(line.data() + pos, stop - pos);
      pos = line.find_first_not_of(" \t\r", stop);
      if (pos == std::string::npos) break;
    }
    if (fields.size() < std::max<std::size_t>(needed, 2)) {
      throw ParseError(line_no, "expected at least " + std::to_string(std::max<std::size_t>(needed, 2)) +
                                    " fields, found " + std::to_string(fields.size()));
    }
    auto parse_field = [&](std::size_t col) {
      const auto f = fields[col];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value)) {
        throw ParseError(line_no, "malformed numeric field '" + std::string(f) + "' in column " +
                                      std::to_string(col));
      }
      return value;
    };
    xs.push_back(parse_field(cx));
    ys.push_back(parse_field(cy));
  }
  require_rows(xs.size(), "load_pairs");
  return SamplePair(std::move(xs), std::move(ys),
                    {"load(columns=" + std::to_string(cx) + "," + std::to_string(cy) + ")"});
}

SamplePair load_pairs(const std::filesystem::path& path, std::optional<ColumnPair> columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  auto pairs = parse_pairs(in, columns);
  return pairs.with_step("file=" + path.filename().string());
}

SamplePair normalize(const SamplePair& pairs) {
  require_rows(pairs.size(), "normalize");
  const auto sx = column_stats(pairs.xs());
  const auto sy = column_stats(pairs.ys());
  if (!(sx.sd > 0.0) || !(sy.sd > 0.0)) {
    throw Error(ErrorKind::degenerate_data,
                std::string("zero standard deviation in column ") + (sx.sd > 0.0 ? "y" : "x"));
  }
  std::vector<double> xs(pairs.size()), ys(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    xs[i] = (pairs.xs()[i] - sx.mean) / sx.sd;
    ys[i] = (pairs.ys()[i] - sy.mean) / sy.sd;
  }
  auto prov = pairs.provenance();
  prov.push_back("normalize(mean_x=" + fmt_double(sx.mean) + ",sd_x=" + fmt_double(sx.sd) +
                 ",mean_y=" + fmt_double(sy.mean) + ",sd_y=" + fmt_double(sy.sd) + ")");
  return SamplePair(std::move(xs), std::move(ys), std::move(prov));
}

SamplePair trim_outliers(const SamplePair& pairs, double k_std) {
  std::vector<double> xs, ys;
  xs.reserve(pairs.size());
  ys.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double x = pairs.xs()[i];
    const double y = pairs.ys()[i];
    if (std::abs(x) <= k_std && std::abs(y) <= k_std) {
      xs.push_back(x);
      ys.push_back(y);
    }
  }
  const std::size_t removed = pairs.size() - xs.size();
  require_rows(xs.size(), "trim_outliers");
  auto prov = pairs.provenance();
  prov.push_back("trim(k=" + fmt_double(k_std) + ",removed=" + std::to_string(removed) + ")");
  return SamplePair(std::move(xs), std::move(ys), std::move(prov));
}

SamplePair subsample(const SamplePair& pairs, std::size_t max_n, std::uint64_t seed) {
  if (pairs.size() <= max_n) return pairs;
  require_rows(max_n, "subsample");
  std::vector<std::size_t> idx(pairs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates; the kept rows are then restored to file order.
  for (std::size_t i = 0; i < max_n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(max_n);
  std::sort(idx.begin(), idx.end());
  std::vector<double> xs(max_n), ys(max_n);
  for (std::size_t i = 0; i < max_n; ++i) {
    xs[i] = pairs.xs()[idx[i]];
    ys[i] = pairs.ys()[idx[i]];
  }
  auto prov = pairs.provenance();
  prov.push_back("subsample(max_n=" + std::to_string(max_n) + ",seed=" + std::to_string(seed) + ")");
  return SamplePair(std::move(xs), std::move(ys), std::move(prov));
}

SamplePair preprocess(const SamplePair& pairs, const PreprocessOptions& options) {
  require_rows(pairs.size(), "preprocess");
  auto out = normalize(pairs);
  if (std::isfinite(options.k_std)) out = trim_outliers(out, options.k_std);
  return subsample(out, options.max_n, options.seed);
}

std::vector<double> select_positions(std::span<const double> xs, std::size_t max_positions) {
  if (xs.size() < 2) {
    throw Error(ErrorKind::insufficient_data, "select_positions: need at least 2 rows");
  }
  if (max_positions == 0) {
    throw Error(ErrorKind::invalid_argument, "select_positions: max_positions must be positive");
  }
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  if (xs.size() <= max_positions) {
    out = std::move(sorted);
  } else {
    const double lo = sorted.front();
    const double step = (sorted.back() - lo) / static_cast<double>(max_positions);
    out.reserve(max_positions);
    for (std::size_t j = 0; j < max_positions; ++j) {
      const double target = lo + step * static_cast<double>(j);
      auto it = std::lower_bound(sorted.begin(), sorted.end(), target);
      if (it == sorted.end()) {
        it = std::prev(it);
      } else if (it != sorted.begin() && target - *std::prev(it) <= *it - target) {
        it = std::prev(it);
      }
      out.push_back(*it);
    }
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> BatchSet::positions() const {
  std::vector<double> out;
  out.reserve(batches.size());
  for (const auto& b : batches) out.push_back(b.position);
  return out;
}

std::vector<std::size_t> BatchSet::batch_sizes() const {
  std::vector<std::size_t> out;
  out.reserve(batches.size());
  for (const auto& b : batches) out.push_back(b.indices.size());
  return out;
}

std::size_t batch_size_for(double batch_frac, std::size_t n) {
  if (!(batch_frac > 0.0 && batch_frac <= 1.0)) {
    throw Error(ErrorKind::invalid_argument,
                "batch fraction must lie in (0, 1], got " + std::to_string(batch_frac));
  }
  const double raw = batch_frac * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(k, 1, n);
}

BatchSet make_batches(std::span<const double> xs, std::span<const double> positions,
                      double batch_frac) {
  const std::size_t n = xs.size();
  const std::size_t k = batch_size_for(batch_frac, n);
  BatchSet out;
  std::vector<std::size_t> order(n);
  for (double pos : positions) {
    if (k < 2) {
      ++out.dropped;
      continue;
    }
    std::iota(order.begin(), order.end(), 0);
    auto closer = [&](std::size_t a, std::size_t b) {
      const double da = std::abs(xs[a] - pos);
      const double db = std::abs(xs[b] - pos);
      return da < db || (da == db && a < b);
    };
    if (k < n) std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), closer);
    out.batches.push_back(Batch{pos, std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k))});
  }
  if (out.batches.empty()) {
    throw Error(ErrorKind::insufficient_data,
                "every batch has fewer than 2 rows (batch_frac=" + std::to_string(batch_frac) +
                    ", n=" + std::to_string(n) + ")");
  }
  return out;
}

double default_batch_frac(std::size_t n) {
  if (n <= 10) return 0.4;
  if (n <= 50) return 0.2;
  if (n <= 200) return 0.15;
  return 0.05;
}

}  // namespace divot
