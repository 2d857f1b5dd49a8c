#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "divot/noise.hpp"
#include "divot/optimize.hpp"

namespace divot {

// Column-major m-variable sample.
struct Dataset {
  std::vector<std::vector<double>> columns;

  std::size_t vars() const noexcept { return columns.size(); }
  std::size_t rows() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
};

Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);
// z-scores every column (n - 1 denominator).
Dataset normalize_columns(const Dataset& data);

using Edge = std::pair<std::size_t, std::size_t>;

// Undirected simple graph; edges are stored as (min, max) in input order.
class Skeleton {
 public:
  Skeleton(std::size_t vars, std::vector<Edge> edges);

  std::size_t vars() const noexcept { return vars_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  std::size_t vars_;
  std::vector<Edge> edges_;
};

// One "i j" pair per line, 0-based; '#' comments allowed.
Skeleton parse_skeleton(std::istream& in, std::size_t vars);
Skeleton load_skeleton(const std::filesystem::path& path, std::size_t vars);

struct DagOrientation {
  std::size_t vars = 0;
  // flipped[e] == false orients skeleton edge (u, v) as u -> v.
  std::vector<bool> flipped;
  std::vector<Edge> directed;  // (parent, child)

  std::vector<std::size_t> parents(std::size_t child) const;
  bool acyclic() const;
};

DagOrientation orient(const Skeleton& skeleton, std::vector<bool> flipped);

// All acyclic orientations, in lexicographic order of the flipped vector.
std::vector<DagOrientation> enumerate_orientations(const Skeleton& skeleton,
                                                   std::size_t max_edges = 12);

struct MultivarConfig {
  NoiseSource noise = NoiseSource::standard_normal;
  std::optional<double> batch_frac;  // unset: default_batch_frac(n)
  std::size_t max_positions = 50;
  std::size_t max_edges = 12;
  FitConfig fit;
  double tie_tolerance = 1e-12;
  std::size_t workers = 0;  // 0: hardware concurrency
};

struct VariableTerm {
  std::size_t variable = 0;
  std::vector<std::size_t> parents;
  double raw = 0.0;
  double theta = 0.0;
  std::size_t batches = 0;
};

struct MultivariateScore {
  double total = 0.0;
  std::vector<VariableTerm> terms;  // one per variable
};

// Raw measure of one variable given its parent set. Roots fit their marginal over a
// single whole-sample batch; one parent batches exactly like the bivariate path;
// several parents use k-nearest-neighbour batches in standardized parent space.
// Noise draws come from derive_seed(seed, variable).
VariableTerm variable_term(const Dataset& data, std::size_t variable,
                           std::span<const std::size_t> parents, NoiseSource source,
                           const MultivarConfig& config, std::uint64_t seed);

// Sum of variable terms. `sources` is empty (use config.noise) or one per variable.
MultivariateScore multivariate_measure(const Dataset& data, const DagOrientation& dag,
                                       std::span<const NoiseSource> sources,
                                       const MultivarConfig& config, std::uint64_t seed);

struct OrientationResult {
  DagOrientation best;
  double score = 0.0;
  bool tie = false;  // another orientation matched the best score within tolerance
  std::vector<std::pair<DagOrientation, double>> scored;  // enumeration order
};

OrientationResult orient_skeleton(const Dataset& data, const Skeleton& skeleton,
                                  const MultivarConfig& config, std::uint64_t seed);

}  // namespace divot
