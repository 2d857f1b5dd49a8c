#include "divot/multivar.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "divot/divergence.hpp"
#include "divot/error.hpp"
#include "divot/pairdata.hpp"
#include "divot/parallel.hpp"
#include "divot/seed.hpp"

namespace divot {

namespace {

std::vector<std::string_view> split_fields(const std::string& line) {
  std::vector<std::string_view> fields;
  std::size_t pos = line.find_first_not_of(" \t\r,");
  while (pos != std::string::npos) {
    const auto end = line.find_first_of(" \t\r,", pos);
    const auto stop = end == std::string::npos ? line.size() : end;
    fields.emplace_back(line.data() + pos, stop - pos);
    pos = line.find_first_not_of(" \t\r,", stop);
  }
  return fields;
}

bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string::npos || line[first] == '#';
}

template <class T>
T parse_number(std::string_view f, std::size_t line_no) {
  T value{};
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    throw ParseError(line_no, "malformed numeric field '" + std::string(f) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_dataset(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);
    if (data.columns.empty()) data.columns.resize(fields.size());
    if (fields.size() != data.columns.size()) {
      throw ParseError(line_no, "expected " + std::to_string(data.columns.size()) + " fields, found " +
                                    std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const double v = parse_number<double>(fields[c], line_no);
      if (!std::isfinite(v)) throw ParseError(line_no, "non-finite value");
      data.columns[c].push_back(v);
    }
  }
  if (data.rows() < 2) throw Error(ErrorKind::insufficient_data, "dataset needs at least 2 rows");
  return data;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return parse_dataset(in);
}

Dataset normalize_columns(const Dataset& data) {
  Dataset out = data;
  for (std::size_t c = 0; c < out.vars(); ++c) {
    auto& col = out.columns[c];
    const double n = static_cast<double>(col.size());
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) {
      throw Error(ErrorKind::degenerate_data, "zero standard deviation in column " + std::to_string(c));
    }
    for (double& v : col) v = (v - m) / sd;
  }
  return out;
}

Skeleton::Skeleton(std::size_t vars, std::vector<Edge> edges) : vars_(vars) {
  std::set<Edge> seen;
  for (auto [u, v] : edges) {
    if (u >= vars || v >= vars) {
      throw Error(ErrorKind::invalid_argument, "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                                   ") references a variable >= " + std::to_string(vars));
    }
    if (u == v) throw Error(ErrorKind::invalid_argument, "self-loop on variable " + std::to_string(u));
    const Edge e{std::min(u, v), std::max(u, v)};
    if (!seen.insert(e).second) {
      throw Error(ErrorKind::invalid_argument, "duplicate edge (" + std::to_string(e.first) + ", " +
                                                   std::to_string(e.second) + ")");
    }
    edges_.push_back(e);
  }
}

Skeleton parse_skeleton(std::istream& in, std::size_t vars) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) throw ParseError(line_no, "expected an 'i j' pair");
    edges.emplace_back(parse_number<std::size_t>(fields[0], line_no),
                       parse_number<std::size_t>(fields[1], line_no));
  }
  return Skeleton(vars, std::move(edges));
}

Skeleton load_skeleton(const std::filesystem::path& path, std::size_t vars) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  return parse_skeleton(in, vars);
}

std::vector<std::size_t> DagOrientation::parents(std::size_t child) const {
  std::vector<std::size_t> out;
  for (auto [p, c] : directed) {
    if (c == child) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool DagOrientation::acyclic() const {
  // Kahn's algorithm
  std::vector<std::size_t> in_degree(vars, 0);
  std::vector<std::vector<std::size_t>> next(vars);
  for (auto [p, c] : directed) {
    ++in_degree[c];
    next[p].push_back(c);
  }
  std::vector<std::size_t> stack;
  for (std::size_t v = 0; v < vars; ++v) {
    if (in_degree[v] == 0) stack.push_back(v);
  }
  std::size_t visited = 0;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    ++visited;
    for (auto c : next[v]) {
      if (--in_degree[c] == 0) stack.push_back(c);
    }
  }
  return visited == vars;
}

DagOrientation orient(const Skeleton& skeleton, std::vector<bool> flipped) {
  if (flipped.size() != skeleton.edges().size()) {
    throw Error(ErrorKind::shape, "orientation vector length differs from edge count");
  }
  DagOrientation dag;
  dag.vars = skeleton.vars();
  dag.directed.reserve(flipped.size());
  for (std::size_t e = 0; e < flipped.size(); ++e) {
    const auto [u, v] = skeleton.edges()[e];
    dag.directed.push_back(flipped[e] ? Edge{v, u} : Edge{u, v});
  }
  dag.flipped = std::move(flipped);
  return dag;
}

std::vector<DagOrientation> enumerate_orientations(const Skeleton& skeleton,
                                                   std::size_t max_edges) {
  const std::size_t e = skeleton.edges().size();
  if (e > max_edges) {
    throw Error(ErrorKind::too_large,
                std::to_string(e) + " edges exceed the enumeration limit of " + std::to_string(max_edges) +
                    "; orient edges one at a time with the bivariate 'infer' command instead");
  }
  std::vector<DagOrientation> out;
  const std::uint64_t count = std::uint64_t{1} << e;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<bool> flipped(e);
    for (std::size_t i = 0; i < e; ++i) flipped[i] = (mask >> (e - 1 - i)) & 1U;
    auto dag = orient(skeleton, std::move(flipped));
    if (dag.acyclic()) out.push_back(std::move(dag));
  }
  return out;
}

namespace {

std::vector<std::size_t> anchor_rows(std::size_t n, std::size_t max_positions) {
  const std::size_t count = std::min(n, max_positions);
  std::vector<std::size_t> rows(count);
  for (std::size_t j = 0; j < count; ++j) rows[j] = j * n / count;
  return rows;
}

BatchSet knn_batches(const Dataset& data, std::span<const std::size_t> parents, double batch_frac,
                     std::size_t max_positions) {
  const std::size_t n = data.rows();
  const std::size_t k = batch_size_for(batch_frac, n);
  if (k < 2) {
    throw Error(ErrorKind::insufficient_data, "batch fraction yields fewer than 2 rows per batch");
  }
  std::vector<double> inv_sd;
  for (auto p : parents) {
    const auto& col = data.columns[p];
    const double m = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : col) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    inv_sd.push_back(sd > 0.0 ? 1.0 / sd : 1.0);
  }
  BatchSet out;
  std::vector<double> dist(n);
  std::vector<std::size_t> order(n);
  for (auto anchor : anchor_rows(n, max_positions)) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < parents.size(); ++j) {
        const auto& col = data.columns[parents[j]];
        const double d = (col[i] - col[anchor]) * inv_sd[j];
        acc += d * d;
      }
      dist[i] = acc;
    }
    std::iota(order.begin(), order.end(), 0);
    auto closer = [&](std::size_t a, std::size_t b) {
      return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
    };
    if (k < n) std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
    std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), closer);
    out.batches.push_back(Batch{static_cast<double>(anchor),
                                std::vector<std::size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k))});
  }
  return out;
}

}  // namespace

VariableTerm variable_term(const Dataset& data, std::size_t variable,
                           std::span<const std::size_t> parents, NoiseSource source,
                           const MultivarConfig& config, std::uint64_t seed) {
  const std::size_t n = data.rows();
  const auto& effect = data.columns.at(variable);
  VariableTerm term;
  term.variable = variable;
  term.parents.assign(parents.begin(), parents.end());
  std::sort(term.parents.begin(), term.parents.end());

  BatchedSample sample;
  try {
    if (parents.empty()) {
      sample.positions = {0.0};
      sample.causes = {std::vector<double>(n, 0.0)};
      sample.effects = {effect};
    } else if (parents.size() == 1) {
      const auto& cause = data.columns.at(parents[0]);
      const auto positions = select_positions(cause, config.max_positions);
      const double frac = config.batch_frac.value_or(default_batch_frac(n));
      sample = gather(make_batches(cause, positions, frac), cause, effect);
    } else {
      const double frac = config.batch_frac.value_or(default_batch_frac(n));
      sample = gather(knn_batches(data, term.parents, frac, config.max_positions), effect, effect);
      sample.causes.clear();
    }
  } catch (const Error& e) {
    throw Error(e.kind(), "variable " + std::to_string(variable) + ": " + e.what());
  }

  const auto draws = draw_sources(source, sample.sizes(), derive_seed(seed, variable));
  MeasureParams params;
  params.theta = fit_theta(sample, draws, params, config.fit, ThetaMethod::closed_form);
  term.theta = params.theta;
  term.raw = raw_measure(sample, draws, params);
  term.batches = sample.size();
  return term;
}

MultivariateScore multivariate_measure(const Dataset& data, const DagOrientation& dag,
                                       std::span<const NoiseSource> sources,
                                       const MultivarConfig& config, std::uint64_t seed) {
  if (dag.vars != data.vars()) {
    throw Error(ErrorKind::shape, "orientation has " + std::to_string(dag.vars) + " variables, data has " +
                                      std::to_string(data.vars()));
  }
  if (!sources.empty() && sources.size() != data.vars()) {
    throw Error(ErrorKind::shape, "need one noise source per variable");
  }
  MultivariateScore score;
  for (std::size_t i = 0; i < data.vars(); ++i) {
    const auto parents = dag.parents(i);
    const auto source = sources.empty() ? config.noise : sources[i];
    score.terms.push_back(variable_term(data, i, parents, source, config, seed));
    score.total += score.terms.back().raw;
  }
  return score;
}

OrientationResult orient_skeleton(const Dataset& data, const Skeleton& skeleton,
                                  const MultivarConfig& config, std::uint64_t seed) {
  if (skeleton.vars() != data.vars()) {
    throw Error(ErrorKind::shape, "skeleton has " + std::to_string(skeleton.vars()) +
                                      " variables, data has " + std::to_string(data.vars()));
  }
  auto dags = enumerate_orientations(skeleton, config.max_edges);

  // Each (variable, parent set) term is shared by many orientations; score each once.
  using Key = std::pair<std::size_t, std::vector<std::size_t>>;
  std::map<Key, double> terms;
  for (const auto& dag : dags) {
    for (std::size_t i = 0; i < dag.vars; ++i) terms.emplace(Key{i, dag.parents(i)}, 0.0);
  }
  std::vector<Key> keys;
  keys.reserve(terms.size());
  for (const auto& [k, _] : terms) keys.push_back(k);
  const auto values = parallel_map(
      keys.size(),
      [&](std::size_t j) {
        return variable_term(data, keys[j].first, keys[j].second, config.noise, config, seed).raw;
      },
      config.workers == 0 ? default_workers() : config.workers);
  for (std::size_t j = 0; j < keys.size(); ++j) terms[keys[j]] = values[j];

  OrientationResult result;
  result.score = std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t d = 0; d < dags.size(); ++d) {
    double total = 0.0;
    for (std::size_t i = 0; i < dags[d].vars; ++i) total += terms.at(Key{i, dags[d].parents(i)});
    if (total < result.score - config.tie_tolerance) {
      result.score = total;
      best = d;
    }
    result.scored.emplace_back(dags[d], total);
  }
  for (std::size_t d = 0; d < dags.size(); ++d) {
    if (d != best && std::abs(result.scored[d].second - result.score) <= config.tie_tolerance) {
      result.tie = true;
    }
  }
  result.best = dags[best];
  return result;
}

}  // namespace divot
