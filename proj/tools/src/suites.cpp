#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "divot/error.hpp"
#include "divot/parallel.hpp"
#include "divot/seed.hpp"
#include "divot/stats.hpp"

namespace divot::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t workers_of(const RunConfig& c) { return c.workers == 0 ? default_workers() : c.workers; }

// One timed pipeline call. Bootstrap replicates run serially here because the
// suites already fan out across datasets.
struct Timed {
  Verdict verdict;
  double wall_ms = 0.0;
};

Timed timed_infer(const SamplePair& pairs, const PipelineConfig& pipeline, std::uint64_t seed,
                  std::size_t replicates, double alpha) {
  const auto start = std::chrono::steady_clock::now();
  Timed t;
  if (replicates > 0) {
    BootstrapOptions b;
    b.replicates = replicates;
    b.alpha = alpha;
    b.workers = 1;
    t.verdict = infer_direction(pairs, pipeline, seed, b);
  } else {
    t.verdict = infer_direction(pairs, pipeline, seed);
  }
  t.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return t;
}

std::string p_field(const Verdict& v) { return v.p_value ? num(*v.p_value) : std::string("NA"); }

// Synthetic pairs are normalized and trimmed like file inputs but never subsampled.
SamplePair prepare_synthetic(const RunConfig& c, const SamplePair& raw, std::uint64_t seed) {
  auto o = c.preprocessing(seed);
  o.max_n = std::max(o.max_n, raw.size());
  return preprocess(raw, o);
}

}  // namespace

BenchReport run_synthetic(const RunConfig& c) {
  struct Job {
    Mechanism mechanism;
    std::size_t n;
    std::uint64_t seed;
    std::size_t rep;
  };
  std::vector<Job> jobs;
  for (auto m : c.mechanisms) {
    for (auto n : c.sizes) {
      for (auto s : c.seeds) {
        for (std::size_t r = 0; r < c.reps; ++r) jobs.push_back({m, n, s, r});
      }
    }
  }
  const auto pipeline = c.pipeline();
  const auto results = parallel_map(
      jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        GeneratorSpec g;
        g.mechanism = j.mechanism;
        g.n = j.n;
        g.seed = derive_seed(derive_seed(j.seed, static_cast<std::uint64_t>(j.mechanism) * 1000003u + j.n),
                             j.rep);
        return timed_infer(prepare_synthetic(c, generate(g), g.seed), pipeline, g.seed, c.bootstrap,
                           c.alpha);
      },
      workers_of(c));

  BenchReport report;
  report.header = {"suite", "mechanism", "n",      "seed",    "rep",           "decision",
                   "correct", "loss_xy",  "loss_yx", "p_value", "config_digest", "wall_ms"};
  const auto digest = c.digest();
  std::map<std::pair<Mechanism, std::size_t>, std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    const auto& v = results[i].verdict;
    const bool correct = v.decision == Decision::x_to_y;
    auto& cell = cells[{j.mechanism, j.n}];
    cell.first += correct;
    ++cell.second;
    report.rows.push_back({"synthetic", std::string(to_string(j.mechanism)), std::to_string(j.n),
                           std::to_string(j.seed), std::to_string(j.rep),
                           std::string(to_string(v.decision)), correct ? "1" : "0",
                           num(v.forward.loss), num(v.backward.loss), p_field(v), digest,
                           num(results[i].wall_ms)});
  }
  std::ostringstream os;
  os << "mechanism,n,accuracy\n";
  for (auto m : c.mechanisms) {
    for (auto n : c.sizes) {
      const auto [ok, total] = cells[{m, n}];
      const double acc = static_cast<double>(ok) / static_cast<double>(total);
      report.metrics["accuracy/" + std::string(to_string(m)) + "/" + std::to_string(n)] = acc;
      os << to_string(m) << ',' << n << ',' << num(acc) << '\n';
    }
  }
  report.summary = os.str();
  return report;
}

std::vector<PairTruth> parse_meta(std::istream& in) {
  std::vector<PairTruth> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim_ws(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw ParseError(line_no, "expected 'file,direction'");
    const auto file = trim_ws(t.substr(0, comma));
    const auto dir = trim_ws(t.substr(comma + 1));
    if (file == "file" && dir == "direction") continue;  // header row
    if (file.empty()) throw ParseError(line_no, "empty file name");
    if (dir == "x->y") {
      out.push_back({file, Decision::x_to_y});
    } else if (dir == "y->x") {
      out.push_back({file, Decision::y_to_x});
    } else {
      throw ParseError(line_no, "direction must be 'x->y' or 'y->x', got '" + dir + "'");
    }
  }
  return out;
}

std::vector<PairTruth> load_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open metadata '" + path.string() + "'");
  return parse_meta(in);
}

BenchReport run_tuebingen(const RunConfig& c, const std::filesystem::path& data_dir,
                          const std::filesystem::path& meta) {
  const auto truth = load_meta(meta);
  if (truth.empty()) throw Error(ErrorKind::insufficient_data, "metadata lists no pairs");
  if (c.seeds.empty()) throw Error(ErrorKind::invalid_argument, "no seeds configured");

  // Load every file up front so a missing pair fails before any work is done.
  std::vector<SamplePair> raw;
  raw.reserve(truth.size());
  for (const auto& t : truth) raw.push_back(load_pairs(data_dir / t.file));

  const auto pipeline = c.pipeline();
  const std::size_t per_seed = truth.size();
  const auto results = parallel_map(
      per_seed * c.seeds.size(),
      [&](std::size_t i) {
        const auto seed = c.seeds[i / per_seed];
        const auto& pairs = raw[i % per_seed];
        return timed_infer(preprocess(pairs, c.preprocessing(seed)), pipeline, seed, c.bootstrap,
                           c.alpha);
      },
      workers_of(c));

  BenchReport report;
  report.header = {"suite",   "file",    "seed",    "truth",         "decision", "correct",
                   "loss_xy", "loss_yx", "p_value", "config_digest", "wall_ms"};
  const auto digest = c.digest();
  std::vector<double> accuracy;
  for (std::size_t s = 0; s < c.seeds.size(); ++s) {
    std::size_t ok = 0;
    for (std::size_t p = 0; p < per_seed; ++p) {
      const auto& r = results[s * per_seed + p];
      const bool correct = r.verdict.decision == truth[p].truth;
      ok += correct;
      report.rows.push_back({"tuebingen", truth[p].file, std::to_string(c.seeds[s]),
                             std::string(to_string(truth[p].truth)),
                             std::string(to_string(r.verdict.decision)), correct ? "1" : "0",
                             num(r.verdict.forward.loss), num(r.verdict.backward.loss),
                             p_field(r.verdict), digest, num(r.wall_ms)});
    }
    accuracy.push_back(static_cast<double>(ok) / static_cast<double>(per_seed));
  }
  const double acc_mean = mean(accuracy);
  const double sd = accuracy.size() > 1 ? std::sqrt(sample_variance(accuracy)) : 0.0;
  report.metrics["accuracy_mean"] = acc_mean;
  report.metrics["accuracy_sd"] = sd;
  report.metrics["pairs"] = static_cast<double>(per_seed);
  std::ostringstream os;
  os << "pairs=" << per_seed << " seeds=" << c.seeds.size() << " accuracy=" << num(100 * acc_mean)
     << "% +- " << num(100 * sd) << "%\n";
  report.summary = os.str();
  return report;
}

BenchReport run_confounder(const RunConfig& c) {
  struct Job {
    int fcm;
    double w_x, w_y;
    Mechanism mechanism;
    std::uint64_t seed;
  };
  const double grid[] = {0.1, 1.0, 10.0};
  std::vector<Job> cells;
  cells.push_back({1, 1.0, 1.0, Mechanism::linear, 0});
  for (double wx : grid) {
    for (double wy : grid) cells.push_back({2, wx, wy, Mechanism::linear, 0});
  }
  for (auto m : {Mechanism::linear, Mechanism::sine}) {
    for (double wx : grid) {
      for (double wy : grid) cells.push_back({3, wx, wy, m, 0});
    }
  }
  std::vector<Job> jobs;
  for (auto s : c.seeds) {
    for (auto j : cells) {
      j.seed = s;
      jobs.push_back(j);
    }
  }
  const std::size_t replicates = c.bootstrap > 0 ? c.bootstrap : 50;
  const auto pipeline = c.pipeline();
  const auto results = parallel_map(
      jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        GeneratorSpec g;
        g.mechanism = j.mechanism;
        g.confounder = Confounder{j.w_x, j.w_y, j.fcm};
        g.n = c.n;
        g.seed = j.seed;
        return timed_infer(prepare_synthetic(c, generate(g), j.seed), pipeline, j.seed, replicates,
                           c.alpha);
      },
      workers_of(c));

  BenchReport report;
  report.header = {"suite",    "fcm",     "mechanism", "w_x",     "w_y",
                   "seed",     "n",       "decision",  "loss_xy", "loss_yx",
                   "p_value",  "config_digest", "wall_ms"};
  const auto digest = c.digest();
  std::ostringstream os;
  os << "fcm,mechanism,w_x,w_y,seed,p_value,decision\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    const auto& v = results[i].verdict;
    const auto mech = j.fcm == 3 ? std::string(to_string(j.mechanism)) : std::string("none");
    report.rows.push_back({"confounder", std::to_string(j.fcm), mech, num(j.w_x), num(j.w_y),
                           std::to_string(j.seed), std::to_string(c.n),
                           std::string(to_string(v.decision)), num(v.forward.loss),
                           num(v.backward.loss), p_field(v), digest, num(results[i].wall_ms)});
    os << j.fcm << ',' << mech << ',' << num(j.w_x) << ',' << num(j.w_y) << ',' << j.seed << ','
       << p_field(v) << ',' << to_string(v.decision) << '\n';
  }
  report.summary = os.str();
  return report;
}

BenchReport run_significance(const RunConfig& c) {
  struct Job {
    Mechanism mechanism;
    double weight;
    std::uint64_t seed;
  };
  const double weights[] = {0.01, 0.02, 0.03, 0.04, 0.05};
  std::vector<Job> jobs;
  for (auto s : c.seeds) {
    for (auto m : c.mechanisms) {
      for (double w : weights) jobs.push_back({m, w, s});
    }
  }
  const std::size_t replicates = c.bootstrap > 0 ? c.bootstrap : 50;
  const auto pipeline = c.pipeline();
  const auto results = parallel_map(
      jobs.size(),
      [&](std::size_t i) {
        const auto& j = jobs[i];
        GeneratorSpec g;
        g.mechanism = j.mechanism;
        g.weight = j.weight;
        g.n = c.n;
        g.seed = j.seed;
        return timed_infer(prepare_synthetic(c, generate(g), j.seed), pipeline, j.seed, replicates,
                           c.alpha);
      },
      workers_of(c));

  BenchReport report;
  report.header = {"suite",   "mechanism", "weight",  "seed",    "n",
                   "decision", "loss_xy",  "loss_yx", "p_value", "config_digest", "wall_ms"};
  const auto digest = c.digest();
  std::ostringstream os;
  os << "mechanism,weight,seed,p_value,decision\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& j = jobs[i];
    const auto& v = results[i].verdict;
    report.rows.push_back({"significance", std::string(to_string(j.mechanism)), num(j.weight),
                           std::to_string(j.seed), std::to_string(c.n),
                           std::string(to_string(v.decision)), num(v.forward.loss),
                           num(v.backward.loss), p_field(v), digest, num(results[i].wall_ms)});
    os << to_string(j.mechanism) << ',' << num(j.weight) << ',' << j.seed << ',' << p_field(v)
       << ',' << to_string(v.decision) << '\n';
  }
  report.summary = os.str();
  return report;
}

}  // namespace divot::cli
