#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "divot/error.hpp"

namespace divot::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim_ws(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim_ws(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorKind::invalid_argument, "setting '" + std::string(key) + "': '" +
                                               std::string(value) + "' is not " + std::string(want));
}

double to_double(std::string_view key, std::string_view value) {
  const auto t = trim_ws(value);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) bad_value(key, value, "a number");
  return v;
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  const auto t = trim_ws(value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    bad_value(key, value, "a non-negative integer");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view value) {
  const auto t = trim_ws(value);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  bad_value(key, value, "a boolean");
}

ordered_json score_json(const DirectionScore& s) {
  ordered_json j;
  j["loss"] = s.loss;
  j["raw"] = s.measure.raw;
  j["theta"] = s.fitted.theta;
  j["w"] = s.fitted.debias.w;
  if (s.fitted.pnl) {
    j["pnl"] = {{"a", s.fitted.pnl->a},
                {"b", s.fitted.pnl->b},
                {"c", s.fitted.pnl->c},
                {"invertible", s.fitted.pnl->invertible()}};
  } else {
    j["pnl"] = nullptr;
  }
  j["batches"] = s.batches;
  j["iterations"] = s.iterations;
  return j;
}

}  // namespace

PipelineConfig RunConfig::pipeline() const {
  auto p = PipelineConfig::defaults(mode);
  p.noise = noise;
  p.batch_frac = batch_frac;
  p.max_positions = positions;
  p.debias = debias;
  p.restarts = restarts;
  return p;
}

PreprocessOptions RunConfig::preprocessing(std::uint64_t seed) const {
  PreprocessOptions o;
  o.max_n = max_n;
  o.k_std = trim;
  o.seed = seed;
  return o;
}

std::string RunConfig::canonical() const {
  auto join = [](const auto& values, auto&& f) {
    std::string s;
    for (const auto& v : values) s += (s.empty() ? "" : ",") + f(v);
    return s;
  };
  std::ostringstream os;
  os << "alpha=" << fmt(alpha) << '\n'
     << "batch-frac=" << (batch_frac ? fmt(*batch_frac) : "auto") << '\n'
     << "bootstrap=" << bootstrap << '\n'
     << "debias=" << (debias ? "true" : "false") << '\n'
     << "max-n=" << max_n << '\n'
     << "mechanisms=" << join(mechanisms, [](Mechanism m) { return std::string(to_string(m)); }) << '\n'
     << "mode=" << to_string(mode) << '\n'
     << "n=" << n << '\n'
     << "noise=" << to_string(noise) << '\n'
     << "positions=" << positions << '\n'
     << "reps=" << reps << '\n'
     << "restarts=" << restarts << '\n'
     << "seeds=" << join(seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n'
     << "sizes=" << join(sizes, [](std::size_t s) { return std::to_string(s); }) << '\n'
     << "trim=" << (std::isfinite(trim) ? fmt(trim) : "none") << '\n';
  return os.str();
}

std::string RunConfig::digest() const {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void apply_setting(RunConfig& c, std::string_view raw_key, std::string_view value) {
  std::string key = trim_ws(raw_key);
  for (auto& ch : key) {
    if (ch == '_') ch = '-';
  }
  const auto v = trim_ws(value);
  if (key == "mode") {
    c.mode = parse_mode(v);
  } else if (key == "noise") {
    c.noise = parse_noise_source(v);
  } else if (key == "batch-frac") {
    if (v == "auto") {
      c.batch_frac.reset();
    } else {
      const double f = to_double(key, v);
      if (!(f > 0.0 && f <= 1.0)) bad_value(key, v, "in (0, 1] or 'auto'");
      c.batch_frac = f;
    }
  } else if (key == "positions") {
    c.positions = to_uint(key, v);
    if (c.positions == 0) bad_value(key, v, "positive");
  } else if (key == "max-n") {
    c.max_n = to_uint(key, v);
    if (c.max_n < 2) bad_value(key, v, "at least 2");
  } else if (key == "trim") {
    if (v == "none" || v == "off") {
      c.trim = std::numeric_limits<double>::infinity();
    } else {
      c.trim = to_double(key, v);
      if (!(c.trim > 0.0)) bad_value(key, v, "positive or 'none'");
    }
  } else if (key == "debias") {
    c.debias = to_bool(key, v);
  } else if (key == "restarts") {
    c.restarts = to_uint(key, v);
  } else if (key == "bootstrap") {
    c.bootstrap = to_uint(key, v);
    if (c.bootstrap == 1) bad_value(key, v, "0 (off) or at least 2");
  } else if (key == "alpha") {
    c.alpha = to_double(key, v);
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad_value(key, v, "in (0, 1)");
  } else if (key == "seed" || key == "seeds") {
    c.seeds.clear();
    for (const auto& s : split(v, ',')) c.seeds.push_back(to_uint(key, s));
  } else if (key == "reps") {
    c.reps = to_uint(key, v);
    if (c.reps == 0) bad_value(key, v, "positive");
  } else if (key == "sizes") {
    c.sizes.clear();
    for (const auto& s : split(v, ',')) {
      c.sizes.push_back(to_uint(key, s));
      if (c.sizes.back() < 2) bad_value(key, s, "at least 2");
    }
  } else if (key == "mechanisms") {
    c.mechanisms.clear();
    for (const auto& s : split(v, ',')) c.mechanisms.push_back(parse_mechanism(s));
  } else if (key == "n") {
    c.n = to_uint(key, v);
    if (c.n < 2) bad_value(key, v, "at least 2");
  } else if (key == "workers") {
    c.workers = to_uint(key, v);
  } else {
    throw Error(ErrorKind::invalid_argument, "unknown setting '" + key + "'");
  }
}

void apply_config(RunConfig& config, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim_ws(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key=value");
    try {
      apply_setting(config, t.substr(0, eq), t.substr(eq + 1));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config '" + path.string() + "'");
  apply_config(config, in);
}

void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error(ErrorKind::io, "failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot move output into '" + path.string() + "'");
  }
}

std::string infer_report(const RunConfig& config, const std::filesystem::path& pair_file,
                         std::optional<ColumnPair> columns) {
  const std::uint64_t seed = config.seeds.empty() ? 0 : config.seeds.front();
  const auto raw = load_pairs(pair_file, columns);
  const auto pairs = preprocess(raw, config.preprocessing(seed));
  const auto pipeline = config.pipeline();
  Verdict v;
  if (config.bootstrap > 0) {
    BootstrapOptions b;
    b.replicates = config.bootstrap;
    b.alpha = config.alpha;
    b.workers = config.workers;
    v = infer_direction(pairs, pipeline, seed, b);
  } else {
    v = infer_direction(pairs, pipeline, seed);
  }

  ordered_json j;
  j["file"] = pair_file.filename().string();
  j["n_raw"] = raw.size();
  j["n"] = pairs.size();
  j["decision"] = std::string(to_string(v.decision));
  j["mode"] = std::string(to_string(config.mode));
  j["noise"] = std::string(to_string(config.noise));
  j["x->y"] = score_json(v.forward);
  j["y->x"] = score_json(v.backward);
  if (v.p_value) {
    j["p_value"] = *v.p_value;
    j["bootstrap_replicates"] = v.bootstrap->replicates;
    j["bootstrap_degenerate"] = v.bootstrap->degenerate;
  } else {
    j["p_value"] = nullptr;
  }
  j["alpha"] = v.alpha;
  j["seed"] = seed;
  j["config_digest"] = config.digest();
  j["provenance"] = pairs.provenance();
  return j.dump(2) + "\n";
}

std::string orient_report(const RunConfig& config, const std::filesystem::path& data_file,
                          const std::filesystem::path& skeleton_file) {
  const std::uint64_t seed = config.seeds.empty() ? 0 : config.seeds.front();
  const auto data = normalize_columns(load_dataset(data_file));
  const auto skeleton = load_skeleton(skeleton_file, data.vars());
  MultivarConfig mc;
  mc.noise = config.noise;
  mc.batch_frac = config.batch_frac;
  mc.max_positions = config.positions;
  mc.workers = config.workers;
  const auto r = orient_skeleton(data, skeleton, mc, seed);

  auto edges_json = [](const DagOrientation& d) {
    ordered_json e = ordered_json::array();
    for (auto [p, c] : d.directed) e.push_back({p, c});
    return e;
  };
  ordered_json j;
  j["file"] = data_file.filename().string();
  j["vars"] = data.vars();
  j["rows"] = data.rows();
  j["edges"] = edges_json(r.best);
  j["score"] = r.score;
  j["tie"] = r.tie;
  ordered_json all = ordered_json::array();
  for (const auto& [d, s] : r.scored) all.push_back({{"edges", edges_json(d)}, {"score", s}});
  j["orientations"] = all;
  j["noise"] = std::string(to_string(config.noise));
  j["seed"] = seed;
  j["config_digest"] = config.digest();
  return j.dump(2) + "\n";
}

std::string BenchReport::csv() const {
  auto line = [](const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) s += ',';
      const bool quote = fields[i].find_first_of(",\"\n") != std::string::npos;
      if (!quote) {
        s += fields[i];
        continue;
      }
      s += '"';
      for (char c : fields[i]) s += c == '"' ? std::string("\"\"") : std::string(1, c);
      s += '"';
    }
    return s + "\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

Suite parse_suite(std::string_view name) {
  if (name == "synthetic") return Suite::synthetic;
  if (name == "tuebingen") return Suite::tuebingen;
  if (name == "confounder") return Suite::confounder;
  if (name == "significance") return Suite::significance;
  throw Error(ErrorKind::invalid_argument, "unknown suite '" + std::string(name) + "'");
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"divot: causal direction by optimal-transport divergence"};
  app.require_subcommand(1);

  // Flags are captured as strings and applied after the config file, so that a
  // flag always overrides the file regardless of order on the command line.
  std::map<std::string, std::string> flags;
  std::string config_path;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value configuration file");
    for (const char* key : {"mode", "noise", "batch-frac", "positions", "max-n", "trim", "debias",
                            "restarts", "bootstrap", "alpha", "seed", "seeds", "workers"}) {
      sub->add_option_function<std::string>(
          std::string("--") + key, [&flags, key](const std::string& v) { flags[key] = v; },
          std::string("override '") + key + "'");
    }
  };

  std::string pair_file, out_path, columns_arg;
  auto* infer = app.add_subcommand("infer", "decide the causal direction of one pair file");
  add_common(infer);
  infer->add_option("file", pair_file, "whitespace-separated pair file")->required();
  infer->add_option("--columns", columns_arg, "zero-based x,y columns (default 0,1)");
  infer->add_option("--out", out_path, "also write the JSON record here");

  std::string suite_name = "synthetic", data_dir, meta_path;
  auto* bench = app.add_subcommand("bench", "run a benchmark suite and emit a CSV report");
  add_common(bench);
  bench->add_option("--suite", suite_name, "synthetic | tuebingen | confounder | significance");
  bench->add_option("--data-dir", data_dir, "directory of pair files (tuebingen)");
  bench->add_option("--meta", meta_path, "file,direction ground-truth CSV (tuebingen)");
  bench->add_option("--out", out_path, "CSV output path (default: stdout)");
  for (const char* key : {"reps", "sizes", "mechanisms", "n"}) {
    bench->add_option_function<std::string>(
        std::string("--") + key, [&flags, key](const std::string& v) { flags[key] = v; },
        std::string("override '") + key + "'");
  }

  std::string data_file, skeleton_file;
  auto* orient = app.add_subcommand("orient", "orient a causal skeleton over m variables");
  add_common(orient);
  orient->add_option("data", data_file, "m-column data file")->required();
  orient->add_option("--skeleton", skeleton_file, "edge list, one 'i j' pair per line")->required();
  orient->add_option("--out", out_path, "also write the JSON record here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig config;
    if (!config_path.empty()) apply_config_file(config, config_path);
    for (const auto& [k, v] : flags) apply_setting(config, k, v);

    if (infer->parsed()) {
      std::optional<ColumnPair> columns;
      if (!columns_arg.empty()) {
        const auto parts = split(columns_arg, ',');
        if (parts.size() != 2) bad_value("columns", columns_arg, "an 'x,y' pair");
        columns = ColumnPair{to_uint("columns", parts[0]), to_uint("columns", parts[1])};
      }
      const auto report = infer_report(config, pair_file, columns);
      if (!out_path.empty()) write_file_atomically(out_path, report);
      out << report;
      return 0;
    }
    if (orient->parsed()) {
      const auto report = orient_report(config, data_file, skeleton_file);
      if (!out_path.empty()) write_file_atomically(out_path, report);
      out << report;
      return 0;
    }

    BenchReport report;
    switch (parse_suite(suite_name)) {
      case Suite::synthetic: report = run_synthetic(config); break;
      case Suite::confounder: report = run_confounder(config); break;
      case Suite::significance: report = run_significance(config); break;
      case Suite::tuebingen:
        if (data_dir.empty() || meta_path.empty()) {
          throw Error(ErrorKind::invalid_argument, "tuebingen suite needs --data-dir and --meta");
        }
        report = run_tuebingen(config, data_dir, meta_path);
        break;
    }
    if (out_path.empty()) {
      out << report.csv();
      err << report.summary;
    } else {
      write_file_atomically(out_path, report.csv());
      out << report.summary;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "divot: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace divot::cli
