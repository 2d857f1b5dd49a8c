#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divot/decide.hpp"
#include "divot/multivar.hpp"
#include "divot/pairdata.hpp"
#include "divot/synth.hpp"

namespace divot::cli {

// Everything a run depends on. Settings come from defaults, then an optional
// key=value file, then command-line flags.
struct RunConfig {
  Mode mode = Mode::anm;
  NoiseSource noise = NoiseSource::standard_normal;
  std::optional<double> batch_frac;  // unset: "auto" schedule by sample size
  std::size_t positions = 50;
  std::size_t max_n = 500;
  double trim = 2.0;  // k_std; infinity disables trimming
  bool debias = false;
  std::size_t restarts = 0;
  std::size_t bootstrap = 0;  // replicates; 0 disables the significance test
  double alpha = 0.05;
  std::vector<std::uint64_t> seeds{0};
  // Synthetic suites.
  std::size_t reps = 100;
  std::vector<std::size_t> sizes{100, 200, 500};
  std::vector<Mechanism> mechanisms{Mechanism::linear, Mechanism::cubic, Mechanism::sine,
                                    Mechanism::piecewise};
  std::size_t n = 1000;  // sample size of the confounder and significance suites
  std::size_t workers = 0;

  PipelineConfig pipeline() const;
  PreprocessOptions preprocessing(std::uint64_t seed) const;
  // Stable "key=value" lines in key order; the digest hashes exactly this text.
  std::string canonical() const;
  std::string digest() const;
};

// Applies one setting; unknown keys and malformed values throw Error(invalid_argument).
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);
// key=value per line, '#' comments and blank lines ignored. Errors carry the line.
void apply_config(RunConfig& config, std::istream& in);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

// Writes via a temporary sibling file and rename, so a failed run leaves no partial file.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

// Single-pair inference: loads, preprocesses and scores a pair file; returns the
// JSON record (deterministic for a given file, config and seed).
std::string infer_report(const RunConfig& config, const std::filesystem::path& pair_file,
                         std::optional<ColumnPair> columns = std::nullopt);

std::string orient_report(const RunConfig& config, const std::filesystem::path& data_file,
                          const std::filesystem::path& skeleton_file);

// Long-format benchmark table plus headline metrics.
struct BenchReport {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, double> metrics;
  std::string summary;  // human-readable digest for stdout

  std::string csv() const;
};

enum class Suite { synthetic, tuebingen, confounder, significance };
Suite parse_suite(std::string_view name);

// One ground-truth entry of the Tuebingen metadata CSV ("file,direction").
struct PairTruth {
  std::string file;
  Decision truth = Decision::x_to_y;
};
std::vector<PairTruth> parse_meta(std::istream& in);
std::vector<PairTruth> load_meta(const std::filesystem::path& path);

BenchReport run_synthetic(const RunConfig& config);
BenchReport run_tuebingen(const RunConfig& config, const std::filesystem::path& data_dir,
                          const std::filesystem::path& meta);
BenchReport run_confounder(const RunConfig& config);
BenchReport run_significance(const RunConfig& config);

// Entry point of the `divot` executable; returns the process exit status.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace divot::cli
