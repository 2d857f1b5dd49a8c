#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "divot/error.hpp"

using namespace divot;
using namespace divot::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("divot_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void write_pair_file(const fs::path& path, const SamplePair& pairs) {
  std::ofstream out(path);
  out.precision(17);
  out << "# x y\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) out << pairs.xs()[i] << ' ' << pairs.ys()[i] << '\n';
}

SamplePair linear_pairs(std::size_t n, std::uint64_t seed) {
  GeneratorSpec g;
  g.mechanism = Mechanism::linear;
  g.n = n;
  g.seed = seed;
  return generate(g);
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  args.insert(args.begin(), "divot");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(RunConfig, DefaultsResolveToPipeline) {
  const RunConfig c;
  const auto p = c.pipeline();
  EXPECT_EQ(p.mode, Mode::anm);
  EXPECT_FALSE(p.batch_frac.has_value());
  EXPECT_EQ(p.resolved_batch_frac(100), default_batch_frac(100));
  EXPECT_EQ(p.max_positions, 50u);
  EXPECT_EQ(c.preprocessing(7).seed, 7u);
  EXPECT_EQ(c.preprocessing(7).max_n, 500u);
}

TEST(RunConfig, ConfigFileParsing) {
  RunConfig c;
  std::istringstream in(
      "# comment\n"
      "mode = pnl\n"
      "noise=uniform\n\n"
      "batch_frac=0.1\n"
      "positions=30\n"
      "seeds=1,2,3\n"
      "trim=none\n"
      "debias=true\n"
      "sizes=100,200\n"
      "mechanisms=sine,cubic\n");
  apply_config(c, in);
  EXPECT_EQ(c.mode, Mode::pnl);
  EXPECT_EQ(c.noise, NoiseSource::uniform);
  EXPECT_EQ(c.batch_frac, 0.1);
  EXPECT_EQ(c.positions, 30u);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_TRUE(std::isinf(c.trim));
  EXPECT_TRUE(c.debias);
  EXPECT_EQ(c.sizes, (std::vector<std::size_t>{100, 200}));
  EXPECT_EQ(c.mechanisms, (std::vector<Mechanism>{Mechanism::sine, Mechanism::cubic}));
  EXPECT_EQ(c.pipeline().fit.lr_schedule, LrSchedule::cyclic);

  apply_setting(c, "batch-frac", "auto");
  EXPECT_FALSE(c.batch_frac.has_value());
}

TEST(RunConfig, ConfigErrorsCarryLine) {
  RunConfig c;
  std::istringstream bad("mode=anm\nalpha=2\n");
  try {
    apply_config(c, bad);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(apply_setting(c, "colour", "red"), Error);
  EXPECT_THROW(apply_setting(c, "batch-frac", "1.5"), Error);
  EXPECT_THROW(apply_setting(c, "bootstrap", "1"), Error);
  EXPECT_THROW(apply_setting(c, "positions", "ten"), Error);
}

TEST(RunConfig, DigestTracksEverySetting) {
  const RunConfig base;
  EXPECT_EQ(base.digest(), RunConfig{}.digest());
  EXPECT_EQ(base.digest().size(), 16u);
  for (auto [key, value] : std::vector<std::pair<const char*, const char*>>{
           {"mode", "pnl"},   {"noise", "laplace"}, {"batch-frac", "0.2"}, {"positions", "10"},
           {"max-n", "100"},  {"trim", "3"},        {"debias", "true"},    {"restarts", "2"},
           {"bootstrap", "5"}, {"alpha", "0.1"},    {"seeds", "4"},        {"reps", "3"},
           {"sizes", "50"},   {"mechanisms", "sine"}, {"n", "10"}}) {
    RunConfig c;
    apply_setting(c, key, value);
    EXPECT_NE(c.digest(), base.digest()) << key;
  }
  // Workers only affect scheduling, never results.
  RunConfig w;
  apply_setting(w, "workers", "3");
  EXPECT_EQ(w.digest(), base.digest());
}

TEST(Infer, LinearFileGivesForwardDecision) {
  TempDir dir;
  const auto file = dir.path() / "pair.txt";
  write_pair_file(file, linear_pairs(500, 11));
  std::string out;
  ASSERT_EQ(run_cli({"infer", file.string(), "--noise", "uniform", "--seed", "3"}, &out), 0);
  EXPECT_NE(out.find("\"decision\": \"x->y\""), std::string::npos) << out;
  EXPECT_NE(out.find("\"config_digest\""), std::string::npos);
  EXPECT_NE(out.find("\"p_value\": null"), std::string::npos);
}

TEST(Infer, ReportsAreByteIdentical) {
  TempDir dir;
  const auto file = dir.path() / "pair.txt";
  write_pair_file(file, linear_pairs(300, 2));
  const auto a = dir.path() / "a.json";
  const auto b = dir.path() / "b.json";
  ASSERT_EQ(run_cli({"infer", file.string(), "--bootstrap", "4", "--out", a.string()}), 0);
  ASSERT_EQ(run_cli({"infer", file.string(), "--bootstrap", "4", "--out", b.string()}), 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_NE(slurp(a).find("\"bootstrap_replicates\": 4"), std::string::npos);
}

TEST(Infer, MissingFileFailsWithoutOutput) {
  TempDir dir;
  const auto out = dir.path() / "out.json";
  std::string err;
  EXPECT_NE(run_cli({"infer", (dir.path() / "nope.txt").string(), "--out", out.string()}, nullptr,
                    &err),
            0);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(fs::exists(fs::path(out) += ".tmp"));
  EXPECT_NE(err.find("cannot open"), std::string::npos) << err;
}

TEST(Infer, FlagsOverrideConfigFile) {
  TempDir dir;
  const auto file = dir.path() / "pair.txt";
  write_pair_file(file, linear_pairs(200, 5));
  const auto cfg = dir.path() / "run.cfg";
  std::ofstream(cfg) << "mode=pnl\nnoise=laplace\n";
  std::string from_file, overridden;
  ASSERT_EQ(run_cli({"infer", file.string(), "--config", cfg.string()}, &from_file), 0);
  ASSERT_EQ(run_cli({"infer", "--noise", "uniform", file.string(), "--config", cfg.string()},
                    &overridden),
            0);
  EXPECT_NE(from_file.find("\"noise\": \"laplace\""), std::string::npos);
  EXPECT_NE(overridden.find("\"noise\": \"uniform\""), std::string::npos);
  EXPECT_NE(overridden.find("\"mode\": \"pnl\""), std::string::npos);
}

TEST(Infer, BadFlagValueIsAnError) {
  std::string err;
  EXPECT_NE(run_cli({"infer", "x.txt", "--mode", "lingam"}, nullptr, &err), 0);
  EXPECT_FALSE(err.empty());
  EXPECT_NE(run_cli({}), 0);
}

TEST(Bench, EmptyCorpusIsAnError) {
  TempDir dir;
  const auto meta = dir.path() / "meta.csv";
  std::ofstream(meta) << "file,direction\n";
  EXPECT_NE(run_cli({"bench", "--suite", "tuebingen", "--data-dir", dir.path().string(), "--meta",
                     meta.string()}),
            0);
  EXPECT_THROW(run_tuebingen(RunConfig{}, dir.path(), meta), Error);
}

TEST(Bench, MetaParsing) {
  std::istringstream in("file,direction\npair0001.txt, x->y\n# skip\npair0002.txt,y->x\n");
  const auto m = parse_meta(in);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].file, "pair0001.txt");
  EXPECT_EQ(m[1].truth, Decision::y_to_x);
  std::istringstream bad("pair.txt,maybe\n");
  EXPECT_THROW(parse_meta(bad), ParseError);
}

TEST(Bench, TuebingenOnSmallCorpus) {
  TempDir dir;
  write_pair_file(dir.path() / "a.txt", linear_pairs(300, 1));
  write_pair_file(dir.path() / "b.txt", linear_pairs(300, 2).swapped());
  const auto meta = dir.path() / "meta.csv";
  std::ofstream(meta) << "a.txt,x->y\nb.txt,y->x\n";
  RunConfig c;
  c.noise = NoiseSource::uniform;
  c.seeds = {0, 1, 2};
  const auto r = run_tuebingen(c, dir.path(), meta);
  EXPECT_EQ(r.rows.size(), 6u);
  EXPECT_EQ(r.metrics.at("accuracy_mean"), 1.0);
  EXPECT_EQ(r.metrics.at("accuracy_sd"), 0.0);
  EXPECT_EQ(r.header.back(), "wall_ms");
}

TEST(Bench, SyntheticSuiteShapeAndDeterminism) {
  RunConfig c;
  c.reps = 3;
  c.sizes = {60};
  c.mechanisms = {Mechanism::linear, Mechanism::sine};
  c.noise = NoiseSource::uniform;
  const auto a = run_synthetic(c);
  c.workers = 1;
  const auto b = run_synthetic(c);
  ASSERT_EQ(a.rows.size(), 6u);
  ASSERT_EQ(b.rows.size(), 6u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    // All columns but the trailing wall-clock time are reproducible.
    EXPECT_EQ(std::vector<std::string>(a.rows[i].begin(), a.rows[i].end() - 1),
              std::vector<std::string>(b.rows[i].begin(), b.rows[i].end() - 1));
  }
  EXPECT_EQ(a.metrics.count("accuracy/sine/60"), 1u);
  const auto csv = a.csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "suite,mechanism,n,seed,rep,decision,correct,loss_xy,loss_yx,p_value,config_digest,"
            "wall_ms");
}

TEST(Bench, CsvQuotesFields) {
  BenchReport r;
  r.header = {"a", "b"};
  r.rows = {{"x,y", "say \"hi\""}};
  EXPECT_EQ(r.csv(), "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
}

TEST(Orient, ChainFileRoundTrip) {
  TempDir dir;
  const auto data = dir.path() / "data.txt";
  const auto skel = dir.path() / "skeleton.txt";
  {
    std::ofstream out(data);
    out.precision(17);
    GeneratorSpec g;
    g.mechanism = Mechanism::sine;
    g.n = 300;
    const auto p = generate(g);
    for (std::size_t i = 0; i < p.size(); ++i) out << p.xs()[i] << ' ' << p.ys()[i] << '\n';
  }
  std::ofstream(skel) << "0 1\n";
  std::string out;
  ASSERT_EQ(run_cli({"orient", data.string(), "--skeleton", skel.string(), "--noise", "uniform"},
                    &out),
            0);
  EXPECT_NE(out.find("\"edges\""), std::string::npos);
  EXPECT_NE(out.find("\"orientations\""), std::string::npos);
}
