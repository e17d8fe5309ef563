#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "birgn/cli/commands.hpp"
#include "birgn/cli/config.hpp"
#include "birgn/field_csv.hpp"
#include "birgn/history_csv.hpp"
#include "birgn/presets.hpp"
#include "birgn/reaction.hpp"

namespace fs = std::filesystem;
using namespace birgn;
using namespace birgn::cli;
using nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "birgn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("birgn_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& s) const { return path_ / s; }

 private:
  fs::path path_;
};

const std::vector<std::string> kSmallRun{"--preset", "reaction1d-paper", "--subdivisions", "20", "--delta", "1e-3"};

std::vector<std::string> with(std::vector<std::string> base, const std::vector<std::string>& extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

}  // namespace

TEST(Config, FlagsOverrideFileOverridesDefaults) {
  const json file = {{"noise", {{"delta", 1e-3}}}, {"stopping", {{"tau", 1.2}}}};
  const json flags = {{"noise", {{"delta", 1e-2}}}};
  std::vector<std::string> violations;
  const RunConfig c = config_from_json(resolve_config(file, flags), violations);
  EXPECT_TRUE(violations.empty());
  EXPECT_EQ(c.delta, 1e-2);
  EXPECT_EQ(c.tau, 1.2);
  EXPECT_EQ(c.rule, 1);
  EXPECT_EQ(c.max_outer, 60);
  EXPECT_EQ(c.alpha0, 1.0);
  EXPECT_EQ(c.ratio, 0.5);
}

TEST(Config, PresetDefaultsApply) {
  std::vector<std::string> violations;
  const RunConfig c = config_from_json(
      resolve_config(json::object(), {{"problem", {{"preset", "diffusion1d-paper"}}}}), violations);
  EXPECT_TRUE(violations.empty());
  EXPECT_EQ(c.penalty, PenaltyKind::SobolevWp);
  EXPECT_EQ(c.preset, "diffusion1d-paper");
}

TEST(Config, UnknownKeysAndTypeErrorsAreReported) {
  std::vector<std::string> violations;
  const json doc = resolve_config({{"noise", {{"delta", "big"}}}, {"bogus", 1}}, json::object());
  config_from_json(doc, violations);
  EXPECT_EQ(violations.size(), 2u);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.preset = "reaction2d-paper";
  c.penalty = PenaltyKind::TVSmoothed;
  c.anchor = 0.25;
  c.inner.max_iter = 77;
  c.inner.precondition = false;
  c.seed = 9;
  std::vector<std::string> violations;
  const RunConfig back = config_from_json(config_to_json(c), violations);
  EXPECT_TRUE(violations.empty());
  EXPECT_EQ(config_to_json(back), config_to_json(c));
}

TEST(Config, ValidationReportsEveryViolation) {
  RunConfig c;
  c.preset = "reaction1d-paper";
  c.tau = 0.9;
  c.ratio = 1.5;
  c.rule = 7;
  c.lambda = -1;
  EXPECT_EQ(validate(c).size(), 4u);
  c = RunConfig{};
  c.preset = "reaction1d-paper";
  EXPECT_TRUE(validate(c).empty());
  c.preset = "nope";
  EXPECT_EQ(validate(c).size(), 1u);
}

TEST(Cli, ConfigErrorsExitWithOneAndOneLineEach) {
  TempDir dir;
  const auto r = invoke(with({"run"}, with(kSmallRun, {"--tau", "0.5", "--rule", "9", "--out", (dir / "o").string()})));
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 2) << r.err;
  EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST(Cli, SuccessfulRunWritesArtifacts) {
  TempDir dir;
  const auto r = invoke(with({"run"}, with(kSmallRun, {"--out", (dir / "o").string()})));
  EXPECT_EQ(r.code, 0) << r.err;
  for (const char* f : {"history.csv", "reconstruction.csv", "meta.json", "plot.svg"}) {
    EXPECT_TRUE(fs::exists(dir / "o" / f)) << f;
  }
  const auto history = read_history_csv((dir / "o" / "history.csv").string());
  const Field rec = read_field_csv((dir / "o" / "reconstruction.csv").string());
  EXPECT_EQ(rec.size(), 21u);
  const json meta = json::parse(slurp(dir / "o" / "meta.json"));
  EXPECT_EQ(meta["result"]["stop_reason"], "rule-satisfied");
  EXPECT_EQ(meta["result"]["stop_index"].get<int>() + 1, static_cast<int>(history.size()));
  EXPECT_LE(history.back().residual_norm, 1.05e-3);
  EXPECT_NE(slurp(dir / "o" / "plot.svg").find("<svg"), std::string::npos);
}

TEST(Cli, MaxOuterExitsWithTwo) {
  TempDir dir;
  const auto r = invoke(with({"run"}, with(kSmallRun, {"--max-outer", "1", "--out", (dir / "o").string()})));
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(fs::exists(dir / "o" / "history.csv"));
}

TEST(Cli, MetaReplayIsByteIdentical) {
  TempDir dir;
  const auto first = invoke(with({"run"}, with(kSmallRun, {"--penalty", "tv", "--out", (dir / "a").string()})));
  ASSERT_EQ(first.code, 0) << first.err;
  const auto replay = invoke({"run", "--config", (dir / "a" / "meta.json").string(), "--out", (dir / "b").string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(slurp(dir / "a" / "history.csv"), slurp(dir / "b" / "history.csv"));
  EXPECT_EQ(slurp(dir / "a" / "reconstruction.csv"), slurp(dir / "b" / "reconstruction.csv"));
}

TEST(Cli, InnerOverridesAreApplied) {
  TempDir dir;
  const auto r = invoke(with({"run"}, with(kSmallRun, {"--inner", "max_iter=3", "--inner", "precondition=false",
                                                       "--out", (dir / "o").string()})));
  ASSERT_NE(r.code, 1) << r.err;
  const json meta = json::parse(slurp(dir / "o" / "meta.json"));
  EXPECT_EQ(meta["config"]["inner"]["max_iter"], 3);
  EXPECT_EQ(meta["config"]["inner"]["precondition"], false);
  EXPECT_EQ(invoke(with({"run"}, with(kSmallRun, {"--inner", "nonsense=1"}))).code, 1);
}

TEST(Cli, SingleDeltaSweepMatchesRun) {
  TempDir dir;
  const auto run = invoke(with({"run"}, with(kSmallRun, {"--seed", "3", "--rule", "3", "--out", (dir / "r").string()})));
  ASSERT_EQ(run.code, 0) << run.err;
  const auto sweep = invoke({"sweep", "--preset", "reaction1d-paper", "--subdivisions", "20", "--seed", "3", "--rule",
                             "3", "--deltas", "1e-3", "--out", (dir / "s").string()});
  ASSERT_EQ(sweep.code, 0) << sweep.err;
  EXPECT_EQ(slurp(dir / "r" / "history.csv"), slurp(dir / "s" / "run_0" / "history.csv"));
  const std::string csv = slurp(dir / "s" / "sweep.csv");
  EXPECT_EQ(csv.rfind("delta,seed,n1,n2,n3,error,stop_reason\n", 0), 0u);
  EXPECT_NE(csv.find(",3,"), std::string::npos);
}

TEST(Cli, SweepWithSeveralJobsIsOrderIndependent) {
  TempDir dir;
  const std::vector<std::string> common{"sweep", "--preset", "reaction1d-paper", "--subdivisions", "20",
                                        "--rule", "3", "--deltas", "1e-2,1e-3", "--seeds", "2"};
  ASSERT_EQ(invoke(with(common, {"--jobs", "1", "--out", (dir / "a").string()})).code, 0);
  ASSERT_EQ(invoke(with(common, {"--jobs", "3", "--out", (dir / "b").string()})).code, 0);
  EXPECT_EQ(slurp(dir / "a" / "sweep.csv"), slurp(dir / "b" / "sweep.csv"));
  EXPECT_EQ(invoke(with(common, {"--deltas", "1e-3,1e-2"})).code, 1);
}

TEST(Cli, VerifySuites) {
  EXPECT_EQ(invoke({"verify", "penalties"}).code, 0);
  const auto bad = invoke({"verify", "nonsense"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("unknown verify suite"), std::string::npos);
  EXPECT_EQ(invoke({"verify", "rates", "--rule", "1"}).code, 1);
}

TEST(Cli, HelpAndParseErrors) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
  EXPECT_EQ(invoke({"run", "--delta", "abc"}).code, 1);
  EXPECT_EQ(invoke({"frobnicate"}).code, 1);
}

TEST(Cli, CustomProblemFromCsvMatchesPreset) {
  TempDir dir;
  const Problem p = make_preset("reaction1d-paper", 20);
  const auto& op = dynamic_cast<const Reaction1D&>(*p.op);
  Field boundary(p.truth.grid());
  boundary[0] = op.left();
  boundary[boundary.size() - 1] = op.right();
  write_field_csv((dir / "source.csv").string(), op.source());
  write_field_csv((dir / "boundary.csv").string(), boundary);
  write_field_csv((dir / "truth.csv").string(), p.truth);
  const json cfg = {{"problem",
                     {{"custom",
                       {{"operator", "reaction1d"},
                        {"source", (dir / "source.csv").string()},
                        {"boundary", (dir / "boundary.csv").string()},
                        {"truth", (dir / "truth.csv").string()}}}}},
                    {"noise", {{"delta", 1e-3}}}};
  std::ofstream(dir / "custom.json") << cfg.dump(2);

  const auto custom = invoke({"run", "--config", (dir / "custom.json").string(), "--out", (dir / "c").string()});
  ASSERT_EQ(custom.code, 0) << custom.err;
  const auto preset = invoke(with({"run"}, with(kSmallRun, {"--out", (dir / "p").string()})));
  ASSERT_EQ(preset.code, 0) << preset.err;
  EXPECT_EQ(slurp(dir / "c" / "history.csv"), slurp(dir / "p" / "history.csv"));

  // Replaying the custom run's meta.json reproduces it.
  const auto replay = invoke({"run", "--config", (dir / "c" / "meta.json").string(), "--out", (dir / "d").string()});
  ASSERT_EQ(replay.code, 0) << replay.err;
  EXPECT_EQ(slurp(dir / "c" / "history.csv"), slurp(dir / "d" / "history.csv"));
}
