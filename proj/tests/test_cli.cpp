#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "zoll/lab.hpp"

namespace {

using namespace zoll;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("zoll_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct Run {
  int code;
  std::string out, err;
};

Run lab(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = lab::cli_main(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

std::string config_error(const std::string& text, const std::string& file) {
  try {
    parse_config(text, file);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

// --- config parsing --------------------------------------------------------

TEST(Config, IniSectionsCommentsAndTopLevelKeys) {
  const auto cf = parse_ini("seed = 4  # inline\n; comment\n[simulate]\nK=32\n\n[general]\nthreads = 2\n", "a.ini");
  ASSERT_NE(cf.find(""), nullptr);
  EXPECT_EQ(cf.find("")->entries.at(0).value, "4");
  EXPECT_EQ(cf.find("simulate")->entries.at(0).key, "K");
  EXPECT_EQ(cf.find("general")->entries.at(0).value, "2");
}

TEST(Config, IniErrorsCarryLineAndColumn) {
  EXPECT_EQ(config_error("[simulate\n", "a.ini").rfind("a.ini:1:", 0), 0u);
  EXPECT_NE(config_error("[simulate]\nK 32\n", "a.ini").find("a.ini:2:"), std::string::npos);
  EXPECT_NE(config_error("[simulate]\nK =\n", "a.ini").find("a.ini:2:"), std::string::npos);
  EXPECT_NE(config_error("[s]\nK = 1\nK = 2\n", "a.ini").find("a.ini:3:"), std::string::npos);
  EXPECT_NE(config_error("[s]\n[s]\n", "a.ini").find("a.ini:2:"), std::string::npos);
}

TEST(Config, JsonErrorsCarryLineAndColumn) {
  const auto msg = config_error("{\n  \"simulate\": {\"K\": 32,}\n}", "b.json");
  EXPECT_EQ(msg.rfind("b.json:2:", 0), 0u) << msg;
  const auto cf = parse_config("{\"seed\": 7, \"expsum\": {\"Ns\": [8, 16], \"p\": 6}}", "b.json");
  EXPECT_EQ(cf.find("")->entries.at(0).value, "7");
  EXPECT_EQ(cf.find("expsum")->entries.at(0).value, "8,16");
}

TEST(Config, IntListEllipsis) {
  EXPECT_EQ(parse_int_list("8,16,...,512"), (std::vector<std::int64_t>{8, 16, 32, 64, 128, 256, 512}));
  EXPECT_EQ(parse_int_list("1,2,...,5"), (std::vector<std::int64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(parse_int_list("3,5,...,11"), (std::vector<std::int64_t>{3, 5, 7, 9, 11}));
  EXPECT_EQ(parse_int_list("3,6,...,12"), (std::vector<std::int64_t>{3, 6, 12}));
  EXPECT_EQ(parse_int_list("4, 8"), (std::vector<std::int64_t>{4, 8}));
  EXPECT_THROW(parse_int_list("8,16,...,100"), std::invalid_argument);
  EXPECT_THROW(parse_int_list("8,x"), std::invalid_argument);
}

TEST(Config, ParamSetRejectsUnknownKeysAndBadTypes) {
  ParamSet p({{"K", ParamType::integer, "64", ""}, {"on", ParamType::boolean, "false", ""}});
  EXPECT_THROW(p.set("L", "1", "--set L"), ConfigError);
  EXPECT_THROW(p.set("K", "1.5", "--set K"), ConfigError);
  EXPECT_THROW(p.set("on", "maybe", "x.ini:3:1"), ConfigError);
  p.set("K", "32", "x.ini:2:1");
  EXPECT_EQ(p.integer("K"), 32);
  EXPECT_EQ(p.where("K"), "x.ini:2:1");
  try {
    p.set("L", "1", "x.ini:9:1");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("x.ini:9:1"), std::string::npos);
  }
}

// --- command line ----------------------------------------------------------

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(lab({"--help"}).code, 0);
  EXPECT_EQ(lab({}).code, 1);
  EXPECT_EQ(lab({"nonsense"}).code, 1);
  EXPECT_EQ(lab({"decay", "--no-such-flag"}).code, 1);
}

TEST(Cli, ExitCodesForPassFailAndError) {
  const auto dir = scratch("codes");
  const auto ok = lab({"simulate", "--out", dir.string(), "--set", "T=0.2"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  const auto fail = lab({"simulate", "--out", dir.string(), "--set", "T=0.2", "--set", "energy_tol=1e-20"});
  EXPECT_EQ(fail.code, 2);
  EXPECT_NE(fail.out.find("FAIL"), std::string::npos);
  const auto bad = lab({"simulate", "--out", dir.string(), "--set", "bogus=1"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("bogus"), std::string::npos);
  EXPECT_EQ(lab({"simulate", "--out", dir.string(), "--seed", "x"}).code, 1);
  EXPECT_EQ(lab({"decay", "--out", dir.string(), "--tag", "eq:l2"}).code, 1);
}

TEST(Cli, ConfigFilesAreValidated) {
  const auto dir = scratch("config");
  spit(dir / "ok.ini", "seed = 5\n[simulate]\nT = 0.1\nK = 16\n[decay]\nn0_max = 4\n");
  const auto ok = lab({"simulate", "--config", (dir / "ok.ini").string(), "--out", dir.string()});
  EXPECT_EQ(ok.code, 0) << ok.err;
  const auto manifest = nlohmann::json::parse(slurp(dir / "simulate.manifest.json"));
  EXPECT_EQ(manifest["params"]["seed"], "5");
  EXPECT_EQ(manifest["params"]["K"], "16");

  spit(dir / "section.ini", "[simulate]\nT = 0.1\n[nope]\nx = 1\n");
  const auto sec = lab({"simulate", "--config", (dir / "section.ini").string(), "--out", dir.string()});
  EXPECT_EQ(sec.code, 1);
  EXPECT_NE(sec.err.find("section.ini:3:"), std::string::npos) << sec.err;

  spit(dir / "key.ini", "[simulate]\nT = 0.1\nKK = 3\n");
  const auto key = lab({"simulate", "--config", (dir / "key.ini").string(), "--out", dir.string()});
  EXPECT_EQ(key.code, 1);
  EXPECT_NE(key.err.find("key.ini:3:"), std::string::npos) << key.err;

  // a section for another subcommand is still checked against its own keys
  spit(dir / "other.ini", "[simulate]\nT = 0.1\n[decay]\nK = 3\n");
  EXPECT_EQ(lab({"simulate", "--config", (dir / "other.ini").string(), "--out", dir.string()}).code, 1);

  spit(dir / "bad.json", "{\"simulate\": {\"T\": 0.1,}}");
  const auto js = lab({"simulate", "--config", (dir / "bad.json").string(), "--out", dir.string()});
  EXPECT_EQ(js.code, 1);
  EXPECT_NE(js.err.find("bad.json:1:"), std::string::npos) << js.err;
}

TEST(Cli, OutputsAreDeterministicAcrossRunsAndThreadCounts) {
  const auto a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::vector<std::string> base{"expsum", "--p", "4", "--Ns", "8,16,...,64", "--seed", "9"};
  auto with = [&](const fs::path& d, const std::string& threads) {
    auto args = base;
    args.insert(args.end(), {"--out", d.string(), "--threads", threads});
    return lab(args).code;
  };
  ASSERT_EQ(with(a, "1"), 0);
  ASSERT_EQ(with(b, "1"), 0);
  ASSERT_EQ(with(c, "2"), 0);
  for (const char* f : {"expsum.csv", "expsum.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
  }
}

TEST(Cli, SimulateWritesTrajectoryAndResumes) {
  const auto dir = scratch("resume"), again = scratch("resume_again"), full = scratch("resume_full");
  ASSERT_EQ(lab({"simulate", "--out", dir.string(), "--set", "T=0.3", "--set", "store_every=50"}).code, 0);
  ASSERT_TRUE(fs::exists(dir / "trajectory.ztr"));
  const auto tr = load_trajectory((dir / "trajectory").string());
  EXPECT_EQ(tr.times.size(), 7u);

  ASSERT_EQ(lab({"simulate", "--out", again.string(), "--set", "T=0.5", "--set", "store_every=50", "--set",
                 "resume_from=" + (dir / "trajectory").string(), "--set", "resume_frame=4"})
                .code,
            0);
  ASSERT_EQ(lab({"simulate", "--out", full.string(), "--set", "T=0.5", "--set", "store_every=50"}).code, 0);
  const auto resumed = load_trajectory((again / "trajectory").string());
  const auto straight = load_trajectory((full / "trajectory").string());
  ASSERT_EQ(resumed.states.size(), straight.states.size());
  for (std::size_t f = 0; f < resumed.states.size(); ++f) {
    EXPECT_EQ(resumed.states[f].coeffs, straight.states[f].coeffs) << "frame " << f;
  }
  EXPECT_EQ(resumed.energy, straight.energy);
}

TEST(Cli, ReportSummarizesCoverage) {
  const auto dir = scratch("report");
  ASSERT_EQ(lab({"decay", "--out", dir.string()}).code, 0);
  ASSERT_EQ(lab({"vnorm", "--out", dir.string(), "--set", "paths=20", "--set", "atoms=10"}).code, 0);

  // default requirement is the whole suite, which two subcommands do not cover
  EXPECT_EQ(lab({"report", "--out", dir.string()}).code, 2);
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary["checks"].size(), 3u);

  EXPECT_EQ(lab({"report", "--out", dir.string(), "--set", "require_tags=eq:decay,def:uv,lem:mod_sp"}).code, 0);
  EXPECT_EQ(lab({"report", "--out", dir.string(), "--tag", "eq:decay"}).code, 0);

  ASSERT_EQ(lab({"decay", "--out", dir.string(), "--set", "tol=0"}).code, 2);
  EXPECT_EQ(lab({"report", "--out", dir.string(), "--set", "require_tags=eq:decay"}).code, 2);
}

TEST(Cli, ExpsumExampleInvocation) {
  const auto dir = scratch("expsum");
  const auto r = lab({"expsum", "--p", "6", "--Ns", "8,16,...,512", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "expsum.json"));
  EXPECT_EQ(j["rows"].size(), 7u);
  EXPECT_TRUE(fs::exists(dir / "expsum.csv"));
  EXPECT_TRUE(fs::exists(dir / "expsum.manifest.json"));
}

}  // namespace
