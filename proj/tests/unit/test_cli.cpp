#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "forge/graph_io.hpp"
#include "forge/ramsey.hpp"
#include "forge_cli/commands.hpp"
#include "forge_cli/config.hpp"

using namespace forge_cli;
namespace fs = std::filesystem;

namespace {

const Schema kSchema = {
    {"n", ValueType::kInt, "5", "size"},
    {"p", ValueType::kRational, "1/2", "density"},
    {"name", ValueType::kString, "", "label"},
    {"desk", ValueType::kBool, "false", "desk"},
};

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "forge");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("forge_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { forge::write_file_atomic(path(name), text); }

  fs::path dir_;
};

const char* kDeskConstants =
    "[level.1]\nell = 3\na = 3\nc = 3\ntheta = 2\nb = 12\n"
    "[level.2]\nt = 8\nr0 = 4\nell = 16\na = 8\nc = 3\ntheta = 3\nb = 20\nr = 3\n";

}  // namespace

TEST(Config, EmptyFileGivesNothing) {
  const ConfigFile f = parse_config("", kSchema);
  EXPECT_TRUE(f.values.empty());
  EXPECT_TRUE(f.levels.empty());
  EXPECT_TRUE(parse_config("# only a comment\n\n", kSchema).values.empty());
}

TEST(Config, ParsesValuesCanonically) {
  const ConfigFile f = parse_config("n = +07  # trailing\np=6/4\nname = \"a # b\"\ndesk = yes\n", kSchema);
  EXPECT_EQ(f.values.at("n"), "7");
  EXPECT_EQ(f.values.at("p"), "3/2");
  EXPECT_EQ(f.values.at("name"), "a # b");
  EXPECT_EQ(f.values.at("desk"), "true");
}

TEST(Config, LevelSections) {
  const ConfigFile f = parse_config("n = 3\n[level.2]\nt = 8\nr0 = 4\n[level.1]\nell = 3\n", kSchema);
  EXPECT_EQ(f.levels.at(2).at("t"), "8");
  EXPECT_EQ(f.levels.at(1).at("ell"), "3");
  EXPECT_EQ(f.values.at("n"), "3");
}

TEST(Config, ErrorsNameKeyAndLine) {
  auto expect_error = [](const std::string& text, const std::string& key, std::size_t line) {
    try {
      parse_config(text, kSchema);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.key(), key) << text;
      EXPECT_EQ(e.line(), line) << text;
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos);
    }
  };
  expect_error("n = 3\np = 1/2\nn = 4x\n", "n", 3);
  expect_error("\n\nbogus = 1\n", "bogus", 3);
  expect_error("p = half\n", "p", 1);
  expect_error("desk = maybe\n", "desk", 1);
  expect_error("n = 1\nn = 2\n", "n", 2);
  expect_error("[level.2]\nnope = 3\n", "nope", 2);
  expect_error("[level.x]\n", "level.x", 1);
  expect_error("[other]\n", "other", 1);
  expect_error("name = \"open\n", "name", 1);
}

TEST(Config, RunConfigRoundTrip) {
  RunConfig c;
  c.subcommand = "pipeline";
  c.values = {{"s", "2"}, {"seed", "9"}};
  c.levels[2]["t"] = "8";
  c.inputs["graph"] = {"g.txt", "abc"};
  const RunConfig back = RunConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.integer("s"), 2);
  EXPECT_THROW(back.integer("missing"), ConfigError);
}

TEST_F(CliDir, FlagOverridesFileValue) {
  write("run.cfg", "a = 3\nb = 12\nc = 3\nell = 3\ntheta = 2\nn = 4\nseed = 1\ndesk = true\n");
  ASSERT_EQ(cli({"generate", "--config", path("run.cfg"), "--out", path("g1.txt")}).code, kExitOk);
  ASSERT_EQ(cli({"generate", "--config", path("run.cfg"), "--n", "5", "--out", path("g2.txt")}).code, kExitOk);
  EXPECT_EQ(forge::read_graph_file(path("g1.txt")).order(), 12);
  EXPECT_EQ(forge::read_graph_file(path("g2.txt")).order(), 15);
  const auto art = nlohmann::json::parse(forge::read_file(path("g2.txt.json")));
  EXPECT_EQ(art["run_config"]["params"]["n"], "5");
  EXPECT_EQ(art["schema"], 1);
}

TEST_F(CliDir, GenerateIsByteIdenticalUnderSeed) {
  const std::vector<std::string> base = {"generate", "--b", "12", "--c", "3", "--ell", "3", "--theta", "2",
                                         "--n",      "5", "--seed", "42", "--desk", "true"};
  auto a = base, b = base;
  a.insert(a.end(), {"--out", path("a.txt")});
  b.insert(b.end(), {"--out", path("b.txt"), "--trace", path("b.json")});
  ASSERT_EQ(cli(a).code, kExitOk);
  ASSERT_EQ(cli(b).code, kExitOk);
  EXPECT_EQ(forge::read_file(path("a.txt")), forge::read_file(path("b.txt")));
  EXPECT_EQ(forge::read_file(path("a.txt.json")), forge::read_file(path("b.json")));
  // Replay from the artifact.
  ASSERT_EQ(cli({"generate", "--replay", path("a.txt.json"), "--out", path("c.txt")}).code, kExitOk);
  EXPECT_EQ(forge::read_file(path("a.txt")), forge::read_file(path("c.txt")));
  EXPECT_EQ(forge::read_file(path("a.txt.json")), forge::read_file(path("c.txt.json")));
  EXPECT_EQ(cli({"verify", path("a.txt.json")}).code, kExitOk);
}

TEST_F(CliDir, MissingSeedIsGeneratedAndPrinted) {
  const CliRun r = cli({"generate", "--b", "12", "--c", "3", "--ell", "3", "--theta", "2", "--n", "4", "--desk", "true",
                       "--out", path("g.txt")});
  ASSERT_EQ(r.code, kExitOk);
  ASSERT_NE(r.err.find("seed = "), std::string::npos);
  const std::string printed = r.err.substr(r.err.find("seed = ") + 7, r.err.find('\n') - 7);
  const auto art = nlohmann::json::parse(forge::read_file(path("g.txt.json")));
  EXPECT_EQ(art["run_config"]["params"]["seed"], printed);
}

TEST_F(CliDir, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"pipeline", "--s", "two", "--n", "4"}).code, kExitUsage);
  EXPECT_EQ(cli({"pipeline", "--n", "4"}).code, kExitUsage);  // --s is required
  const CliRun r = cli({"generate", "--b", "12", "--out", path("x.txt")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("key 'c'"), std::string::npos);
  write("bad.cfg", "n = 4\nseed = -1\n");
  const CliRun bad = cli({"pipeline", "--s", "1", "--config", path("bad.cfg")});
  EXPECT_EQ(bad.code, kExitUsage);
  EXPECT_NE(bad.err.find("line 2"), std::string::npos);
  EXPECT_EQ(cli({"embed-tree", "--tree", path("nope.txt"), "--host", path("nope.txt")}).code, kExitUsage);
}

TEST_F(CliDir, PipelineVerifyAndTamper) {
  write("c.toml", kDeskConstants);
  const CliRun ok = cli({"pipeline", "--s", "2", "--n", "4", "--seed", "1", "--constants", path("c.toml"), "--coloring",
                        "adversary:all-one-color", "--desk", "true", "--out", path("p.json")});
  ASSERT_EQ(ok.code, kExitOk) << ok.err;
  EXPECT_EQ(cli({"verify", path("p.json")}).code, kExitOk);

  ASSERT_EQ(cli({"pipeline", "--replay", path("p.json"), "--out", path("p2.json")}).code, kExitOk);
  EXPECT_EQ(forge::read_file(path("p.json")), forge::read_file(path("p2.json")));

  auto art = nlohmann::json::parse(forge::read_file(path("p.json")));
  auto& colors = art["result"]["chain"]["links"][0]["coloring"]["colors"];
  for (auto& c : colors) c = 1;
  write("t.json", art.dump());
  EXPECT_EQ(cli({"verify", path("t.json")}).code, kExitNegative);

  // The constants file is pinned by hash.
  write("c.toml", std::string(kDeskConstants) + "# edited\n");
  EXPECT_EQ(cli({"verify", path("p.json")}).code, kExitNegative);
}

TEST_F(CliDir, PipelineStageFailureExitsThree) {
  write("c.toml", kDeskConstants);
  const CliRun r = cli({"pipeline", "--s", "2", "--n", "4", "--seed", "1", "--constants", path("c.toml"), "--coloring",
                       "adversary:clique-alternating", "--desk", "true", "--out", path("f.json")});
  EXPECT_EQ(r.code, kExitStage);
  // A failure certificate is still a valid certificate.
  EXPECT_EQ(cli({"verify", path("f.json")}).code, kExitOk);
  const auto art = nlohmann::json::parse(forge::read_file(path("f.json")));
  EXPECT_EQ(art["result"]["outcome"], "failure");
  EXPECT_FALSE(art["result"]["chain"]["links"].back()["trace"].empty());
}

TEST_F(CliDir, PipelineWithColouringFile) {
  write("c.toml", kDeskConstants);
  write("g.txt", "4 3\n0 1\n1 2\n2 3\n");
  // s = 1: the host is G^1{3}; colour it all 0 from a file.
  const forge::Graph g = forge::read_graph_file(path("g.txt"));
  const forge::BlowUp host = forge::level_host(g, 1, 3);
  std::ostringstream col;
  forge::write_coloring(col, host.graph, forge::Coloring{1, std::vector<int>(host.graph.size(), 0)});
  write("col.txt", col.str());
  write("tree.txt", "3 2\n0 1\n1 2\n");
  const CliRun r = cli({"pipeline", "--s", "1", "--n", "3", "--seed", "2", "--constants", path("c.toml"), "--graph",
                       path("g.txt"), "--tree", path("tree.txt"), "--coloring", path("col.txt"), "--desk", "true",
                       "--out", path("p.json")});
  ASSERT_TRUE(r.code == kExitOk || r.code == kExitStage) << r.err;
  EXPECT_EQ(cli({"verify", path("p.json")}).code, kExitOk);
  write("g.txt", "4 2\n0 1\n1 2\n");
  EXPECT_EQ(cli({"verify", path("p.json")}).code, kExitNegative);
}

TEST_F(CliDir, WitnessSubcommandsVerify) {
  write("path.txt", "6 5\n0 1\n1 2\n2 3\n3 4\n4 5\n");
  write("cls.txt", "0 2 4\n1 3 5\n");
  write("tree.txt", "3 2\n0 1\n1 2\n");
  EXPECT_EQ(cli({"transversal", "--graph", path("path.txt"), "--classes", path("cls.txt"), "--target", "6", "--out",
                   path("t.json")})
                .code,
            kExitOk);
  EXPECT_EQ(cli({"verify", path("t.json")}).code, kExitOk);
  EXPECT_EQ(cli({"transversal", "--graph", path("path.txt"), "--classes", path("cls.txt"), "--target", "7", "--out",
                   path("t7.json")})
                .code,
            kExitStage);
  EXPECT_EQ(cli({"embed-tree", "--tree", path("tree.txt"), "--host", path("path.txt"), "--out", path("e.json")}).code,
            kExitOk);
  EXPECT_EQ(cli({"verify", path("e.json")}).code, kExitOk);
  EXPECT_EQ(cli({"power-embed", "--variant", "blowup", "--tree", path("tree.txt"), "--k", "2", "--placement", "seeded",
                   "--seed", "3", "--out", path("b.json")})
                .code,
            kExitOk);
  EXPECT_EQ(cli({"verify", path("b.json")}).code, kExitOk);
  EXPECT_EQ(cli({"power-embed", "--variant", "greedy", "--tree", path("tree.txt"), "--graph", path("path.txt"), "--k",
                   "2", "--out", path("gr.json")})
                .code,
            kExitOk);
  EXPECT_EQ(cli({"verify", path("gr.json")}).code, kExitOk);
  const CliRun d = cli({"decompose", "--graph", path("path.txt"), "--D", "1", "--ell", "2", "--eta", "1/3", "--n", "3",
                     "--desk", "true", "--out", path("d.json")});
  EXPECT_TRUE(d.code == kExitOk || d.code == kExitStage) << d.err;
  EXPECT_EQ(cli({"verify", path("d.json")}).code, kExitOk);
  EXPECT_EQ(cli({"certify", "--graph", path("path.txt"), "--p", "1/3", "--theta", "1", "--out", path("c.json")}).code,
            kExitOk);
  EXPECT_EQ(cli({"verify", path("c.json")}).code, kExitOk);
  // A recorded embedding edited to a non-edge fails.
  auto e = nlohmann::json::parse(forge::read_file(path("e.json")));
  e["result"]["embedding"] = {0, 2, 4};
  write("bad.json", e.dump());
  EXPECT_EQ(cli({"verify", path("bad.json")}).code, kExitNegative);
}
