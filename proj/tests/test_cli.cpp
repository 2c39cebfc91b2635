#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "reflector/cli.hpp"
#include "reflector/sphere_grid.hpp"

namespace fs = std::filesystem;
using namespace refl::cli;
using nlohmann::json;

namespace {

const char* kLens = R"({
  "dim": 2,
  "entries": [
    {"axis": [0, 0, 1], "p": 1},
    {"axis": [0, 0, -1], "p": 1}
  ]
}
)";

const char* kSphere = R"({
  "dim": 2,
  "entries": [],
  "default": 2
}
)";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("reflector_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path input(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }

  int job(Command c, const fs::path& in, const std::string& out, int level = 2) {
    JobSpec s;
    s.command = c;
    s.input = in;
    s.output = dir / out;
    s.level = level;
    std::ostringstream o;
    err.str("");
    return run(s, o, err);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static int shell(const std::string& args) {
    const int status = std::system((std::string(REFLECTOR_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  fs::path dir;
  std::ostringstream err;
};

}  // namespace

TEST(CliNames, CommandsRoundTrip) {
  for (Command c : {Command::Build, Command::Closure, Command::Check, Command::Directrix, Command::Trace,
                    Command::Report}) {
    EXPECT_EQ(parse_command(command_name(c)), c);
  }
  EXPECT_FALSE(parse_command("frobnicate").has_value());
}

TEST_F(Cli, BuildWritesArtifacts) {
  ASSERT_EQ(job(Command::Build, input("lens.json", kLens), "b"), kExitOk) << err.str();
  for (const char* f : {"summary.json", "reflector.obj", "focal.json"}) EXPECT_TRUE(fs::exists(dir / "b" / f)) << f;
  const json s = json::parse(slurp(dir / "b" / "summary.json"));
  EXPECT_DOUBLE_EQ(s["rho"]["min"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(s["rho"]["max"].get<double>(), 1.0);
}

TEST_F(Cli, SphereCheckIsValid) {
  ASSERT_EQ(job(Command::Check, input("sphere.json", kSphere), "c", 3), kExitOk) << err.str();
  const json v = json::parse(slurp(dir / "c" / "verdict.json"));
  EXPECT_TRUE(v["valid"].get<bool>());
  EXPECT_NEAR(v["max_relative_gap"].get<double>(), 0.0, 1e-9);
  EXPECT_TRUE(v["witness"].is_null());
}

TEST_F(Cli, SingleParaboloidIsAMathError) {
  const auto in = input("single.json", R"({"dim": 2, "entries": [{"axis": [0, 0, 1], "p": 1}]})");
  EXPECT_EQ(job(Command::Build, in, "o"), kExitMath);
  EXPECT_NE(err.str().find("unbounded-reflector"), std::string::npos);
}

TEST_F(Cli, SchemaErrorsExitWithTwo) {
  const auto bad = input("bad.json", "{\n  \"dim\": 2,\n  \"entries\": [\n    {\"axis\": [0, 0], \"p\": 1}\n  ]\n}\n");
  EXPECT_EQ(job(Command::Build, bad, "o"), kExitSchema);
  EXPECT_NE(err.str().find("line 4"), std::string::npos);
  EXPECT_NE(err.str().find("/entries/0/axis"), std::string::npos);

  EXPECT_EQ(job(Command::Build, dir / "missing.json", "o"), kExitSchema);

  JobSpec s;
  s.command = Command::Build;
  s.input = input("lens.json", kLens);
  s.output = dir / "o";
  s.dim = 1;
  std::ostringstream o;
  EXPECT_EQ(run(s, o, err), kExitSchema);
  EXPECT_NE(err.str().find("/dim"), std::string::npos);
  s.dim.reset();
  s.level = -1;
  EXPECT_EQ(run(s, o, err), kExitSchema);
  s.level = 2;
  s.tol = 0.0;
  EXPECT_EQ(run(s, o, err), kExitSchema);
}

TEST_F(Cli, RoundTripKeepsTheVerdict) {
  const auto inv = input("inv.json", R"({"dim": 2, "entries": [
    {"axis": [0, 0, 1], "p": 1}, {"axis": [0, 0, -1], "p": 1}, {"axis": [1, 0, 0], "p": 5}]})");
  ASSERT_EQ(job(Command::Check, inv, "first"), kExitOk);
  ASSERT_EQ(job(Command::Build, inv, "built"), kExitOk);
  ASSERT_EQ(job(Command::Check, dir / "built" / "focal.json", "second"), kExitOk);
  const std::string a = slurp(dir / "first" / "verdict.json");
  const json va = json::parse(a);
  EXPECT_FALSE(va["valid"].get<bool>());
  const json vb = json::parse(slurp(dir / "second" / "verdict.json"));
  EXPECT_EQ(va["valid"], vb["valid"]);
  EXPECT_EQ(va["max_relative_gap"], vb["max_relative_gap"]);
  EXPECT_EQ(va["witness"], vb["witness"]);
}

TEST_F(Cli, DirectrixOfTheSphere) {
  ASSERT_EQ(job(Command::Directrix, input("sphere.json", kSphere), "d", 3), kExitOk) << err.str();
  const json d = json::parse(slurp(dir / "d" / "directrix.json"));
  const double res = refl::make_grid(2, 3).resolution();
  EXPECT_LE(d["hausdorff"].get<double>(), 5.0 * res * 2.0);
  EXPECT_NEAR(d["support_identity_max"].get<double>(), 0.0, 1e-9);
}

TEST_F(Cli, OtherCommandsSucceed) {
  const auto lens = input("lens.json", kLens);
  EXPECT_EQ(job(Command::Closure, lens, "cl"), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "cl" / "closure.json"));
  EXPECT_TRUE(fs::exists(dir / "cl" / "gaps.csv"));
  EXPECT_EQ(job(Command::Trace, lens, "tr"), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "tr" / "trace.csv"));
  const auto circle = input("circle.json", R"({"dim": 1, "entries": [{"axis": [0, 1], "p": 1}, {"axis": [0, -1], "p": 1}]})");
  EXPECT_EQ(job(Command::Build, circle, "circ", 4), kExitOk) << err.str();
  EXPECT_TRUE(fs::exists(dir / "circ" / "reflector.svg"));
}

TEST_F(Cli, BinaryExitCodes) {
  const auto lens = input("lens.json", kLens);
  const auto single = input("single.json", R"({"dim": 2, "entries": [{"axis": [0, 0, 1], "p": 1}]})");
  const auto bad = input("bad.json", R"({"dim": 2, "entries": [{"axis": [0, 0], "p": 1}]})");
  const std::string out = " --out " + (dir / "o").string() + " --level 2";
  EXPECT_EQ(shell("build --in " + lens.string() + out), 0);
  EXPECT_EQ(shell("build --in " + single.string() + out), 3);
  EXPECT_EQ(shell("build --in " + bad.string() + out), 2);
  EXPECT_EQ(shell("build --in " + lens.string() + out + " --dim 1"), 2);
  EXPECT_EQ(shell("frobnicate --in " + lens.string() + out), 2);
  EXPECT_EQ(shell(""), 2);
  EXPECT_EQ(shell("--help"), 0);
}

TEST_F(Cli, ReportIsDeterministic) {
  const auto lens = input("lens.json", kLens);
  const std::string base = "report --in " + lens.string() + " --level 2 --seed 5 --out ";
  ASSERT_EQ(shell(base + (dir / "r1").string()), 0);
  ASSERT_EQ(shell(base + (dir / "r2").string()), 0);
  const std::string a = slurp(dir / "r1" / "report.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "r2" / "report.json"));
  const json r = json::parse(a);
  EXPECT_EQ(r["passed"], r["total"]);
}
