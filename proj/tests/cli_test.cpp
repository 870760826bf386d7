#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "torsionlab/cli.hpp"

using torsionlab::run_cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string scene(const std::string& name) { return std::string(TORSIONLAB_SCENES) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& text) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(Cli, PolytopeGeneratorsForMomentCurve) {
  auto r = run({"polytope", "--scene", scene("moment2.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["generators"], nlohmann::json::parse("[[2,2]]"));
  EXPECT_EQ(j["weights"][0]["p"], nlohmann::json::parse(R"(["3/2","3/2"])"));
}

TEST(Cli, MissingFileIsValidationError) {
  auto r = run({"torsion", "--scene", "/no/such/scene.json"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(Cli, VerifyIsByteIdenticalAcrossRuns) {
  std::vector<std::string> args{"verify", "rwt", "--scene", scene("moment2.json"), "--seed", "1", "--samples", "20000"};
  auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  auto j = nlohmann::json::parse(a.out);
  for (const char* k : {"estimate", "stderr", "ratio", "seed", "samples", "verdict"}) EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_NEAR(j["estimate"].get<double>(), 5.0 / 12, 0.01);
}

TEST(Cli, SyntaxErrorsCarryLineAndColumn) {
  auto path = temp_file("broken.json", "{\n  \"moment\": 2,\n  \"beta\": [0 1]\n}\n");
  auto r = run({"torsion", "--scene", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("broken.json:3:"), std::string::npos) << r.err;
}

TEST(Cli, SchemaErrorsCarryPointer) {
  auto path = temp_file("bad_center.json", R"({"moment": 2, "ball": {"center": [0, "1/2", 0.5]}})");
  auto r = run({"ccball", "--scene", path});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("/ball/center/2"), std::string::npos) << r.err;
  auto two = temp_file("two_kinds.json", R"({"moment": 2, "planar_power": 2})");
  EXPECT_EQ(run({"fields", "--scene", two}).code, 2);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"torsion"}).code, 2);
  EXPECT_EQ(run({"verify", "nonsense", "--scene", scene("moment2.json")}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ProjectionFilesMatchScene) {
  auto p1 = temp_file("p1.json", R"({"components": ["x1", "x2"]})");
  auto p2 = temp_file("p2.json", R"({"components": ["x1 - x3", "x2 - x3^2"]})");
  auto a = run({"torsion", "--pi1", p1, "--pi2", p2, "--beta", "0,1,0"});
  ASSERT_EQ(a.code, 0) << a.err;
  auto b = run({"torsion", "--scene", scene("moment2.json")});
  auto ja = nlohmann::json::parse(a.out), jb = nlohmann::json::parse(b.out);
  EXPECT_EQ(ja["b"], jb["b"]);
  EXPECT_EQ(ja["J"]["terms"], jb["J"]["terms"]);
  EXPECT_EQ(ja["rho_exponent"], "1/3");
}

TEST(Cli, OutFlagWritesFile) {
  std::string path = ::testing::TempDir() + "fields_out.json";
  std::remove(path.c_str());
  auto r = run({"fields", "--scene", scene("moment2.json"), "--out", path});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["step"], 2);
}

TEST(Cli, DoublingAndMalcev) {
  auto d = run({"ccball", "--scene", scene("moment2.json"), "--check", "doubling", "--samples", "500"});
  ASSERT_EQ(d.code, 0) << d.err;
  EXPECT_EQ(nlohmann::json::parse(d.out)["doubling"]["verdict"], "pass");
  auto m = run({"malcev", "--scene", scene("moment2.json"), "--x0", "0,0,0"});
  ASSERT_EQ(m.code, 0) << m.err;
  auto j = nlohmann::json::parse(m.out);
  EXPECT_EQ(j["dim"], 3);
  EXPECT_EQ(j["step"], 2);
}

TEST(Cli, PolyalgFlags) {
  auto r = run({"polyalg", "refine", "--set", "[[0,0.001],[0.999,1]]", "--N", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["completed"].get<bool>());
  auto t = temp_file("two.json", R"({"op": "two-terms", "coeffs": [1, 0, 3], "k": 0})");
  EXPECT_EQ(run({"polyalg", "--input", t}).code, 0);
  auto bad = temp_file("bad_op.json", R"({"op": "integrate"})");
  auto b = run({"polyalg", "--input", bad});
  EXPECT_EQ(b.code, 2);
  EXPECT_NE(b.err.find("/op"), std::string::npos);
}
