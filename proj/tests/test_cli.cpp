#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "framelab_cli.hpp"

using namespace framelab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  const auto r = run(std::move(args));
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("framelab_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(CliFrame, CompleteFour) {
  const json j = run_json({"frame", "--gen", "complete:4"});
  EXPECT_EQ(j["frame"]["dim"], 3);
  EXPECT_EQ(j["frame"]["n"], 4);
  EXPECT_EQ(j["frame"]["construction"], "global_eig");
  EXPECT_LT(j["diagnostics"]["gramian_residual"].get<double>(), 1e-8);
  EXPECT_LT(j["diagnostics"]["frame_operator_offdiagonal"].get<double>(), 1e-8);
}

TEST(CliFrame, EdgesFileBlockwise) {
  const auto p = temp_file("edges.txt", "# two paths\n5\n1 2\n3 4\n4 5\n");
  const json j = run_json({"frame", "--edges", p.string(), "--construction", "blockwise"});
  EXPECT_EQ(j["frame"]["construction"], "block_per_component");
  EXPECT_EQ(j["frame"]["dim"], 3);
  const Frame back = frame_from_json(j["frame"]);
  EXPECT_EQ(back.construction(), Construction::block_per_component);
  EXPECT_EQ(*back.source_graph(), parse_generator_spec("union:path:2,path:3"));
}

TEST(CliFrame, EmptyGraphRejected) {
  const auto r = run({"frame", "--gen", "empty:3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("graph has no edges"), std::string::npos);
}

TEST(CliFrame, SourceErrors) {
  EXPECT_EQ(run({"frame"}).code, 2);
  EXPECT_EQ(run({"frame", "--gen", "path:3", "--edges", "x"}).code, 2);
  EXPECT_EQ(run({"frame", "--edges", "/nonexistent/file"}).code, 2);
  EXPECT_EQ(run({"frame", "--gen", "path:3", "--construction", "spectral"}).code, 2);
  EXPECT_EQ(run({"frame", "--gen", "loop:3"}).code, 2);
  EXPECT_EQ(run({"bogus"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliFrame, CsvAndText) {
  const auto csv = run({"frame", "--gen", "path:3", "--format", "csv"});
  EXPECT_EQ(csv.code, 0);
  EXPECT_EQ(csv.out.rfind("row,phi1,phi2,phi3\n", 0), 0u);
  const auto text = run({"frame", "--gen", "path:3", "--format", "text"});
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("dim = 2"), std::string::npos);
}

TEST(CliAnalyze, PathProfile) {
  const json j = run_json({"analyze", "--gen", "path:4", "--r", "1..3"});
  const auto& p = j["profile"];
  ASSERT_EQ(p.size(), 3u);
  EXPECT_NEAR(p[0]["rho"].get<double>(), 0.75, 1e-9);
  EXPECT_NEAR(p[1]["rho"].get<double>(), 1.0, 1e-8);
  EXPECT_NEAR(p[2]["rho"].get<double>(), 1.0, 1e-8);
  EXPECT_EQ(p[1]["argmax_lambda"].size(), 2u);
  EXPECT_FALSE(j.contains("reports"));
}

TEST(CliAnalyze, FullReportsForK3) {
  const json j = run_json({"analyze", "--gen", "complete:3", "--r", "2", "--full"});
  ASSERT_EQ(j["reports"].size(), 3u);
  for (const auto& rep : j["reports"]) {
    EXPECT_TRUE(rep["match"].get<bool>());
    std::vector<double> re;
    for (const auto& z : rep["spectrum"]) {
      re.push_back(z[0].get<double>());
      EXPECT_NEAR(z[1].get<double>(), 0.0, 1e-12);
    }
    std::sort(re.begin(), re.end());
    ASSERT_EQ(re.size(), 2u);
    EXPECT_NEAR(re[0], 1.0 / 3.0, 1e-7);
    EXPECT_NEAR(re[1], 1.0, 1e-7);
  }
}

TEST(CliAnalyze, OffsetsFileAndAlternate) {
  const json alt = run_json({"analyze", "--gen", "union:path:2,path:2", "--dual", "alternate"});
  EXPECT_EQ(alt["dual"]["kind"], "alternate");
  const auto p = temp_file("offsets.json", framelab::dump(json{{"offsets", alt["dual"]["offsets"]}}));
  const json from_file = run_json({"analyze", "--gen", "union:path:2,path:2", "--dual", p.string()});
  EXPECT_EQ(from_file["dual"]["kind"], "offsets");
  EXPECT_EQ(from_file["profile"], alt["profile"]);
  const json canon = run_json({"analyze", "--gen", "union:path:2,path:2"});
  for (std::size_t i = 0; i < 3; ++i)
    EXPECT_NEAR(alt["profile"][i]["rho"].get<double>(), canon["profile"][i]["rho"].get<double>(), 1e-7);
}

TEST(CliAnalyze, BadOffsetsAreInputErrors) {
  const auto bad_json = temp_file("bad.json", "{not json");
  EXPECT_EQ(run({"analyze", "--gen", "path:3", "--dual", bad_json.string()}).code, 2);
  const auto wrong_dim = temp_file("dim.json", "[[1, 2, 3]]");
  EXPECT_EQ(run({"analyze", "--gen", "path:3", "--dual", wrong_dim.string()}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "path:3", "--dual", "alternate"}).code, 2);
}

TEST(CliAnalyze, RangeValidation) {
  EXPECT_EQ(run({"analyze", "--gen", "path:4", "--r", "0..2"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "path:4", "--r", "1..4"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "path:4", "--r", "3..2"}).code, 2);
  EXPECT_EQ(run({"analyze", "--gen", "path:4", "--r", "two"}).code, 2);
}

TEST(CliAnalyze, ScaleCap) { EXPECT_EQ(run({"analyze", "--gen", "path:17"}).code, 4); }

TEST(CliAnalyze, CsvProfile) {
  const auto r = run({"analyze", "--gen", "path:4", "--format", "csv"});
  EXPECT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "r,rho,argmax");
  EXPECT_EQ(first.rfind("1,0.75", 0), 0u);
}

TEST(CliVerify, Examples) {
  const json a = run_json({"verify", "--gen", "cycle:5", "--theorem", "spectrum"});
  EXPECT_EQ(a["certificates"][0]["status"], "pass");
  EXPECT_TRUE(a["passed"].get<bool>());
  const json b = run_json({"verify", "--gen", "union:path:2,path:2", "--theorem", "nonuniqueness"});
  EXPECT_EQ(b["certificates"][0]["status"], "pass");
  const json c = run_json({"verify", "--gen", "path:3", "--theorem", "uniqueness", "--trials", "50", "--seed", "7"});
  EXPECT_EQ(c["certificates"][0]["status"], "pass");
}

TEST(CliVerify, AllChecks) {
  const json j = run_json({"verify", "--gen", "star:5"});
  EXPECT_EQ(j["certificates"].size(), theorem_ids().size());
  for (const auto& c : j["certificates"]) EXPECT_NE(c["status"], "fail") << c["theorem"];
}

TEST(CliVerify, UnknownCheckId) { EXPECT_EQ(run({"verify", "--gen", "path:3", "--theorem", "nope"}).code, 2); }

TEST(CliSearch, StarCanonicalUnique) {
  const json j = run_json({"search", "--gen", "star:4", "--r", "2", "--samples", "200", "--seed", "1"});
  EXPECT_TRUE(j["canonical_optimal"].get<bool>());
  EXPECT_TRUE(j["canonical_unique"].get<bool>());
}

TEST(CliSearch, DisconnectedTies) {
  const json j = run_json({"search", "--gen", "union:complete:3,path:2", "--r", "3", "--samples", "200"});
  EXPECT_GE(j["optimal"].size(), 2u);
  EXPECT_TRUE(j["canonical_optimal"].get<bool>());
}

TEST(CliSearch, BaselineAndCap) {
  const json j = run_json({"search", "--gen", "path:4", "--samples", "0"});
  EXPECT_EQ(j["candidates"], 1);
  EXPECT_EQ(run({"search", "--gen", "path:13"}).code, 4);
}

TEST(CliCorpus, RestrictedPasses) {
  const auto r = run({"corpus", "--max-n", "5", "--format", "csv"});
  EXPECT_EQ(r.code, 0) << r.out;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "graph,theorem,status,residuals");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.find(",fail,"), std::string::npos) << line;
  }
  EXPECT_EQ(rows % theorem_ids().size(), 0u);
}

TEST(CliDeterminism, IdenticalRunsAreByteIdentical) {
  const std::vector<std::string> args{"search", "--gen", "union:path:2,path:3", "--samples", "30", "--seed", "4"};
  EXPECT_EQ(run(args).out, run(args).out);
  const std::vector<std::string> corpus{"corpus", "--max-n", "4", "--seed", "3"};
  EXPECT_EQ(run(corpus).out, run(corpus).out);
}

TEST(CliEnvironment, BadThreadCount) {
  setenv("FRAMELAB_THREADS", "zero", 1);
  EXPECT_EQ(run({"frame", "--gen", "path:3"}).code, 2);
  setenv("FRAMELAB_THREADS", "0", 1);
  EXPECT_EQ(run({"frame", "--gen", "path:3"}).code, 2);
  setenv("FRAMELAB_THREADS", "2", 1);
  EXPECT_EQ(run({"frame", "--gen", "path:3"}).code, 0);
  unsetenv("FRAMELAB_THREADS");
}

TEST(CliBinary, ExitCodeFromProcess) {
  const std::string cmd = std::string(FRAMELAB_CLI_PATH) + " frame --gen empty:3 2>/dev/null >/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_NE(status, -1);
  EXPECT_EQ(WEXITSTATUS(status), 2);
}
