#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

#include "ratcert/cli.hpp"
#include "ratcert/errors.hpp"

using namespace ratcert;
using namespace ratcert::cli;

namespace {

nlohmann::json without_time(nlohmann::json j) {
  j.erase("wallSeconds");
  j.erase("elapsedSeconds");
  return j;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ratcert-cli-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Cli, Search) {
  SearchArgs args;
  args.d = 30;
  const auto r = cmd_search(args);
  EXPECT_EQ(r.exit_code, kExitOk);
  ASSERT_TRUE(r.report.is_array());
  ASSERT_FALSE(r.report.empty());
  EXPECT_EQ(r.report[0]["e"], 27);
  EXPECT_EQ(r.report[0]["components"], nlohmann::json({22}));

  for (int d : {1, 54}) {
    args.d = d;
    const auto none = cmd_search(args);
    EXPECT_TRUE(none.report.empty()) << d;
  }
}

TEST(Cli, CheckDoubleBundle) {
  CheckDbArgs args;
  args.d = 30;
  const auto a = cmd_check_db(args);
  EXPECT_EQ(a.exit_code, kExitOk);
  EXPECT_EQ(a.report["status"], "PASS");
  EXPECT_EQ(a.report["rankA"], 405);
  EXPECT_EQ(a.report["kernelDim"], 1);
  const auto b = cmd_check_db(args);
  EXPECT_EQ(without_time(a.report), without_time(b.report));

  args.d = 48;
  const auto none = cmd_check_db(args);
  EXPECT_EQ(none.exit_code, kExitInconclusive);
  EXPECT_EQ(none.report["status"], "NO_CANDIDATE");

  CheckDbArgs bad;
  bad.d = 30;
  bad.e = 27;
  bad.components = std::vector<int>{21};
  try {
    cmd_check_db(bad);
    FAIL() << "expected InvalidInput";
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), kExitInvalidInput);
  }
}

TEST(Cli, CheckCovariant) {
  CheckCovArgs args;
  args.d = 19;
  const auto r = cmd_check_cov(args);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["status"], "PASS");
  EXPECT_EQ(r.report["rank"], 15);

  args.d = 20;
  try {
    cmd_check_cov(args);
    FAIL() << "expected InvalidInput";
  } catch (const std::exception& e) {
    EXPECT_EQ(exit_code_for(e), kExitInvalidInput);
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(exit_code_for(InvalidInput("x")), kExitInvalidInput);
  EXPECT_EQ(exit_code_for(ResourceError("x", 1)), kExitResource);
  EXPECT_EQ(exit_code_for(BadPrime("x")), kExitInvalidInput);
  EXPECT_EQ(exit_code_for(CorruptCheckpoint("x", 0)), kExitInvalidInput);
  EXPECT_EQ(exit_code_for(InternalError("x")), kExitInternal);
  EXPECT_EQ(exit_code_for(std::runtime_error("x")), kExitInternal);
}

TEST(Cli, Table) {
  TableArgs args;
  args.to = 12;
  const auto r = cmd_table(args);
  EXPECT_EQ(r.exit_code, kExitOk);
  const auto& rows = r.report["rows"];
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[5]["status"], "unknown");
  EXPECT_TRUE(rows[5]["method"].is_null());
  EXPECT_EQ(rows[9]["status"], "rational");
  EXPECT_EQ(rows[9]["method"], "double-bundle");
  EXPECT_EQ(r.report["unknown"], nlohmann::json({6, 7, 8, 11, 12}));
  EXPECT_NE(r.text.find("unknown: 6, 7, 8, 11, 12"), std::string::npos);

  const auto dir = scratch_dir("table");
  args.from = 10;
  args.to = 10;
  args.verify = true;
  args.report_dir = dir;
  const auto v = cmd_table(args);
  EXPECT_EQ(v.exit_code, kExitOk);
  EXPECT_EQ(v.report["verified"][0]["report"]["status"], "PASS");
  EXPECT_TRUE(std::filesystem::exists(dir / "d10.json"));
  EXPECT_EQ(v.report["rows"][0]["certificate"], (dir / "d10.json").string());
  std::filesystem::remove_all(dir);
}

TEST(Cli, Chi) {
  ChiArgs args;
  args.e = 1;
  args.f = 1;
  args.components = {1};
  const auto r = cmd_chi(args);
  EXPECT_EQ(r.exit_code, kExitOk);
  EXPECT_EQ(r.report["e"], 1);

  args.cache = std::filesystem::temp_directory_path() / "never-written.chit";
  EXPECT_THROW(cmd_chi(args), InvalidInput);
}

TEST(Cli, RankStopAndResume) {
  const auto dir = scratch_dir("rank");
  RankArgs args;
  args.n = 300;
  args.panel_width = 64;
  const auto full = cmd_rank(args);
  EXPECT_EQ(full.report["status"], "DONE");
  EXPECT_EQ(full.report["resumed"], false);

  args.checkpoint_dir = dir;
  args.stop_after = 2;
  const auto stopped = cmd_rank(args);
  EXPECT_EQ(stopped.report["status"], "STOPPED");
  EXPECT_EQ(stopped.report["panels"], 2);

  args.stop_after.reset();
  args.resume = true;
  const auto resumed = cmd_rank(args);
  EXPECT_EQ(resumed.report["status"], "DONE");
  EXPECT_EQ(resumed.report["resumed"], true);
  EXPECT_EQ(resumed.report["rank"], full.report["rank"]);

  RankArgs orphan;
  orphan.n = 10;
  orphan.resume = true;
  EXPECT_THROW(cmd_rank(orphan), InvalidInput);
  std::filesystem::remove_all(dir);
}
