#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcdp/driver.hpp"

using namespace mcdp::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = MCDP_MODELS_DIR;

QuerySpec query(const std::string& model, std::vector<std::string> assignments) {
  QuerySpec q;
  q.model_path = (kModels / model).string();
  q.assignments = std::move(assignments);
  return q;
}

QuerySpec uav(double endurance) {
  std::ostringstream e;
  e << "endurance=" << endurance << "[hour]";
  return query("uav.mcd", {e.str(), "distance=10[km]"});
}

nlohmann::json parsed(const CommandResult& r) { return nlohmann::json::parse(r.out); }

// Compares with models/expected/<name>; MCDP_UPDATE_EXPECTED=1 rewrites it.
void expect_pinned(const std::string& name, const std::string& actual) {
  const fs::path path = kModels / "expected" / name;
  const char* update = std::getenv("MCDP_UPDATE_EXPECTED");
  if (update && std::string(update) == "1") {
    std::ofstream(path, std::ios::binary) << actual;
    return;
  }
  std::ifstream in(path, std::ios::binary);
  ASSERT_TRUE(in) << "missing " << path << "; run with MCDP_UPDATE_EXPECTED=1";
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), actual) << name;
}

}  // namespace

TEST(CliCheck, GoodAndBad) {
  auto ok = run_check((kModels / "uav.mcd").string());
  EXPECT_EQ(ok.exit_code, kExitFeasible);
  EXPECT_NE(ok.out.find("ok"), std::string::npos);

  auto bad = run_check((kModels / "bad" / "unit_mismatch.mcd").string());
  EXPECT_EQ(bad.exit_code, kExitError);
  EXPECT_NE(bad.err.find("unit_mismatch.mcd:"), std::string::npos) << bad.err;
  EXPECT_NE(bad.err.find("note:"), std::string::npos) << bad.err;

  EXPECT_EQ(run_check("/nonexistent/model.mcd").exit_code, kExitError);
}

TEST(CliFormat, Idempotent) {
  auto once = run_format((kModels / "uav.mcd").string());
  ASSERT_EQ(once.exit_code, 0);
  const fs::path tmp = fs::temp_directory_path() / "mcdp_fmt_roundtrip.mcd";
  std::ofstream(tmp) << once.out;
  auto twice = run_format(tmp.string());
  EXPECT_EQ(once.out, twice.out);
  fs::remove(tmp);
}

TEST(CliSolve, UavVerdicts) {
  auto feasible = run_solve(uav(1));
  EXPECT_EQ(feasible.exit_code, kExitFeasible) << feasible.err;
  auto j = parsed(feasible);
  EXPECT_EQ(j["verdict"], "feasible");
  EXPECT_EQ(j["status"], "ok");
  EXPECT_TRUE(j["lower"]["feasible"].get<bool>());

  EXPECT_EQ(run_solve(uav(2.8)).exit_code, kExitIndeterminate);
  EXPECT_EQ(run_solve(uav(4)).exit_code, kExitInfeasible);
}

TEST(CliSolve, NotConvergedTakesPrecedence) {
  auto q = uav(1);
  q.max_iter = 3;
  auto r = run_solve(q);
  EXPECT_EQ(r.exit_code, kExitNotConverged);
  EXPECT_TRUE(parsed(r)["lower"]["partial"].get<bool>());
  EXPECT_FALSE(r.err.empty());
}

TEST(CliSolve, InputErrors) {
  EXPECT_EQ(run_solve(query("uav.mcd", {"endurance=1[kg]", "distance=10[km]"})).exit_code, kExitError);
  EXPECT_EQ(run_solve(query("uav.mcd", {"endurance=1[hour]"})).exit_code, kExitError);
  EXPECT_EQ(run_solve(query("uav.mcd", {"speed=1[hour]", "distance=10[km]"})).exit_code, kExitError);
  EXPECT_EQ(run_solve(query("uav.mcd", {"endurance=-1[hour]", "distance=10[km]"})).exit_code, kExitError);
  auto q = uav(1);
  q.tolerances = {"nosuch=0.5"};
  EXPECT_EQ(run_solve(q).exit_code, kExitError);
}

TEST(CliSolve, CsvHeader) {
  auto q = uav(1);
  q.format = "csv";
  auto r = run_solve(q);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "query,lower,upper,verdict,iterations_lower,iterations_upper,status");
}

TEST(CliSolve, ChainLoopFiniteQuery) {
  auto r = run_solve(query("chain_loop.mcd", {"f=1"}));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto j = parsed(r);
  EXPECT_EQ(j["lower"]["antichain"], nlohmann::json::array({"2"}));
  EXPECT_EQ(j["lower"]["iterations"], 3);
}

TEST(CliSweep, EnduranceGrid) {
  auto q = uav(0);
  q.assignments = {"distance=10[km]"};
  q.axis = "endurance";
  q.from = "0.5[hour]";
  q.to = "4[hour]";
  q.steps = 8;
  auto r = run_sweep(q);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto rows = parsed(r)["rows"];
  ASSERT_EQ(rows.size(), 8u);
  EXPECT_EQ(rows.front()["verdict"], "feasible");
  EXPECT_EQ(rows.back()["verdict"], "infeasible");
}

TEST(CliSweep, ToleranceRows) {
  auto q = uav(1);
  q.tolerances = {"flight/p_act=8,4,2"};
  q.format = "csv";
  auto r = run_sweep(q);
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::size_t lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 4u);  // header plus one row per step size
  EXPECT_NE(r.out.find("alpha:"), std::string::npos);
}

TEST(CliSweep, MismatchedToleranceLists) {
  auto q = uav(1);
  q.tolerances = {"flight/p_act=8,4", "travel/distance=1,2,3"};
  EXPECT_EQ(run_sweep(q).exit_code, kExitError);
}

TEST(CliDeterminism, ByteIdentical) {
  auto q = uav(2.8);
  q.tolerances = {"flight/p_act=4,1"};
  q.relax_n = {4, 8};
  auto a = run_sweep(q), b = run_sweep(q);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
  EXPECT_EQ(run_solve(uav(1)).out, run_solve(uav(1)).out);
}

TEST(CliPinned, ExpectedOutputs) {
  expect_pinned("uav_solve_1h.json", run_solve(uav(1)).out);
  expect_pinned("uav_solve_2.8h.json", run_solve(uav(2.8)).out);
  expect_pinned("battery_solve_100Wh.json", run_solve(query("battery.mcd", {"energy=100[Wh]"})).out);
  expect_pinned("chain_loop_solve.json", run_solve(query("chain_loop.mcd", {"f=1"})).out);
  auto sweep = uav(0);
  sweep.assignments = {"distance=10[km]"};
  sweep.axis = "endurance";
  sweep.from = "0[hour]";
  sweep.to = "4[hour]";
  sweep.steps = 21;
  sweep.format = "csv";
  expect_pinned("uav_sweep_endurance.csv", run_sweep(sweep).out);
}
