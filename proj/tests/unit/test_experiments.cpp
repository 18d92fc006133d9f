#include "doctest.h"
#include "vfv/experiments.hpp"
#include "vfv/io.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

using namespace vfv;
namespace fs = std::filesystem;

namespace {
RunConfig small(const std::string& out) {
  RunConfig c;
  c.meshes = {16, 32};
  c.n = 16;
  c.t_end = 0.1;
  c.output_dt = 0.02;
  c.snapshot_dt = 0.05;
  c.out_dir = out.empty() ? "" : (fs::temp_directory_path() / "vfv_exp_tests" / out).string();
  if (!out.empty()) fs::remove_all(c.out_dir);
  return c;
}
}  // namespace

TEST_CASE("output grid") {
  const auto t = output_times(2.0, 0.02);
  CHECK(t.size() == 101);
  CHECK(t.back() == 2.0);
  CHECK(t[50] == doctest::Approx(1.0));
  CHECK(output_times(1.0, 0.3).back() == 1.0);
  CHECK(output_times(1.0, 0.3).size() == 5);
}

TEST_CASE("single run writes its audit trail") {
  const RunConfig c = small("run");
  const RunResult r = cmd_run(c);
  CHECK(r.relative_drift.maxCoeff() < 1e-12);
  CHECK(r.min_entropy_increment >= -1e-10);
  CHECK(r.total_entropy.size() == 6);
  for (const char* f : {"metadata.json", "config.toml", "series.csv", "snap_0000.vfv", "snap_0002.vfv", "snap_0002.pgm"})
    CHECK(fs::exists(fs::path(c.out_dir) / f));
  const Snapshot s = read_snapshot(fs::path(c.out_dir) / "snap_0002.vfv");
  CHECK(s.field.time == 0.1);
  CHECK(s.field.cells == r.final_field.cells);
  // The stored configuration reproduces the run.
  RunConfig again = RunConfig::load(fs::path(c.out_dir) / "config.toml");
  again.out_dir = "";
  CHECK(cmd_run(again).final_field.cells == r.final_field.cells);

  const RunConfig twin = small("run_twin");
  cmd_run(twin);
  auto bytes = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  for (const char* f : {"snap_0001.vfv", "snap_0002.vfv", "series.csv"})
    CHECK(bytes(fs::path(c.out_dir) / f) == bytes(fs::path(twin.out_dir) / f));
}

TEST_CASE("hierarchy outputs and degenerate hierarchy") {
  RunConfig c = small("hier");
  const auto h = cmd_hierarchy(c);
  CHECK(h.rows.size() == 6);
  CHECK(h.rows.back().t == 0.1);
  for (const auto& r : h.rows) {
    CHECK(r.d_e >= -1e-12);
    CHECK(r.d_ent >= -1e-12);
  }
  CHECK(h.cauchy_density.size() == 1);
  const CsvTable d = read_csv(fs::path(c.out_dir) / "defects.csv");
  CHECK(d.header == std::vector<std::string>{"t", "R1", "R2", "R", "E1", "E2", "DE", "S", "DEnt"});
  CHECK(d.rows.size() == 6);
  CHECK(fs::exists(fs::path(c.out_dir) / "distance_N1.csv"));
  CHECK(fs::exists(fs::path(c.out_dir) / "cesaro_final.vfv"));

  c = small("");
  c.meshes = {16, 16};
  for (const auto& r : cmd_hierarchy(c).rows) {
    CHECK(r.r == 0.0);
    CHECK(r.d_e == 0.0);
    CHECK(r.d_ent == 0.0);
  }
  c.meshes = {16};
  CHECK_THROWS_AS(cmd_hierarchy(c), ConfigError);
}

TEST_CASE("concatenation preconditions") {
  RunConfig c = small("");
  c.init = InitKind::uniform;
  c.meshes = {16, 16};
  c.tau = 0.0;
  c.window = 4;
  CHECK_THROWS_AS(cmd_concat(c), PreconditionError);
  c.tau = 0.2;
  CHECK_THROWS_AS(cmd_concat(c), ConfigError);
}

TEST_CASE("short concatenation on KH data") {
  RunConfig c = small("concat");
  c.tau = 0.04;
  c.window = 4;
  const auto r = cmd_concat(c);
  CHECK(r.delta > 0);
  CHECK(r.restart_drift(kDensity) == 0.0);
  CHECK(r.comparison.agree_before);
  CHECK(r.comparison.verdict == DafermosVerdict::a_precedes_b);
  std::ostringstream rep;
  cmd_report(c.out_dir, rep);
  CHECK(rep.str().find("rate_bumped") != std::string::npos);
}

TEST_CASE("consistency study shape") {
  RunConfig c = small("cons");
  c.meshes = {16, 32, 64};
  c.t_end = 0.05;
  const auto r = cmd_consistency(c);
  CHECK(r.rows.size() == 27);
  CHECK(r.e2_decreasing.size() == 9);
  const CsvTable t = read_csv(fs::path(c.out_dir) / "consistency.csv");
  CHECK(t.header == std::vector<std::string>{"h", "phi", "tau1", "tau2", "e2", "e3", "e4"});
  c.meshes = {16, 32};
  CHECK_THROWS_AS(cmd_consistency(c), ConfigError);
}

TEST_CASE("report on an empty directory fails") {
  const fs::path p = fs::temp_directory_path() / "vfv_exp_tests" / "empty";
  fs::create_directories(p);
  std::ostringstream os;
  CHECK_THROWS(cmd_report(p, os));
}
