#include "doctest.h"
#include "oracles.hpp"
#include "vfv/io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace vfv;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vfv_io_tests";
  fs::create_directories(dir);
  return dir / name;
}
}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
  std::mt19937_64 rng(13);
  auto f = oracle::random_field(Mesh(8), rng);
  f.time = 0.1 + 0.2;  // not representable in short decimal form
  const fs::path p = scratch("a.vfv");
  write_snapshot(p, f, 1.4);
  const Snapshot s = read_snapshot(p);
  CHECK(s.field.cells == f.cells);
  CHECK(s.field.time == f.time);
  CHECK(s.gamma == 1.4);
  CHECK(s.field.mesh.n() == 8);
  CHECK(fs::file_size(p) == std::string("VFV1 n=8 t=0.30000000000000004 gamma=1.3999999999999999\n").size() + 4 * 64 * 8);
}

TEST_CASE("snapshot layout is planar little-endian") {
  ConservativeField<double> f(Mesh(4), 0.0);
  f.cells(kMomentumX, 1) = 1.0;  // plane 1, cell (1, 0)
  std::stringstream ss;
  write_snapshot(ss, f, 1.4);
  const std::string s = ss.str();
  const std::size_t header = s.find('\n') + 1;
  CHECK(s.substr(0, header) == "VFV1 n=4 t=0 gamma=1.3999999999999999\n");
  const std::size_t at = header + (16 + 1) * 8;
  double v;
  std::memcpy(&v, s.data() + at, 8);  // host is little-endian in this test environment
  CHECK(v == 1.0);
}

TEST_CASE("malformed snapshots name the byte offset") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    std::stringstream ss(text);
    try {
      read_snapshot(ss);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_error("VFV2 n=4 t=0 gamma=1.4\n", "at byte 0");
  expect_error("VFV1 m=4 t=0 gamma=1.4\n", "at byte 5");
  expect_error("VFV1 n=4 t=zero gamma=1.4\n", "byte");
  expect_error("VFV1 n=6 t=0 gamma=1.4\n", "power of two");
  expect_error("VFV1 n=4 t=0 gamma=1.4\n" + std::string(100, '\0'), "truncated");
  expect_error("", "missing header");
}

TEST_CASE("PGM quicklook") {
  ConservativeField<double> f(Mesh(4), 0.0);
  f.cells(kDensity, f.mesh.index(0, 3)) = 2.0;  // top-left cell of the domain
  const fs::path p = scratch("a.pgm");
  write_pgm(p, f);
  std::ifstream is(p, std::ios::binary);
  std::string magic;
  int w, h, maxv;
  is >> magic >> w >> h >> maxv;
  is.get();
  CHECK(magic == "P5");
  CHECK(w == 4);
  CHECK(maxv == 65535);
  unsigned char px[2];
  is.read(reinterpret_cast<char*>(px), 2);
  CHECK(px[0] == 0xFF);
  CHECK(px[1] == 0xFF);
}

TEST_CASE("CSV write and read") {
  const fs::path p = scratch("a.csv");
  {
    CsvWriter w(p, {"t", "x"});
    w.row(std::vector<double>{0.1, 1.0 / 3});
    CHECK_THROWS(w.row(std::vector<double>{1.0}));
  }
  const CsvTable t = read_csv(p);
  REQUIRE(t.rows.size() == 1);
  CHECK(std::stod(t.rows[0][t.column("x")]) == 1.0 / 3);
  CHECK_THROWS_AS(t.column("y"), FormatError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
