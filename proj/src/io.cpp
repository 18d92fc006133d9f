#include "vfv/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace vfv {

namespace {

void put_le64(std::ostream& os, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char buf[8];
  for (int k = 0; k < 8; ++k) buf[k] = char((bits >> (8 * k)) & 0xFF);
  os.write(buf, 8);
}

double get_le64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= std::uint64_t(p[k]) << (8 * k);
  return std::bit_cast<double>(bits);
}

[[noreturn]] void bad_header(std::size_t offset, const std::string& what) {
  throw FormatError("malformed VFV1 header at byte " + std::to_string(offset) + ": " + what);
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot(std::ostream& os, const ConservativeField<double>& f, double gamma) {
  os << "VFV1 n=" << f.mesh.n() << " t=" << format_double(f.time) << " gamma=" << format_double(gamma) << '\n';
  for (int comp = 0; comp < 4; ++comp)
    for (Index c = 0; c < f.mesh.cell_count(); ++c) put_le64(os, f.cells(comp, c));
  if (!os) throw std::runtime_error("failed to write snapshot");
}

void write_snapshot(const std::filesystem::path& path, const ConservativeField<double>& f, double gamma) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_snapshot(os, f, gamma);
}

Snapshot read_snapshot(std::istream& is, Boundary bc) {
  std::string line;
  if (!std::getline(is, line)) bad_header(0, "missing header line");
  // Expected tokens: VFV1, n=, t=, gamma=
  std::size_t pos = 0;
  auto expect = [&](const std::string& key) -> std::string {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (line.compare(pos, key.size(), key) != 0) bad_header(pos, "expected '" + key + "'");
    pos += key.size();
    const std::size_t start = pos;
    while (pos < line.size() && line[pos] != ' ') ++pos;
    if (key != "VFV1" && pos == start) bad_header(start, "empty value for '" + key + "'");
    return line.substr(start, pos - start);
  };
  expect("VFV1");
  const std::size_t n_at = pos + 1;
  const std::string n_txt = expect("n=");
  const std::size_t t_at = pos + 1;
  const std::string t_txt = expect("t=");
  const std::size_t g_at = pos + 1;
  const std::string g_txt = expect("gamma=");

  Snapshot snap;
  Index n = 0;
  try {
    std::size_t used = 0;
    n = std::stoll(n_txt, &used);
    if (used != n_txt.size()) bad_header(n_at, "trailing characters in n");
    snap.field.time = std::stod(t_txt, &used);
    if (used != t_txt.size()) bad_header(t_at, "trailing characters in t");
    snap.gamma = std::stod(g_txt, &used);
    if (used != g_txt.size()) bad_header(g_at, "trailing characters in gamma");
  } catch (const std::logic_error&) {
    bad_header(n_at, "non-numeric field");
  }
  try {
    snap.field.mesh = Mesh(n, bc);
  } catch (const std::invalid_argument& e) {
    bad_header(n_at, e.what());
  }
  const std::size_t cells = std::size_t(snap.field.mesh.cell_count());
  std::vector<unsigned char> raw(cells * 4 * 8);
  is.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()));
  if (std::size_t(is.gcount()) != raw.size())
    throw FormatError("truncated VFV1 payload: expected " + std::to_string(raw.size()) + " bytes after byte " +
                      std::to_string(line.size() + 1));
  snap.field.cells.resize(4, Index(cells));
  for (int comp = 0; comp < 4; ++comp)
    for (std::size_t c = 0; c < cells; ++c) snap.field.cells(comp, Index(c)) = get_le64(&raw[(comp * cells + c) * 8]);
  return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path, Boundary bc) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return read_snapshot(is, bc);
}

void write_pgm(const std::filesystem::path& path, const ConservativeField<double>& f, int component) {
  const Index n = f.mesh.n();
  const double lo = f.cells.row(component).minCoeff();
  const double hi = f.cells.row(component).maxCoeff();
  const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << "P5\n" << n << ' ' << n << "\n65535\n";
  for (Index j = n - 1; j >= 0; --j)
    for (Index i = 0; i < n; ++i) {
      const double v = std::clamp((f.cells(component, f.mesh.index(i, j)) - lo) * scale, 0.0, 65535.0);
      const auto s = std::uint16_t(v + 0.5);
      const char bytes[2] = {char(s >> 8), char(s & 0xFF)};
      os.write(bytes, 2);
    }
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : os_(path), columns_(header.size()) {
  if (!os_) throw std::runtime_error("cannot open " + path.string() + " for writing");
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::invalid_argument("CSV row width does not match the header");
  for (std::size_t k = 0; k < cells.size(); ++k) os_ << (k ? "," : "") << cells[k];
  os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  row(cells);
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw FormatError("missing CSV column '" + name + "'");
  return std::size_t(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (std::getline(is, line)) t.header = split(line);
  while (std::getline(is, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

}  // namespace vfv
