// Snapshot files, density quicklooks and CSV helpers.
#pragma once

#include "vfv/grid.hpp"

#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfv {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  ConservativeField<double> field;
  double gamma = 1.4;
};

/// VFV1 layout: the text line `VFV1 n=<n> t=<time> gamma=<g>` and '\n',
/// then four planes (rho, m_x, m_y, E) of n*n little-endian float64 values,
/// each plane row-major with x fastest.
void write_snapshot(const std::filesystem::path& path, const ConservativeField<double>& f, double gamma);
void write_snapshot(std::ostream& os, const ConservativeField<double>& f, double gamma);
Snapshot read_snapshot(const std::filesystem::path& path, Boundary bc = Boundary::periodic);
Snapshot read_snapshot(std::istream& is, Boundary bc = Boundary::periodic);

/// Binary 16-bit PGM (P5, big-endian samples) of one component, scaled
/// linearly from its min to max; the top image row is the top of the domain.
void write_pgm(const std::filesystem::path& path, const ConservativeField<double>& f, int component = kDensity);

/// Decimal text with 17 significant digits (round-trips any double).
std::string format_double(double v);

/// CSV writer with a fixed header; rows must match its width.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);
  void row(const std::vector<double>& values);

 private:
  std::ofstream os_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace vfv
