// Run configuration and its TOML-syntax file format.
#pragma once

#include "vfv/eos.hpp"
#include "vfv/grid.hpp"
#include "vfv/initdata.hpp"
#include "vfv/scheme.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfv {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed `key = value` pairs of a TOML document, keyed "section.key".
/// Supported values: basic strings, integers, floats, booleans and flat
/// arrays of numbers. Values keep their source text for exact integer reads.
class TomlTable {
 public:
  static TomlTable parse(const std::string& text, const std::string& source = "<string>");
  static TomlTable load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::string string(const std::string& key) const;
  std::vector<double> number_array(const std::string& key) const;
  std::vector<std::string> keys() const;

 private:
  struct Value {
    enum class Kind { string, scalar, array } kind;
    std::string text;                 // unquoted string or scalar token
    std::vector<std::string> items;   // array elements
    int line = 0;
  };
  const Value& get(const std::string& key) const;
  std::map<std::string, Value> values_;
  std::string source_;
};

enum class InitKind { kelvin_helmholtz, uniform };

struct RunConfig {
  GasParams<double> gas;
  SchemeParams<double> scheme;
  Boundary bc = Boundary::periodic;
  InitKind init = InitKind::kelvin_helmholtz;
  Primitive<double> uniform_state{1.0, Vec2<double>(0.5, 0.0), 2.5};
  KhSpec kh;

  Index n = 64;                                // single-mesh `run`
  std::vector<Index> meshes{16, 32, 64, 128};  // hierarchy / consistency
  double t_end = 2.0;
  double output_dt = 0.02;
  double snapshot_dt = 0.02;  // snapshots of `run`, on the output grid by default
  std::string out_dir = "out";
  bool paper_scale = false;

  double tau = 1.0;           // concat restart time
  std::size_t window = 8;     // samples in the right-rate forward difference
  double rate_dt = 1e-3;      // sampling interval after tau

  void validate() const;
  Mesh mesh(Index size) const { return Mesh(size, bc); }
  ConservativeField<double> initial_field(const Mesh& m) const;

  /// Applies the file on top of the defaults; unknown keys are errors.
  static RunConfig from_toml(const TomlTable& t);
  static RunConfig load(const std::filesystem::path& path);
};

std::vector<Index> paper_scale_meshes();

nlohmann::json to_json(const RunConfig& c);
/// TOML text that reproduces `c` exactly, KH coefficients written out.
std::string to_toml(const RunConfig& c);
nlohmann::json to_json(const KhCoefficients& c);

}  // namespace vfv
