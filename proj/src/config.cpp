#include "vfv/config.hpp"

#include "vfv/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace vfv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string clean_number(std::string t) {
  t.erase(std::remove(t.begin(), t.end(), '_'), t.end());
  return t;
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text, const std::string& source) {
  TomlTable table;
  table.source_ = source;
  std::istringstream is(text);
  std::string raw, section;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ConfigError(source + ":" + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string rhs = trim(line.substr(eq + 1));
    if (key.empty() || rhs.empty()) fail("empty key or value");
    Value v;
    v.line = lineno;
    if (rhs.front() == '"') {
      if (rhs.size() < 2 || rhs.back() != '"') fail("unterminated string");
      v.kind = Value::Kind::string;
      v.text = rhs.substr(1, rhs.size() - 2);
    } else if (rhs.front() == '[') {
      if (rhs.back() != ']') fail("arrays must be written on one line");
      v.kind = Value::Kind::array;
      std::stringstream items(rhs.substr(1, rhs.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (!item.empty()) v.items.push_back(item);
      }
    } else {
      v.kind = Value::Kind::scalar;
      v.text = rhs;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (!table.values_.emplace(full, v).second) fail("duplicate key '" + full + "'");
  }
  return table;
}

TomlTable TomlTable::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str(), path.string());
}

const TomlTable::Value& TomlTable::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(source_ + ": missing key '" + key + "'");
  return it->second;
}

double TomlTable::number(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::scalar) throw ConfigError(source_ + ": '" + key + "' is not a number");
  const std::string t = clean_number(v.text);
  try {
    std::size_t used = 0;
    const double d = std::stod(t, &used);
    if (used == t.size()) return d;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(source_ + ":" + std::to_string(v.line) + ": '" + key + "' is not a number");
}

std::int64_t TomlTable::integer(const std::string& key) const {
  const Value& v = get(key);
  const std::string t = clean_number(v.text);
  std::int64_t out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (v.kind != Value::Kind::scalar || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(source_ + ":" + std::to_string(v.line) + ": '" + key + "' is not an integer");
  return out;
}

std::uint64_t TomlTable::unsigned_integer(const std::string& key) const {
  const Value& v = get(key);
  const std::string t = clean_number(v.text);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (v.kind != Value::Kind::scalar || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError(source_ + ":" + std::to_string(v.line) + ": '" + key + "' is not an unsigned integer");
  return out;
}

bool TomlTable::boolean(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind == Value::Kind::scalar && v.text == "true") return true;
  if (v.kind == Value::Kind::scalar && v.text == "false") return false;
  throw ConfigError(source_ + ":" + std::to_string(v.line) + ": '" + key + "' is not a boolean");
}

std::string TomlTable::string(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::string) throw ConfigError(source_ + ": '" + key + "' is not a string");
  return v.text;
}

std::vector<double> TomlTable::number_array(const std::string& key) const {
  const Value& v = get(key);
  if (v.kind != Value::Kind::array) throw ConfigError(source_ + ": '" + key + "' is not an array");
  std::vector<double> out;
  for (const auto& item : v.items) {
    try {
      std::size_t used = 0;
      const std::string t = clean_number(item);
      out.push_back(std::stod(t, &used));
      if (used != t.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ConfigError(source_ + ":" + std::to_string(v.line) + ": bad array element '" + item + "' in " + key);
    }
  }
  return out;
}

std::vector<std::string> TomlTable::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_) out.push_back(k);
  return out;
}

void RunConfig::validate() const {
  try {
    gas.validate();
    scheme.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(t_end > 0)) throw ConfigError("t_end must be positive");
  if (!(output_dt > 0)) throw ConfigError("output_dt must be positive");
  if (!(snapshot_dt > 0)) throw ConfigError("snapshot_dt must be positive");
  if (!(rate_dt > 0)) throw ConfigError("rate_dt must be positive");
  if (window == 0) throw ConfigError("window must be positive");
  auto check_mesh = [](Index m) {
    if (m < 4 || (m & (m - 1)) != 0) throw ConfigError("mesh size " + std::to_string(m) + " is not a power of two >= 4");
  };
  check_mesh(n);
  if (meshes.empty()) throw ConfigError("mesh list is empty");
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    check_mesh(meshes[k]);
    if (k > 0 && meshes[k] < meshes[k - 1]) throw ConfigError("mesh list must be non-decreasing");
  }
  if (kh.modes < 1) throw ConfigError("kh.modes must be >= 1");
  if (!(kh.amplitude >= 0)) throw ConfigError("kh.amplitude must be >= 0");
  if (!(kh.j1 < kh.j2)) throw ConfigError("kh.j1 must lie below kh.j2");
  if (init == InitKind::uniform && !(uniform_state.rho > 0 && uniform_state.pressure > 0))
    throw ConfigError("uniform state needs rho > 0 and p > 0");
}

ConservativeField<double> RunConfig::initial_field(const Mesh& m) const {
  if (init == InitKind::uniform) return uniform_field(m, uniform_state, gas);
  return kh_initial_field(kh, m, gas);
}

RunConfig RunConfig::from_toml(const TomlTable& t) {
  RunConfig c;
  std::set<std::string> used;
  auto take = [&](const std::string& key) {
    if (!t.has(key)) return false;
    used.insert(key);
    return true;
  };
  // Top-level keys are shorthand for the [run] section.
  auto run_key = [&](const std::string& name) -> std::string {
    if (t.has("run." + name)) return take("run." + name), "run." + name;
    if (t.has(name)) return take(name), name;
    return {};
  };

  if (take("gas.gamma")) c.gas.gamma = t.number("gas.gamma");
  if (take("gas.s_floor")) c.gas.s_floor = t.number("gas.s_floor");
  if (take("scheme.alpha")) c.scheme.alpha = t.number("scheme.alpha");
  if (take("scheme.eps_visc")) c.scheme.eps_visc = t.number("scheme.eps_visc");
  if (take("scheme.cfl")) c.scheme.cfl = t.number("scheme.cfl");
  if (take("scheme.pressure_work_form")) {
    const std::string w = t.string("scheme.pressure_work_form");
    if (w == "averaged") c.scheme.pressure_work = PressureWork::averaged;
    else if (w == "as_printed") c.scheme.pressure_work = PressureWork::as_printed;
    else throw ConfigError("pressure_work_form must be 'averaged' or 'as_printed'");
  }
  if (take("scheme.boundary")) {
    const std::string b = t.string("scheme.boundary");
    if (b == "periodic") c.bc = Boundary::periodic;
    else if (b == "reflecting") c.bc = Boundary::reflecting;
    else throw ConfigError("boundary must be 'periodic' or 'reflecting'");
  }
  if (take("init.kind")) {
    const std::string k = t.string("init.kind");
    if (k == "kh") c.init = InitKind::kelvin_helmholtz;
    else if (k == "uniform") c.init = InitKind::uniform;
    else throw ConfigError("init.kind must be 'kh' or 'uniform'");
  }
  if (take("init.rho")) c.uniform_state.rho = t.number("init.rho");
  if (take("init.u")) c.uniform_state.vel.x() = t.number("init.u");
  if (take("init.v")) c.uniform_state.vel.y() = t.number("init.v");
  if (take("init.p")) c.uniform_state.pressure = t.number("init.p");

  if (take("kh.modes")) c.kh.modes = int(t.integer("kh.modes"));
  if (take("kh.amplitude")) c.kh.amplitude = t.number("kh.amplitude");
  if (take("kh.j1")) c.kh.j1 = t.number("kh.j1");
  if (take("kh.j2")) c.kh.j2 = t.number("kh.j2");
  if (take("kh.seed")) c.kh.seed = t.unsigned_integer("kh.seed");
  const bool any_coeff = t.has("kh.a1") || t.has("kh.b1") || t.has("kh.a2") || t.has("kh.b2");
  if (any_coeff) {
    KhCoefficients k;
    for (int j = 0; j < 2; ++j) {
      const std::string a = "kh.a" + std::to_string(j + 1), b = "kh.b" + std::to_string(j + 1);
      if (!take(a) || !take(b)) throw ConfigError("explicit KH coefficients need all of a1, b1, a2, b2");
      k.a[j] = t.number_array(a);
      k.b[j] = t.number_array(b);
      if (k.a[j].size() != k.b[j].size() || k.a[j].empty())
        throw ConfigError("KH coefficient arrays must be nonempty and equally long");
      double sum = 0;
      for (double v : k.a[j]) {
        if (v < 0 || v > 1) throw ConfigError("KH amplitudes must lie in [0, 1]");
        sum += v;
      }
      if (std::abs(sum - 1) > 1e-12) throw ConfigError("KH amplitudes of each interface must sum to 1");
    }
    if (k.a[0].size() != k.a[1].size()) throw ConfigError("both interfaces need the same mode count");
    c.kh.modes = int(k.a[0].size());
    c.kh.coeffs = k;
  }

  if (auto k = run_key("n"); !k.empty()) c.n = t.integer(k);
  if (auto k = run_key("meshes"); !k.empty()) {
    c.meshes.clear();
    for (double m : t.number_array(k)) c.meshes.push_back(Index(m));
  }
  if (auto k = run_key("t_end"); !k.empty()) c.t_end = t.number(k);
  if (auto k = run_key("output_dt"); !k.empty()) c.output_dt = t.number(k);
  if (auto k = run_key("snapshot_dt"); !k.empty()) c.snapshot_dt = t.number(k);
  if (auto k = run_key("out"); !k.empty()) c.out_dir = t.string(k);
  if (auto k = run_key("paper_scale"); !k.empty()) c.paper_scale = t.boolean(k);

  if (take("concat.tau")) c.tau = t.number("concat.tau");
  if (take("concat.window")) c.window = std::size_t(t.integer("concat.window"));
  if (take("concat.rate_dt")) c.rate_dt = t.number("concat.rate_dt");

  for (const auto& key : t.keys())
    if (!used.count(key)) throw ConfigError("unknown config key '" + key + "'");
  if (c.paper_scale) c.meshes = paper_scale_meshes();
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return from_toml(TomlTable::load(path)); }

std::vector<Index> paper_scale_meshes() { return {64, 128, 256, 512, 1024}; }

nlohmann::json to_json(const KhCoefficients& c) {
  return {{"a1", c.a[0]}, {"b1", c.b[0]}, {"a2", c.a[1]}, {"b2", c.b[1]}};
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["gas"] = {{"gamma", c.gas.gamma}, {"s_floor", c.gas.s_floor}};
  j["scheme"] = {{"alpha", c.scheme.alpha},
                 {"eps_visc", c.scheme.eps_visc},
                 {"cfl", c.scheme.cfl},
                 {"pressure_work_form", to_string(c.scheme.pressure_work)},
                 {"boundary", to_string(c.bc)}};
  j["init"] = {{"kind", c.init == InitKind::uniform ? "uniform" : "kh"},
               {"rho", c.uniform_state.rho},
               {"u", c.uniform_state.vel.x()},
               {"v", c.uniform_state.vel.y()},
               {"p", c.uniform_state.pressure}};
  j["kh"] = {{"modes", c.kh.modes},
             {"amplitude", c.kh.amplitude},
             {"j1", c.kh.j1},
             {"j2", c.kh.j2},
             {"seed", c.kh.seed},
             {"explicit_coefficients", c.kh.coeffs.has_value()}};
  j["run"] = {{"n", c.n},
              {"meshes", c.meshes},
              {"t_end", c.t_end},
              {"output_dt", c.output_dt},
              {"snapshot_dt", c.snapshot_dt},
              {"out", c.out_dir},
              {"paper_scale", c.paper_scale}};
  j["concat"] = {{"tau", c.tau}, {"window", c.window}, {"rate_dt", c.rate_dt}};
  return j;
}

std::string to_toml(const RunConfig& c) {
  std::ostringstream os;
  auto num = [](double v) { return format_double(v); };
  auto arr = [&](const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + num(v[k]);
    return s + "]";
  };
  os << "[gas]\ngamma = " << num(c.gas.gamma) << "\n";
  if (c.gas.s_floor != std::numeric_limits<double>::lowest()) os << "s_floor = " << num(c.gas.s_floor) << "\n";
  os << "\n[scheme]\nalpha = " << num(c.scheme.alpha) << "\neps_visc = " << num(c.scheme.eps_visc)
     << "\ncfl = " << num(c.scheme.cfl) << "\npressure_work_form = \"" << to_string(c.scheme.pressure_work)
     << "\"\nboundary = \"" << to_string(c.bc) << "\"\n";
  os << "\n[init]\nkind = \"" << (c.init == InitKind::uniform ? "uniform" : "kh") << "\"\n";
  if (c.init == InitKind::uniform)
    os << "rho = " << num(c.uniform_state.rho) << "\nu = " << num(c.uniform_state.vel.x())
       << "\nv = " << num(c.uniform_state.vel.y()) << "\np = " << num(c.uniform_state.pressure) << "\n";
  const KhCoefficients k = c.kh.coefficients();
  os << "\n[kh]\namplitude = " << num(c.kh.amplitude) << "\nj1 = " << num(c.kh.j1) << "\nj2 = " << num(c.kh.j2)
     << "\nseed = " << c.kh.seed << "\na1 = " << arr(k.a[0]) << "\nb1 = " << arr(k.b[0])
     << "\na2 = " << arr(k.a[1]) << "\nb2 = " << arr(k.b[1]) << "\n";
  std::vector<double> meshes(c.meshes.begin(), c.meshes.end());
  os << "\n[run]\nn = " << c.n << "\nmeshes = " << arr(meshes) << "\nt_end = " << num(c.t_end)
     << "\noutput_dt = " << num(c.output_dt) << "\nsnapshot_dt = " << num(c.snapshot_dt) << "\nout = \""
     << c.out_dir << "\"\n";
  os << "\n[concat]\ntau = " << num(c.tau) << "\nwindow = " << c.window << "\nrate_dt = " << num(c.rate_dt)
     << "\n";
  return os.str();
}

}  // namespace vfv
