#include "vfv/experiments.hpp"

#include "vfv/initdata.hpp"
#include "vfv/io.hpp"
#include "vfv/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vfv {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

/// Merges time lists, dropping near-duplicates.
std::vector<double> merge_times(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  std::vector<double> out;
  for (double t : a)
    if (out.empty() || !same_time(out.back(), t)) out.push_back(t);
  return out;
}

std::size_t index_of(const std::vector<double>& times, double t) {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (same_time(times[k], t)) return k;
  return times.size();
}

fs::path prepare_dir(const RunConfig& cfg) {
  if (cfg.out_dir.empty()) return {};
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  return dir;
}

void write_metadata(const fs::path& dir, const RunConfig& cfg, const std::string& command, nlohmann::json extra) {
  if (dir.empty()) return;
  nlohmann::json j;
  j["command"] = command;
  j["code_version"] = VFV_VERSION;
  j["config"] = to_json(cfg);
  j["config_toml"] = to_toml(cfg);
  j["kh_coefficients"] = to_json(cfg.kh.coefficients());
  j["notes"] = {
      {"boundary", std::string(to_string(cfg.bc)) + " (benchmark convention; walls available via scheme.boundary)"},
      {"reynolds_norm", "matrix L1 norm = entrywise absolute sum per cell times h^2"},
      {"intergrid_transfer", "members restricted to the coarsest mesh by conservative block averaging"},
      {"entropy", "S = rho log((gamma-1) rho e / rho^gamma), p(rho,S) = rho^gamma exp(S/rho)"},
      {"wasserstein", "limit Young measure is not computable; distances are Cauchy distances between ensembles"},
      {"sampling", "steps are clipped to land exactly on output times"}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream(dir / "metadata.json") << j.dump(2) << '\n';
  std::ofstream(dir / "config.toml") << to_toml(cfg);
}

std::vector<double> trapezoid_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double dt = t[k + 1] - t[k];
    w[k] += 0.5 * dt;
    w[k + 1] += 0.5 * dt;
  }
  return w;
}

double max_abs(const ConservativeField<double>& f) { return f.cells.cwiseAbs().maxCoeff(); }

/// Member snapshots of every mesh on the common (coarsest) mesh at `times`.
struct MemberHistory {
  Mesh common;
  std::vector<std::vector<EnsembleMember<double>>> members;  // [mesh][time]
  std::vector<std::vector<double>> max_abs_state;            // [mesh][time]
  std::vector<ConservativeField<double>> finals;             // full-resolution final fields
};

MemberHistory run_members(const RunConfig& cfg, const std::vector<double>& times) {
  const std::vector<Index>& meshes = cfg.meshes;
  MemberHistory hist{cfg.mesh(*std::min_element(meshes.begin(), meshes.end())), {}, {}, {}};
  hist.members.resize(meshes.size());
  hist.max_abs_state.resize(meshes.size());
  hist.finals.resize(meshes.size());

  auto run_one = [&](std::size_t m) {
    const Mesh mesh = cfg.mesh(meshes[m]);
    auto& slots = hist.members[m];
    auto& bound = hist.max_abs_state[m];
    slots.resize(times.size());
    bound.assign(times.size(), 0.0);
    const ConservativeField<double> init = cfg.initial_field(mesh);
    auto store = [&](const ConservativeField<double>& f) {
      const std::size_t k = index_of(times, f.time);
      if (k == times.size()) return;
      slots[k] = make_member(f, hist.common, cfg.gas);
      bound[k] = max_abs(f);
    };
    store(init);
    StepSink<double> sink = [&](const ConservativeField<double>& f, const StepInfo& info) {
      if (info.at_stop) store(f);
    };
    hist.finals[m] = run_to_time(init, times.back(), cfg.scheme, cfg.gas, sink, std::span<const double>(times));
  };

  std::vector<std::future<void>> jobs;
  for (std::size_t m = 0; m < meshes.size(); ++m) jobs.push_back(std::async(std::launch::async, run_one, m));
  std::exception_ptr first;
  for (std::size_t m = 0; m < jobs.size(); ++m) {
    try {
      jobs[m].get();
    } catch (...) {
      std::cerr << "hierarchy member n=" << meshes[m] << " failed\n";
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return hist;
}

CesaroEnsemble<double> ensemble_at(const MemberHistory& hist, std::size_t k, std::size_t count) {
  std::vector<EnsembleMember<double>> ms;
  for (std::size_t m = 0; m < count; ++m) ms.push_back(hist.members[m][k]);
  return cesaro_from_members(std::move(ms));
}

}  // namespace

std::vector<double> output_times(double t_end, double dt) {
  std::vector<double> t;
  const auto count = static_cast<long>(std::floor(t_end / dt + 1e-9));
  for (long k = 0; k <= count; ++k) t.push_back(std::min(double(k) * dt, t_end));
  if (!same_time(t.back(), t_end)) t.push_back(t_end);
  t.back() = t_end;
  return t;
}

State<double> conservation_drift(const ConservativeField<double>& initial, const ConservativeField<double>& now) {
  const State<double> t0 = initial.totals(), t1 = now.totals();
  const double h2 = initial.mesh.h() * initial.mesh.h();
  const double mom_l1 = initial.cells.middleRows<2>(kMomentumX).cwiseAbs().sum() * h2;
  State<double> drift;
  for (int c = 0; c < 4; ++c) {
    double scale = std::abs(t0(c));
    if (scale == 0 && (c == kMomentumX || c == kMomentumY)) scale = mom_l1;
    if (scale == 0) scale = 1;
    drift(c) = std::abs(t1(c) - t0(c)) / scale;
  }
  return drift;
}

// ---------------------------------------------------------------------------

RunResult cmd_run(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const fs::path dir = prepare_dir(cfg);
  const Mesh mesh = cfg.mesh(cfg.n);
  const ConservativeField<double> init = cfg.initial_field(mesh);
  init.validate();

  RunResult res;
  GasParams<double> gas = cfg.gas;
  {
    const ScalarArray<double> s = entropy_field(init, gas);
    gas.s_floor = (s.array() / init.cells.row(kDensity).transpose().array()).minCoeff();
  }
  res.entropy_floor = gas.s_floor;
  res.totals_initial = init.totals();
  res.min_entropy_increment = std::numeric_limits<double>::infinity();
  res.min_floor_margin = std::numeric_limits<double>::infinity();

  const std::vector<double> out_t = output_times(cfg.t_end, cfg.output_dt);
  const std::vector<double> snap_t = output_times(cfg.t_end, cfg.snapshot_dt);
  const std::vector<double> stops = merge_times(out_t, snap_t);

  std::unique_ptr<CsvWriter> series;
  if (!dir.empty())
    series = std::make_unique<CsvWriter>(
        dir / "series.csv", std::vector<std::string>{"t", "mass", "mom_x", "mom_y", "energy", "entropy", "floor_margin"});

  auto floor_margin = [&](const ConservativeField<double>& f, const ScalarArray<double>& s) {
    return (s.array() - gas.s_floor * f.cells.row(kDensity).transpose().array()).minCoeff();
  };
  double prev_entropy = 0;
  auto observe = [&](const ConservativeField<double>& f, bool at_stop) {
    const ScalarArray<double> s = entropy_field(f, gas);
    const double s_tot = s.sum() * mesh.h() * mesh.h();
    const double margin = floor_margin(f, s);
    res.min_floor_margin = std::min(res.min_floor_margin, margin);
    if (f.time > init.time) res.min_entropy_increment = std::min(res.min_entropy_increment, s_tot - prev_entropy);
    prev_entropy = s_tot;
    if (!at_stop) return;
    if (index_of(out_t, f.time) < out_t.size()) {
      res.total_entropy.push(f.time, s_tot);
      if (series) {
        const State<double> tot = f.totals();
        series->row(std::vector<double>{f.time, tot(0), tot(1), tot(2), tot(3), s_tot, margin});
      }
    }
    if (!dir.empty()) {
      const std::size_t k = index_of(snap_t, f.time);
      if (k < snap_t.size()) {
        char name[32];
        std::snprintf(name, sizeof name, "snap_%04zu", k);
        write_snapshot(dir / (std::string(name) + ".vfv"), f, gas.gamma);
        write_pgm(dir / (std::string(name) + ".pgm"), f);
      }
    }
  };

  observe(init, true);
  StepSink<double> sink = [&](const ConservativeField<double>& f, const StepInfo& info) {
    res.steps = info.step;
    observe(f, info.at_stop);
  };
  try {
    res.final_field = run_to_time(init, cfg.t_end, cfg.scheme, gas, sink, std::span<const double>(stops));
  } catch (const std::exception& e) {
    write_metadata(dir, cfg, "run", {{"status", "failed"}, {"error", e.what()}, {"steps_completed", res.steps}});
    throw;
  }
  res.totals_final = res.final_field.totals();
  res.relative_drift = conservation_drift(init, res.final_field);
  res.wall_seconds = seconds_since(t0);

  write_metadata(dir, cfg, "run",
                 {{"status", "ok"},
                  {"steps", res.steps},
                  {"wall_seconds", res.wall_seconds},
                  {"conservation_audit",
                   {{"initial", {res.totals_initial(0), res.totals_initial(1), res.totals_initial(2), res.totals_initial(3)}},
                    {"final", {res.totals_final(0), res.totals_final(1), res.totals_final(2), res.totals_final(3)}},
                    {"relative_drift",
                     {res.relative_drift(0), res.relative_drift(1), res.relative_drift(2), res.relative_drift(3)}}}},
                  {"entropy_floor", res.entropy_floor},
                  {"min_entropy_increment", res.min_entropy_increment},
                  {"min_floor_margin", res.min_floor_margin}});
  return res;
}

// ---------------------------------------------------------------------------

HierarchyResult cmd_hierarchy(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.meshes.size() < 2) throw ConfigError("hierarchy needs at least two meshes");
  const auto t0 = Clock::now();
  const fs::path dir = prepare_dir(cfg);
  const std::vector<double> times = output_times(cfg.t_end, cfg.output_dt);
  const MemberHistory hist = run_members(cfg, times);

  HierarchyResult res;
  for (std::size_t k = 0; k < times.size(); ++k) {
    res.rows.push_back(defect_row(ensemble_at(hist, k, cfg.meshes.size()), cfg.gas));
    double b = 0;
    for (const auto& per_mesh : hist.max_abs_state) b = std::max(b, per_mesh[k]);
    res.max_abs_state.push_back(b);
  }

  const std::vector<double> w = trapezoid_weights(times);
  const std::vector<std::pair<std::string, double DefectRow::*>> cols{
      {"R1", &DefectRow::r1}, {"R2", &DefectRow::r2}, {"R", &DefectRow::r},     {"E1", &DefectRow::e1},
      {"E2", &DefectRow::e2}, {"DE", &DefectRow::d_e}, {"S", &DefectRow::s_tot}, {"DEnt", &DefectRow::d_ent}};
  for (const auto& [name, member] : cols) {
    double acc = 0;
    for (std::size_t k = 0; k < times.size(); ++k) acc += w[k] * (res.rows[k].*member);
    res.integrals[name] = acc;
  }

  const std::size_t last = times.size() - 1;
  std::vector<DistanceField<double>> distances;
  for (std::size_t n = 1; n < cfg.meshes.size(); ++n) {
    const auto a = ensemble_at(hist, last, n), b = ensemble_at(hist, last, n + 1);
    distances.push_back(measure_distance_field(a, b, ComponentSelector{kDensity}));
    res.cauchy_density.push_back(distances.back().aggregate);
    res.cauchy_sliced.push_back(measure_distance_field(a, b, SlicedSelector{}).aggregate);
  }
  res.wall_seconds = seconds_since(t0);

  if (!dir.empty()) {
    {
      CsvWriter csv(dir / "defects.csv", {"t", "R1", "R2", "R", "E1", "E2", "DE", "S", "DEnt"});
      for (const auto& r : res.rows) csv.row(std::vector<double>{r.t, r.r1, r.r2, r.r, r.e1, r.e2, r.d_e, r.s_tot, r.d_ent});
    }
    {
      CsvWriter csv(dir / "integrals.csv", {"quantity", "value"});
      for (const auto& [name, member] : cols) csv.row({"int_" + name + "_dt", format_double(res.integrals[name])});
    }
    {
      CsvWriter csv(dir / "monitor.csv", {"t", "max_abs_U"});
      for (std::size_t k = 0; k < times.size(); ++k) csv.row(std::vector<double>{times[k], res.max_abs_state[k]});
    }
    {
      CsvWriter csv(dir / "cauchy.csv", {"N", "W1_density", "W1_sliced"});
      for (std::size_t n = 0; n < res.cauchy_density.size(); ++n)
        csv.row(std::vector<double>{double(n + 1), res.cauchy_density[n], res.cauchy_sliced[n]});
    }
    for (std::size_t n = 0; n < distances.size(); ++n) {
      CsvWriter csv(dir / ("distance_N" + std::to_string(n + 1) + ".csv"), {"i", "j", "dist"});
      const Mesh& m = distances[n].mesh;
      for (Index j = 0; j < m.n(); ++j)
        for (Index i = 0; i < m.n(); ++i)
          csv.row({std::to_string(i), std::to_string(j), format_double(distances[n].dist(m.index(i, j)))});
      csv.row({"aggregate", "", format_double(distances[n].aggregate)});
    }
    const auto final_ens = ensemble_at(hist, last, cfg.meshes.size());
    ConservativeField<double> cesaro(final_ens.mesh, final_ens.time);
    cesaro.cells = final_ens.cesaro;
    write_snapshot(dir / "cesaro_final.vfv", cesaro, cfg.gas.gamma);
    write_pgm(dir / "cesaro_final.pgm", cesaro);
    for (std::size_t m = 0; m < cfg.meshes.size(); ++m) {
      const std::string stem = "member_" + std::to_string(m) + "_n" + std::to_string(cfg.meshes[m]) + "_final";
      write_snapshot(dir / (stem + ".vfv"), hist.finals[m], cfg.gas.gamma);
      write_pgm(dir / (stem + ".pgm"), hist.finals[m]);
    }
    nlohmann::json integrals(res.integrals);
    write_metadata(dir, cfg, "hierarchy",
                   {{"status", "ok"},
                    {"wall_seconds", res.wall_seconds},
                    {"common_mesh", hist.common.n()},
                    {"integrals", integrals},
                    {"integral_quadrature", "trapezoid on the output grid"}});
  }
  return res;
}

// ---------------------------------------------------------------------------

ConcatResult cmd_concat(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.tau < 0 || cfg.tau >= cfg.t_end) throw ConfigError("tau must lie in [0, t_end)");
  const double rate_end = cfg.tau + double(cfg.window) * cfg.rate_dt;
  if (rate_end > cfg.t_end + 1e-12) throw ConfigError("tau + window * rate_dt exceeds t_end");
  const fs::path dir = prepare_dir(cfg);

  std::vector<double> fine;
  for (std::size_t k = 0; k <= cfg.window; ++k) fine.push_back(cfg.tau + double(k) * cfg.rate_dt);
  const std::vector<double> times = merge_times(output_times(cfg.t_end, cfg.output_dt), fine);
  const std::size_t k_tau = index_of(times, cfg.tau);

  const MemberHistory hist = run_members(cfg, times);
  ConcatResult res;
  res.tau = cfg.tau;
  std::vector<CesaroEnsemble<double>> ensembles;
  for (std::size_t k = 0; k < times.size(); ++k) {
    ensembles.push_back(ensemble_at(hist, k, cfg.meshes.size()));
    res.baseline.push(times[k], entropy_defect(ensembles.back(), cfg.gas).s_tot);
  }
  res.energy_budget = energy_defect(ensembles.front(), cfg.gas).e1;
  const CesaroEnsemble<double>& at_tau = ensembles[k_tau];
  res.energy_defect = energy_defect(at_tau, cfg.gas).d_e;

  const ConservativeField<double> barycenter = entropy_barycenter(at_tau, cfg.gas);
  const EntropyBump<double> bump = concat_with_entropy_bump(barycenter, res.energy_budget, cfg.gas);
  res.delta = bump.delta;
  res.restart_drift = conservation_drift(barycenter, bump.field);

  for (std::size_t k = 0; k <= k_tau; ++k) res.bumped.push(times[k], res.baseline.v[k]);
  StepSink<double> sink = [&](const ConservativeField<double>& f, const StepInfo& info) {
    if (info.at_stop && index_of(times, f.time) < times.size()) res.bumped.push(f.time, total_entropy(f, cfg.gas));
  };
  run_to_time(bump.field, cfg.t_end, cfg.scheme, cfg.gas, sink, std::span<const double>(times));

  const double scale = std::max(1.0, std::abs(res.baseline.v[k_tau]));
  res.comparison = dafermos_compare(res.baseline, res.bumped, cfg.tau, 1e-12 * scale, cfg.window);

  if (!dir.empty()) {
    {
      CsvWriter csv(dir / "concat_series.csv", {"t", "S_baseline", "S_bumped"});
      for (std::size_t k = 0; k < times.size(); ++k)
        csv.row(std::vector<double>{times[k], res.baseline.v[k], res.bumped.v[k]});
    }
    std::ofstream rep(dir / "concat_report.txt");
    rep << "tau " << format_double(res.tau) << "\n"
        << "energy_budget " << format_double(res.energy_budget) << "\n"
        << "energy_defect_at_tau " << format_double(res.energy_defect) << "\n"
        << "entropy_bump_delta " << format_double(res.delta) << "\n"
        << "window_samples " << cfg.window << " rate_dt " << format_double(cfg.rate_dt) << "\n"
        << "rate_baseline " << format_double(res.comparison.rate_a) << "\n"
        << "rate_bumped " << format_double(res.comparison.rate_b) << "\n"
        << "verdict " << (res.comparison.verdict == DafermosVerdict::a_precedes_b ? "baseline_precedes_bumped"
                          : res.comparison.verdict == DafermosVerdict::b_precedes_a ? "bumped_precedes_baseline"
                                                                                    : "incomparable")
        << "\n";
    write_metadata(dir, cfg, "concat",
                   {{"status", "ok"},
                    {"delta", res.delta},
                    {"energy_defect_at_tau", res.energy_defect},
                    {"rate_baseline", res.comparison.rate_a},
                    {"rate_bumped", res.comparison.rate_b},
                    {"verdict", to_string(res.comparison.verdict)}});
  }
  return res;
}

// ---------------------------------------------------------------------------

ConsistencyResult cmd_consistency(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.meshes.size() < 3) throw ConfigError("consistency study needs at least three meshes");
  const fs::path dir = prepare_dir(cfg);
  const std::vector<TestFunction> lib = test_function_library();

  std::vector<std::vector<ConsistencyResidual>> per_mesh(cfg.meshes.size());
  auto run_one = [&](std::size_t m) {
    const Mesh mesh = cfg.mesh(cfg.meshes[m]);
    ConsistencyRecorder rec(mesh, lib);
    const ConservativeField<double> init = cfg.initial_field(mesh);
    rec.record(init, cfg.gas);
    StepSink<double> sink = [&](const ConservativeField<double>& f, const StepInfo&) { rec.record(f, cfg.gas); };
    run_to_time(init, cfg.t_end, cfg.scheme, cfg.gas, sink);
    for (std::size_t k = 0; k < lib.size(); ++k) per_mesh[m].push_back(rec.residual(k, 0.0, cfg.t_end));
  };
  std::vector<std::future<void>> jobs;
  for (std::size_t m = 0; m < cfg.meshes.size(); ++m) jobs.push_back(std::async(std::launch::async, run_one, m));
  for (auto& j : jobs) j.get();

  ConsistencyResult res;
  res.min_e4_nonnegative_phi = std::numeric_limits<double>::infinity();
  res.all_decay = true;
  for (std::size_t k = 0; k < lib.size(); ++k) {
    bool d2 = true, d3 = true;
    for (std::size_t m = 0; m < cfg.meshes.size(); ++m) {
      res.rows.push_back(per_mesh[m][k]);
      if (m > 0) {
        d2 = d2 && per_mesh[m][k].e2 < per_mesh[m - 1][k].e2;
        d3 = d3 && per_mesh[m][k].e3 < per_mesh[m - 1][k].e3;
      }
      if (lib[k].is_nonnegative()) res.min_e4_nonnegative_phi = std::min(res.min_e4_nonnegative_phi, per_mesh[m][k].e4);
    }
    res.e2_decreasing[lib[k].label()] = d2;
    res.e3_decreasing[lib[k].label()] = d3;
    if (!lib[k].is_constant()) res.all_decay = res.all_decay && d2 && d3;
  }

  if (!dir.empty()) {
    {
      CsvWriter csv(dir / "consistency.csv", {"h", "phi", "tau1", "tau2", "e2", "e3", "e4"});
      for (const auto& r : res.rows)
        csv.row({format_double(r.h), r.phi, format_double(r.tau1), format_double(r.tau2), format_double(r.e2),
                 format_double(r.e3), format_double(r.e4)});
    }
    {
      CsvWriter csv(dir / "consistency_verdict.csv", {"phi", "e2_decreasing", "e3_decreasing"});
      for (const auto& phi : lib)
        csv.row({phi.label(), res.e2_decreasing[phi.label()] ? "yes" : "no",
                 res.e3_decreasing[phi.label()] ? "yes" : "no"});
    }
    write_metadata(dir, cfg, "consistency",
                   {{"status", "ok"},
                    {"all_nonconstant_decay", res.all_decay},
                    {"min_e4_nonnegative_phi", res.min_e4_nonnegative_phi},
                    {"time_integral", "trapezoid over every accepted step"}});
  }
  return res;
}

// ---------------------------------------------------------------------------

void cmd_report(const fs::path& dir, std::ostream& os) {
  if (!fs::is_directory(dir)) throw std::runtime_error("no such run directory: " + dir.string());
  bool found = false;
  if (fs::exists(dir / "metadata.json")) {
    std::ifstream is(dir / "metadata.json");
    const auto j = nlohmann::json::parse(is);
    os << "# Run report: " << dir.string() << "\n\n";
    os << "command: " << j.value("command", "?") << "  status: " << j.value("status", "?")
       << "  code version: " << j.value("code_version", "?") << "\n";
    if (j.contains("wall_seconds")) os << "wall time: " << j["wall_seconds"].get<double>() << " s\n";
    if (j.contains("conservation_audit"))
      os << "relative conservation drift (rho, m_x, m_y, E): " << j["conservation_audit"]["relative_drift"].dump() << "\n";
    found = true;
  }
  if (fs::exists(dir / "integrals.csv")) {
    const CsvTable t = read_csv(dir / "integrals.csv");
    os << "\n## Time integrals over [0, T]\n\n| quantity | value |\n|---|---|\n";
    for (const auto& r : t.rows) os << "| " << r[0] << " | " << r[1] << " |\n";
    found = true;
  }
  if (fs::exists(dir / "defects.csv")) {
    const CsvTable t = read_csv(dir / "defects.csv");
    if (!t.rows.empty()) {
      os << "\n## Defects at final time\n\n";
      for (std::size_t c = 0; c < t.header.size(); ++c) os << t.header[c] << " = " << t.rows.back()[c] << "\n";
    }
    found = true;
  }
  if (fs::exists(dir / "cauchy.csv")) {
    const CsvTable t = read_csv(dir / "cauchy.csv");
    os << "\n## Cauchy distances W1(ens_N, ens_N+1) at final time\n\n";
    for (const auto& r : t.rows) os << "N=" << r[0] << "  density " << r[1] << "  sliced " << r[2] << "\n";
    found = true;
  }
  if (fs::exists(dir / "concat_report.txt")) {
    std::ifstream is(dir / "concat_report.txt");
    os << "\n## Concatenation experiment\n\n" << is.rdbuf();
    found = true;
  }
  if (fs::exists(dir / "consistency_verdict.csv")) {
    const CsvTable t = read_csv(dir / "consistency_verdict.csv");
    os << "\n## Consistency residual decay\n\n";
    for (const auto& r : t.rows) os << r[0] << ": e2 decreasing " << r[1] << ", e3 decreasing " << r[2] << "\n";
    found = true;
  }
  if (!found) throw std::runtime_error("no recognised outputs in " + dir.string());
}

}  // namespace vfv
