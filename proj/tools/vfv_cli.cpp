// vfv: command line front end.
//
//   vfv run         --config cfg.toml --out dir
//   vfv hierarchy   --config cfg.toml --out dir [--meshes 16,32,64] [--paper-scale]
//   vfv concat      --config cfg.toml --out dir [--tau 1.0]
//   vfv consistency --config cfg.toml --out dir
//   vfv report      dir
//
// Exit codes: 0 ok, 2 positivity or invalid state, 3 configuration error,
// 4 failed precondition, 1 anything else.

#include "vfv/experiments.hpp"
#include "vfv/io.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::string meshes;
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::optional<double> t_end;
  std::optional<long> n;
  std::string pressure_work;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "TOML configuration file");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--meshes", o.meshes, "comma separated mesh sizes, e.g. 16,32,64");
  cmd->add_option("--seed", o.seed, "seed for the interface perturbation");
  cmd->add_option("--t-end", o.t_end, "final time");
  cmd->add_option("--n", o.n, "mesh size for `run`");
  cmd->add_option("--pressure-work-form", o.pressure_work, "averaged | as_printed");
  cmd->add_flag("--paper-scale", o.paper_scale, "use meshes 64..1024");
}

vfv::RunConfig build_config(const Overrides& o) {
  vfv::RunConfig cfg = o.config.empty() ? vfv::RunConfig{} : vfv::RunConfig::load(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (!o.meshes.empty()) {
    cfg.meshes.clear();
    std::stringstream ss(o.meshes);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        cfg.meshes.push_back(std::stol(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::logic_error&) {
        throw vfv::ConfigError("--meshes: not an integer: '" + tok + "'");
      }
    }
  }
  if (o.seed) {
    cfg.kh.seed = *o.seed;
    cfg.kh.coeffs.reset();
  }
  if (o.tau) cfg.tau = *o.tau;
  if (o.t_end) cfg.t_end = *o.t_end;
  if (o.n) cfg.n = *o.n;
  if (!o.pressure_work.empty()) {
    if (o.pressure_work == "averaged")
      cfg.scheme.pressure_work = vfv::PressureWork::averaged;
    else if (o.pressure_work == "as_printed")
      cfg.scheme.pressure_work = vfv::PressureWork::as_printed;
    else
      throw vfv::ConfigError("--pressure-work-form must be 'averaged' or 'as_printed'");
  }
  if (o.paper_scale) {
    cfg.paper_scale = true;
    cfg.meshes = vfv::paper_scale_meshes();
  }
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite volume Euler solver with Cesaro ensemble diagnostics"};
  app.set_version_flag("--version", std::string(VFV_VERSION));
  app.require_subcommand(1);

  Overrides o;
  std::string report_dir;
  auto* run = app.add_subcommand("run", "single-mesh run with snapshots and an entropy audit");
  auto* hier = app.add_subcommand("hierarchy", "mesh hierarchy, Cesaro averages and defect series");
  auto* concat = app.add_subcommand("concat", "entropy-bump concatenation and Dafermos comparison");
  auto* cons = app.add_subcommand("consistency", "consistency residuals against smooth test functions");
  auto* report = app.add_subcommand("report", "summarise a run directory");
  for (auto* c : {run, hier, concat, cons}) add_common(c, o);
  concat->add_option("--tau", o.tau, "restart time");
  report->add_option("dir", report_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (*report) {
      std::ostringstream text;
      vfv::cmd_report(report_dir, text);
      std::cout << text.str();
      std::ofstream(std::filesystem::path(report_dir) / "report.md") << text.str();
      return 0;
    }
    const vfv::RunConfig cfg = build_config(o);
    if (*run) {
      const auto r = vfv::cmd_run(cfg);
      std::cout << "steps " << r.steps << "  wall " << r.wall_seconds << " s\n"
                << "relative drift (rho, mx, my, E): " << r.relative_drift.transpose() << "\n"
                << "min per-step entropy change " << r.min_entropy_increment << "\n"
                << "min S - s_floor rho " << r.min_floor_margin << "\n";
    } else if (*hier) {
      const auto r = vfv::cmd_hierarchy(cfg);
      const auto& last = r.rows.back();
      std::cout << "t " << last.t << "  R " << last.r << "  D_E " << last.d_e << "  D_Ent " << last.d_ent << "\n";
      for (const auto& [k, v] : r.integrals) std::cout << "int " << k << " dt = " << vfv::format_double(v) << "\n";
    } else if (*concat) {
      const auto r = vfv::cmd_concat(cfg);
      std::cout << "delta " << r.delta << "  rate baseline " << r.comparison.rate_a << "  rate bumped "
                << r.comparison.rate_b << "  verdict " << vfv::to_string(r.comparison.verdict) << "\n";
    } else if (*cons) {
      const auto r = vfv::cmd_consistency(cfg);
      for (const auto& row : r.rows)
        std::cout << row.phi << " h=" << row.h << " e2=" << row.e2 << " e3=" << row.e3 << " e4=" << row.e4 << "\n";
      std::cout << (r.all_decay ? "all residuals decay\n" : "some residuals do not decay\n");
    }
    if (!cfg.out_dir.empty()) std::cout << "outputs in " << cfg.out_dir << "\n";
    return 0;
  } catch (const vfv::PositivityFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vfv::InvalidState& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const vfv::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const vfv::FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 3;
  } catch (const vfv::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
