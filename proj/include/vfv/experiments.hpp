// Orchestration behind the command line: single runs, hierarchy defect
// series, the entropy-bump concatenation and the consistency study.
#pragma once

#include "vfv/config.hpp"
#include "vfv/diagnostics.hpp"
#include "vfv/measures.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace vfv {

/// Output times 0, dt, 2 dt, ..., t_end (t_end always included).
std::vector<double> output_times(double t_end, double dt);

struct RunResult {
  ConservativeField<double> final_field;
  State<double> totals_initial, totals_final;
  State<double> relative_drift;  // per component, see conservation_drift()
  long steps = 0;
  double wall_seconds = 0;
  double entropy_floor = 0;             // s_floor = min_c S/rho at t = 0
  double min_entropy_increment = 0;     // most negative per-step change of sum S h^2
  double min_floor_margin = 0;          // min over steps and cells of S - s_floor rho
  TimeSeries total_entropy;             // at output times
};

/// |total(t) - total(0)| normalised by |total(0)|, or for components whose
/// total vanishes by the L1 norm of the momentum field at t = 0.
State<double> conservation_drift(const ConservativeField<double>& initial, const ConservativeField<double>& now);

RunResult cmd_run(const RunConfig& cfg);

struct HierarchyResult {
  std::vector<DefectRow> rows;
  std::map<std::string, double> integrals;  // trapezoid over the output grid
  std::vector<double> max_abs_state;        // boundedness monitor per output time
  std::vector<double> cauchy_density;       // aggregate W1(ens_N, ens_N+1), density component, at t_end
  std::vector<double> cauchy_sliced;        // same with the sliced projection
  double wall_seconds = 0;
};

HierarchyResult cmd_hierarchy(const RunConfig& cfg);

struct ConcatResult {
  double tau = 0;
  double energy_budget = 0;
  double energy_defect = 0;  // D_E at tau
  double delta = 0;          // uniform entropy bump per cell
  TimeSeries baseline;       // Cesaro total entropy
  TimeSeries bumped;         // baseline up to tau, bumped restart after
  DafermosResult comparison;
  State<double> restart_drift;  // bumped vs barycenter totals at tau
};

ConcatResult cmd_concat(const RunConfig& cfg);

struct ConsistencyResult {
  std::vector<ConsistencyResidual> rows;
  std::map<std::string, bool> e2_decreasing;  // keyed by test-function label
  std::map<std::string, bool> e3_decreasing;
  double min_e4_nonnegative_phi = 0;          // min e4 over phi >= 0
  bool all_decay = false;
};

ConsistencyResult cmd_consistency(const RunConfig& cfg);

/// Summarises whatever outputs exist in `dir`.
void cmd_report(const std::filesystem::path& dir, std::ostream& os);

}  // namespace vfv
