// Measure-valued diagnostics over a mesh hierarchy: Cesaro ensembles,
// Reynolds / energy / entropy defects, entropy production and the Dafermos
// comparison, the entropy-bump concatenation, and weak-form residuals.
#pragma once

#include "vfv/eos.hpp"
#include "vfv/grid.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vfv {

/// Raised when an experiment's precondition does not hold (e.g. nothing to bump).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kTimeMatchTol = 1e-12;

inline bool same_time(double a, double b) { return std::abs(a - b) <= kTimeMatchTol * std::max(1.0, std::abs(a)); }

// ---------------------------------------------------------------------------
// Cesaro ensembles

/// One hierarchy member on the common mesh. `entropy` is the block average
/// of the member's fine-mesh entropy, not the entropy of the averaged state.
template <class Scalar = double>
struct EnsembleMember {
  ConservativeField<Scalar> state;
  ScalarArray<Scalar> entropy;
};

template <class Scalar>
EnsembleMember<Scalar> make_member(const ConservativeField<Scalar>& fine, const Mesh& common,
                                   const GasParams<Scalar>& g) {
  return {restrict_to(fine, common), restrict_scalar(entropy_field(fine, g), fine.mesh, common)};
}

template <class Scalar = double>
struct CesaroEnsemble {
  Mesh mesh;
  Scalar time = 0;
  std::vector<EnsembleMember<Scalar>> members;
  StateArray<Scalar> cesaro;            // mean of member states
  ScalarArray<Scalar> cesaro_entropy;   // mean of member entropies

  Index size() const { return Index(members.size()); }
};

template <class Scalar>
CesaroEnsemble<Scalar> cesaro_from_members(std::vector<EnsembleMember<Scalar>> members) {
  if (members.empty()) throw std::invalid_argument("Cesaro ensemble needs at least one member");
  CesaroEnsemble<Scalar> ens;
  ens.mesh = members.front().state.mesh;
  ens.time = members.front().state.time;
  // Mean as first member plus averaged deviations, so identical members
  // reproduce their common value exactly.
  const auto& first = members.front();
  StateArray<Scalar> dev = StateArray<Scalar>::Zero(4, ens.mesh.cell_count());
  ScalarArray<Scalar> sdev = ScalarArray<Scalar>::Zero(ens.mesh.cell_count());
  for (const auto& m : members) {
    if (!(m.state.mesh == ens.mesh)) throw std::invalid_argument("ensemble members live on different meshes");
    if (!same_time(double(m.state.time), double(ens.time)))
      throw std::invalid_argument("ensemble members are at different times");
    dev += m.state.cells - first.state.cells;
    sdev += m.entropy - first.entropy;
  }
  const Scalar n = Scalar(members.size());
  ens.cesaro = first.state.cells + dev / n;
  ens.cesaro_entropy = first.entropy + sdev / n;
  ens.members = std::move(members);
  return ens;
}

/// Restricts every run to the coarsest mesh and averages.
template <class Scalar>
CesaroEnsemble<Scalar> cesaro_build(std::span<const ConservativeField<Scalar>> runs, const GasParams<Scalar>& g) {
  if (runs.empty()) throw std::invalid_argument("Cesaro ensemble needs at least one run");
  Mesh coarse = runs.front().mesh;
  for (const auto& r : runs) {
    if (r.mesh.bc() != coarse.bc()) throw std::invalid_argument("runs use different boundary conditions");
    if (r.mesh.n() < coarse.n()) coarse = r.mesh;
  }
  std::vector<EnsembleMember<Scalar>> members;
  members.reserve(runs.size());
  for (const auto& r : runs) members.push_back(make_member(r, coarse, g));
  return cesaro_from_members(std::move(members));
}

namespace detail {

// E(rho, m, S) and p(rho, S); when S is exactly the entropy of u these are
// u's own energy and pressure, returned without the round trip.
template <class Scalar>
Scalar energy_from_entropy(const State<Scalar>& u, Scalar s, const GasParams<Scalar>& g) {
  if (s == entropy(u, g)) return energy(u);
  return total_energy<Scalar>(density(u), momentum(u), s, g);
}

template <class Scalar>
Scalar pressure_at_entropy(const State<Scalar>& u, Scalar s, const GasParams<Scalar>& g) {
  if (s == entropy(u, g)) return pressure(u, g);
  return pressure_from_entropy<Scalar>(density(u), s, g);
}

}  // namespace detail

/// The averaged state described through entropy: (rho~, m~, E(rho~, m~, S~)).
template <class Scalar>
ConservativeField<Scalar> entropy_barycenter(const CesaroEnsemble<Scalar>& ens, const GasParams<Scalar>& g) {
  ConservativeField<Scalar> f(ens.mesh, ens.time);
  for (Index c = 0; c < ens.mesh.cell_count(); ++c) {
    const State<Scalar> u = ens.cesaro.col(c);
    f.cells.col(c) = u;
    f.cells(kEnergy, c) = detail::energy_from_entropy<Scalar>(u, ens.cesaro_entropy(c), g);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Defects

struct ReynoldsDefect {
  double r1 = 0, r2 = 0, r = 0;
};
struct EnergyDefect {
  double e1 = 0, e2 = 0, d_e = 0;
};
struct EntropyDefect {
  double s_tot = 0, d_ent = 0;
};

struct DefectRow {
  double t = 0;
  double r1 = 0, r2 = 0, r = 0;
  double e1 = 0, e2 = 0, d_e = 0;
  double s_tot = 0, d_ent = 0;
};

namespace detail {

template <class Scalar>
Eigen::Matrix<Scalar, 2, 2> flux_tensor(Scalar rho, const Vec2<Scalar>& mom, Scalar p) {
  return mom * mom.transpose() / rho + p * Eigen::Matrix<Scalar, 2, 2>::Identity();
}

template <class Scalar>
void require_positive_density(const CesaroEnsemble<Scalar>& ens) {
  for (Index c = 0; c < ens.mesh.cell_count(); ++c)
    if (!(ens.cesaro(kDensity, c) > 0)) throw InvalidState("vacuum in Cesaro state", c);
}

}  // namespace detail

/// L1 norms (entrywise absolute sum per cell, times h^2) of the averaged
/// flux tensor, the flux tensor of the averaged state, and their difference.
template <class Scalar>
ReynoldsDefect reynolds_defect(const CesaroEnsemble<Scalar>& ens, const GasParams<Scalar>& g) {
  using Mat2 = Eigen::Matrix<Scalar, 2, 2>;
  detail::require_positive_density(ens);
  const Scalar h2 = ens.mesh.template h<Scalar>() * ens.mesh.template h<Scalar>();
  const Scalar inv_n = Scalar(1) / Scalar(ens.size());
  Scalar r1 = 0, r2 = 0, r = 0;
  for (Index c = 0; c < ens.mesh.cell_count(); ++c) {
    auto tensor = [&](const EnsembleMember<Scalar>& m) {
      const State<Scalar> u = m.state.cells.col(c);
      return detail::flux_tensor<Scalar>(density(u), momentum(u), pressure(u, g, c));
    };
    const Mat2 first = tensor(ens.members.front());
    Mat2 dev = Mat2::Zero();
    for (const auto& m : ens.members) dev += tensor(m) - first;
    const Mat2 mean = first + dev * inv_n;
    const State<Scalar> uc = ens.cesaro.col(c);
    const Mat2 tc = detail::flux_tensor<Scalar>(
        density(uc), momentum(uc), detail::pressure_at_entropy<Scalar>(uc, ens.cesaro_entropy(c), g));
    r1 += mean.cwiseAbs().sum();
    r2 += tc.cwiseAbs().sum();
    r += (mean - tc).cwiseAbs().sum();
  }
  return {double(r1 * h2), double(r2 * h2), double(r * h2)};
}

/// E1 = int E~, E2 = int E(rho~, m~, S~), D_E = E1 - E2.
template <class Scalar>
EnergyDefect energy_defect(const CesaroEnsemble<Scalar>& ens, const GasParams<Scalar>& g) {
  detail::require_positive_density(ens);
  const Scalar h2 = ens.mesh.template h<Scalar>() * ens.mesh.template h<Scalar>();
  Scalar e1 = 0, e2 = 0, d = 0;
  for (Index c = 0; c < ens.mesh.cell_count(); ++c) {
    const State<Scalar> uc = ens.cesaro.col(c);
    const Scalar eb = detail::energy_from_entropy<Scalar>(uc, ens.cesaro_entropy(c), g);
    e1 += energy(uc);
    e2 += eb;
    d += energy(uc) - eb;
  }
  return {double(e1 * h2), double(e2 * h2), double(d * h2)};
}

/// S_tot = int S~, D_Ent = int S(rho~, m~, E~) - S~.
template <class Scalar>
EntropyDefect entropy_defect(const CesaroEnsemble<Scalar>& ens, const GasParams<Scalar>& g) {
  const Scalar h2 = ens.mesh.template h<Scalar>() * ens.mesh.template h<Scalar>();
  Scalar s = 0, d = 0;
  for (Index c = 0; c < ens.mesh.cell_count(); ++c) {
    const Scalar sc = entropy<Scalar>(ens.cesaro.col(c), g);
    if (!std::isfinite(double(sc))) throw InvalidState("Cesaro state outside the entropy domain", c);
    s += ens.cesaro_entropy(c);
    d += sc - ens.cesaro_entropy(c);
  }
  return {double(s * h2), double(d * h2)};
}

template <class Scalar>
DefectRow defect_row(const CesaroEnsemble<Scalar>& ens, const GasParams<Scalar>& g) {
  const auto rd = reynolds_defect(ens, g);
  const auto ed = energy_defect(ens, g);
  const auto sd = entropy_defect(ens, g);
  return {double(ens.time), rd.r1, rd.r2, rd.r, ed.e1, ed.e2, ed.d_e, sd.s_tot, sd.d_ent};
}

// ---------------------------------------------------------------------------
// Entropy production and the Dafermos order

struct TimeSeries {
  std::vector<double> t;
  std::vector<double> v;

  void push(double time, double value) {
    t.push_back(time);
    v.push_back(value);
  }
  std::size_t size() const { return t.size(); }

  /// Index of the sample at `time`, or size() when absent.
  std::size_t find(double time) const {
    for (std::size_t i = 0; i < t.size(); ++i)
      if (same_time(t[i], time)) return i;
    return t.size();
  }
};

/// Forward difference over `window` samples starting at t.
inline double entropy_production_rate(const TimeSeries& s, double t, std::size_t window = 8) {
  if (window == 0) throw std::invalid_argument("window must be positive");
  const std::size_t i = s.find(t);
  if (i == s.size() || i + window >= s.size())
    throw std::out_of_range("entropy rate window at t=" + std::to_string(t) + " leaves the series");
  return (s.v[i + window] - s.v[i]) / (s.t[i + window] - s.t[i]);
}

enum class DafermosVerdict { a_precedes_b, b_precedes_a, incomparable };

inline const char* to_string(DafermosVerdict v) {
  switch (v) {
    case DafermosVerdict::a_precedes_b: return "a_precedes_b";
    case DafermosVerdict::b_precedes_a: return "b_precedes_a";
    default: return "incomparable";
  }
}

struct DafermosResult {
  DafermosVerdict verdict = DafermosVerdict::incomparable;
  double rate_a = 0, rate_b = 0;
  bool agree_before = false;
};

/// a precedes b when both series agree (within tol) up to and including
/// t_match and b's right rate at t_match is strictly larger.
inline DafermosResult dafermos_compare(const TimeSeries& a, const TimeSeries& b, double t_match, double tol,
                                       std::size_t window = 8) {
  const std::size_t ia = a.find(t_match), ib = b.find(t_match);
  if (ia == a.size() || ib == b.size() || ia + window >= a.size() || ib + window >= b.size())
    throw std::out_of_range("series too short for the Dafermos comparison at t=" + std::to_string(t_match));
  DafermosResult res;
  res.rate_a = entropy_production_rate(a, t_match, window);
  res.rate_b = entropy_production_rate(b, t_match, window);
  res.agree_before = ia == ib;
  for (std::size_t k = 0; res.agree_before && k <= ia; ++k)
    res.agree_before = same_time(a.t[k], b.t[k]) && std::abs(a.v[k] - b.v[k]) <= tol;
  if (!res.agree_before) return res;
  if (res.rate_b > res.rate_a + tol) res.verdict = DafermosVerdict::a_precedes_b;
  else if (res.rate_a > res.rate_b + tol) res.verdict = DafermosVerdict::b_precedes_a;
  return res;
}

// ---------------------------------------------------------------------------
// Concatenation with an entropy bump

template <class Scalar = double>
struct EntropyBump {
  ConservativeField<Scalar> field;
  Scalar delta = 0;        // uniform entropy increase per cell
  Scalar energy_before = 0;
  Scalar energy_after = 0;
};

/// Keeps (rho, m) and raises the entropy of every cell by the largest
/// uniform delta whose total energy still fits the budget.
template <class Scalar>
EntropyBump<Scalar> concat_with_entropy_bump(const ConservativeField<Scalar>& field, Scalar budget,
                                             const GasParams<Scalar>& g) {
  const Scalar h2 = field.mesh.template h<Scalar>() * field.mesh.template h<Scalar>();
  const Scalar current = field.totals()(kEnergy);
  if (!(budget - current > Scalar(1e-12) * std::abs(budget)))
    throw PreconditionError("nothing to bump: energy defect is zero or negative");
  field.validate();
  const ScalarArray<Scalar> s = entropy_field(field, g);
  const Index cells = field.mesh.cell_count();
  auto energy_at = [&](Scalar delta) {
    Scalar e = 0;
    for (Index c = 0; c < cells; ++c)
      e += total_energy<Scalar>(field.cells(kDensity, c), momentum(State<Scalar>(field.cells.col(c))), s(c) + delta,
                                g);
    return e * h2;
  };
  Scalar lo = 0, hi = 1;
  int expand = 0;
  while (!(energy_at(hi) > budget)) {
    lo = hi;
    hi *= 2;
    if (++expand > 200) throw std::runtime_error("entropy bump bisection failed to bracket the budget");
  }
  while (hi - lo > Scalar(1e-12)) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (energy_at(mid) <= budget ? lo : hi) = mid;
  }
  EntropyBump<Scalar> out{field, lo, current, 0};
  for (Index c = 0; c < cells; ++c) {
    const State<Scalar> u = field.cells.col(c);
    out.field.cells(kEnergy, c) = total_energy<Scalar>(density(u), momentum(u), s(c) + lo, g);
  }
  out.energy_after = out.field.totals()(kEnergy);
  return out;
}

// ---------------------------------------------------------------------------
// Weak-form consistency residuals

/// phi(x, y) = cos(2 pi kx x) cos(2 pi ky y).
struct TestFunction {
  int kx = 0, ky = 0;

  std::string label() const { return "phi_" + std::to_string(kx) + std::to_string(ky); }
  bool is_constant() const { return kx == 0 && ky == 0; }
  bool is_nonnegative() const { return is_constant(); }

  double value(double x, double y) const {
    const double tp = 2 * std::numbers::pi;
    return std::cos(tp * kx * x) * std::cos(tp * ky * y);
  }
  Vec2<double> gradient(double x, double y) const {
    const double tp = 2 * std::numbers::pi;
    return {-tp * kx * std::sin(tp * kx * x) * std::cos(tp * ky * y),
            -tp * ky * std::cos(tp * kx * x) * std::sin(tp * ky * y)};
  }
};

inline std::vector<TestFunction> test_function_library() {
  std::vector<TestFunction> lib;
  for (int kx = 0; kx <= 2; ++kx)
    for (int ky = 0; ky <= 2; ++ky) lib.push_back({kx, ky});
  return lib;
}

struct ConsistencyResidual {
  double h = 0;
  std::string phi;
  double tau1 = 0, tau2 = 0;
  double e2 = 0;  // |continuity residual|
  double e3 = 0;  // Euclidean norm of the (phi e_x, phi e_y) momentum residuals
  double e4 = 0;  // signed entropy residual, expected >= -o(1) for phi >= 0
};

/// Streams the spatial integrals the weak forms need at every accepted step
/// so residuals over any [tau1, tau2] can be assembled afterwards.
class ConsistencyRecorder {
 public:
  struct Sample {
    double t;
    double mass, mass_flux;  // int rho phi, int m . grad phi
    Vec2<double> mom, mom_flux;  // int m phi, int (m x m / rho + p I) grad phi
    double ent, ent_flux;    // int S phi, int S m / rho . grad phi
  };

  ConsistencyRecorder(const Mesh& mesh, std::vector<TestFunction> phis) : mesh_(mesh), phis_(std::move(phis)) {
    if (mesh.bc() != Boundary::periodic)
      throw std::invalid_argument("test functions are only compatible with periodic boundaries");
    const Index cells = mesh.cell_count();
    for (const auto& phi : phis_) {
      Eigen::Matrix<double, 3, Eigen::Dynamic> tab(3, cells);
      for (Index j = 0; j < mesh.n(); ++j)
        for (Index i = 0; i < mesh.n(); ++i) {
          const auto xc = cell_center<double>(mesh, i, j);
          tab(0, mesh.index(i, j)) = phi.value(xc.x(), xc.y());
          tab.template block<2, 1>(1, mesh.index(i, j)) = phi.gradient(xc.x(), xc.y());
        }
      tables_.push_back(std::move(tab));
    }
    samples_.resize(phis_.size());
  }

  const std::vector<TestFunction>& test_functions() const { return phis_; }
  const std::vector<Sample>& samples(std::size_t k) const { return samples_.at(k); }

  void record(const ConservativeField<double>& f, const GasParams<double>& g) {
    if (!(f.mesh == mesh_)) throw std::invalid_argument("recorder mesh mismatch");
    const double h2 = mesh_.h() * mesh_.h();
    const Index cells = mesh_.cell_count();
    Eigen::Matrix<double, 5, Eigen::Dynamic> pointwise(5, cells);  // S, p, u, v, rho
    for (Index c = 0; c < cells; ++c) {
      const State<double> u = f.cells.col(c);
      pointwise(0, c) = entropy(u, g);
      pointwise(1, c) = pressure(u, g, c);
      pointwise.template block<2, 1>(2, c) = momentum(u) / density(u);
    }
    for (std::size_t k = 0; k < phis_.size(); ++k) {
      const auto& tab = tables_[k];
      Sample s{double(f.time), 0, 0, Vec2<double>::Zero(), Vec2<double>::Zero(), 0, 0};
      for (Index c = 0; c < cells; ++c) {
        const double phi = tab(0, c);
        const Vec2<double> grad = tab.template block<2, 1>(1, c);
        const State<double> u = f.cells.col(c);
        const Vec2<double> m = momentum(u);
        const Vec2<double> vel = pointwise.template block<2, 1>(2, c);
        s.mass += u(kDensity) * phi;
        s.mass_flux += m.dot(grad);
        s.mom += m * phi;
        s.mom_flux += m * vel.dot(grad) + pointwise(1, c) * grad;
        s.ent += pointwise(0, c) * phi;
        s.ent_flux += pointwise(0, c) * vel.dot(grad);
      }
      s.mass *= h2;
      s.mass_flux *= h2;
      s.mom *= h2;
      s.mom_flux *= h2;
      s.ent *= h2;
      s.ent_flux *= h2;
      samples_[k].push_back(s);
    }
  }

  /// Moment change minus the trapezoid time integral of the flux term.
  ConsistencyResidual residual(std::size_t k, double tau1, double tau2) const {
    const auto& ss = samples_.at(k);
    auto locate = [&](double tau) {
      for (std::size_t i = 0; i < ss.size(); ++i)
        if (same_time(ss[i].t, tau)) return i;
      throw std::out_of_range("tau=" + std::to_string(tau) + " is outside the recorded history");
    };
    if (!(tau1 < tau2)) throw std::invalid_argument("residual needs tau1 < tau2");
    const std::size_t a = locate(tau1), b = locate(tau2);
    double mass_int = 0, ent_int = 0;
    Vec2<double> mom_int = Vec2<double>::Zero();
    for (std::size_t i = a; i < b; ++i) {
      const double dt = ss[i + 1].t - ss[i].t;
      mass_int += 0.5 * dt * (ss[i].mass_flux + ss[i + 1].mass_flux);
      mom_int += 0.5 * dt * (ss[i].mom_flux + ss[i + 1].mom_flux);
      ent_int += 0.5 * dt * (ss[i].ent_flux + ss[i + 1].ent_flux);
    }
    ConsistencyResidual r;
    r.h = mesh_.h();
    r.phi = phis_[k].label();
    r.tau1 = tau1;
    r.tau2 = tau2;
    r.e2 = std::abs(ss[b].mass - ss[a].mass - mass_int);
    r.e3 = (ss[b].mom - ss[a].mom - mom_int).norm();
    r.e4 = ss[b].ent - ss[a].ent - ent_int;
    return r;
  }

 private:
  Mesh mesh_;
  std::vector<TestFunction> phis_;
  std::vector<Eigen::Matrix<double, 3, Eigen::Dynamic>> tables_;
  std::vector<std::vector<Sample>> samples_;
};

/// Residual of one test function over a stored time history.
inline ConsistencyResidual consistency_residual(std::span<const ConservativeField<double>> snapshots,
                                                const TestFunction& phi, double tau1, double tau2,
                                                const GasParams<double>& g) {
  if (snapshots.empty()) throw std::invalid_argument("empty snapshot history");
  ConsistencyRecorder rec(snapshots.front().mesh, {phi});
  for (const auto& s : snapshots) rec.record(s, g);
  return rec.residual(0, tau1, tau2);
}

}  // namespace vfv
