// Viscous finite-volume spatial operator, SSP-RK3 stepping and the driver loop.
#pragma once

#include "vfv/eos.hpp"
#include "vfv/grid.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace vfv {

/// How the pressure-work contribution enters the energy flux.
///  averaged:   <p><u>.n
///  as_printed: 1/2 (<p><u> + <p u>).n
enum class PressureWork { averaged, as_printed };

inline const char* to_string(PressureWork w) { return w == PressureWork::averaged ? "averaged" : "as_printed"; }

template <class Scalar = double>
struct SchemeParams {
  Scalar alpha = Scalar(1);     // momentum/energy viscosity h^(alpha-1)
  Scalar eps_visc = Scalar(2);  // flux viscosity h^eps
  Scalar cfl = Scalar(0.4);
  PressureWork pressure_work = PressureWork::averaged;

  void validate() const {
    if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
    if (!(eps_visc > 0)) throw std::invalid_argument("eps_visc must be > 0");
    if (!(cfl > 0 && cfl < 1)) throw std::invalid_argument("cfl must lie in (0, 1)");
  }
};

/// Flux per unit face length of (rho, m_x, m_y, E).
template <class Scalar>
using FaceFlux = State<Scalar>;

/// Aborts a time step: stage is 1..3, cell the worst offender.
class PositivityFailure : public std::runtime_error {
 public:
  PositivityFailure(int stage, Index cell, double time, const std::string& detail)
      : std::runtime_error("positivity failure in SSP-RK3 stage " + std::to_string(stage) + " at cell " +
                           std::to_string(cell) + " (t=" + std::to_string(time) + "): " + detail),
        stage_(stage),
        cell_(cell) {}
  int stage() const noexcept { return stage_; }
  Index cell() const noexcept { return cell_; }

 private:
  int stage_;
  Index cell_;
};

namespace detail {

template <class Scalar>
struct ViscosityFactors {
  Scalar flux;      // h^eps
  Scalar velocity;  // h^(alpha-1)
};

template <class Scalar>
ViscosityFactors<Scalar> viscosity_factors(Scalar h, const SchemeParams<Scalar>& sp) {
  using std::pow;
  return {pow(h, sp.eps_visc), pow(h, sp.alpha - Scalar(1))};
}

/// Face flux from traces with precomputed velocities and pressures.
/// Jumps are right minus left; the normal points from left to right.
template <class Scalar>
FaceFlux<Scalar> face_flux(const State<Scalar>& ul, const Vec2<Scalar>& vl, Scalar pl, const State<Scalar>& ur,
                           const Vec2<Scalar>& vr, Scalar pr, const Vec2<Scalar>& normal,
                           const ViscosityFactors<Scalar>& visc, PressureWork work) {
  using std::abs;
  const State<Scalar> jump = ur - ul;
  const State<Scalar> avg = Scalar(0.5) * (ul + ur);
  const Vec2<Scalar> vavg = Scalar(0.5) * (vl + vr);
  const Vec2<Scalar> vjump = vr - vl;
  const Scalar un = vavg.dot(normal);
  const Scalar pavg = Scalar(0.5) * (pl + pr);

  FaceFlux<Scalar> f = avg * un - (Scalar(0.5) * abs(un) + visc.flux) * jump;
  f.template segment<2>(kMomentumX) += pavg * normal - visc.velocity * vjump;
  Scalar work_term = pavg * un;
  if (work == PressureWork::as_printed) {
    const Vec2<Scalar> pv = Scalar(0.5) * (pl * vl + pr * vr);
    work_term = Scalar(0.5) * (work_term + pv.dot(normal));
  }
  f(kEnergy) += work_term - visc.velocity * vjump.dot(vavg);
  return f;
}

}  // namespace detail

/// Viscous upwind flux through a face of size h, oriented left -> right.
template <class Scalar>
FaceFlux<Scalar> upwind_flux(const State<Scalar>& left, const State<Scalar>& right, const Vec2<Scalar>& normal,
                             Scalar h, const SchemeParams<Scalar>& sp, const GasParams<Scalar>& g) {
  const Scalar pl = pressure(left, g), pr = pressure(right, g);
  const Vec2<Scalar> vl = momentum(left) / density(left);
  const Vec2<Scalar> vr = momentum(right) / density(right);
  return detail::face_flux<Scalar>(left, vl, pl, right, vr, pr, normal, detail::viscosity_factors(h, sp),
                                   sp.pressure_work);
}

/// dU/dt per cell: -(1/h) times the signed sum of the four face fluxes.
template <class Scalar>
StateArray<Scalar> vfv_rhs(const ConservativeField<Scalar>& field, const SchemeParams<Scalar>& sp,
                           const GasParams<Scalar>& g) {
  const Mesh& mesh = field.mesh;
  const Index n = mesh.n(), cells = mesh.cell_count();
  const Scalar h = mesh.h<Scalar>();
  const auto visc = detail::viscosity_factors(h, sp);

  Eigen::Matrix<Scalar, 2, Eigen::Dynamic> vel(2, cells);
  ScalarArray<Scalar> p(cells);
  for (Index c = 0; c < cells; ++c) {
    const State<Scalar> u = field.cells.col(c);
    if (!is_admissible(u)) {
      throw InvalidState("in vfv_rhs at (i,j)=(" + std::to_string(c % n) + "," + std::to_string(c / n) + ")", c);
    }
    p(c) = pressure(u, g, c);
    vel.col(c) = momentum(u) / density(u);
  }

  StateArray<Scalar> rhs = StateArray<Scalar>::Zero(4, cells);
  const Scalar inv_h = Scalar(1) / h;
  auto interior = [&](Index l, Index r, const Vec2<Scalar>& normal) {
    const FaceFlux<Scalar> f =
        detail::face_flux<Scalar>(field.cells.col(l), vel.col(l), p(l), field.cells.col(r), vel.col(r), p(r),
                                  normal, visc, sp.pressure_work);
    rhs.col(l) -= f * inv_h;
    rhs.col(r) += f * inv_h;
  };
  // Wall faces: the ghost mirrors the interior cell across the face.
  auto wall = [&](Index c, const Vec2<Scalar>& normal, bool ghost_on_right) {
    const State<Scalar> u = field.cells.col(c);
    const State<Scalar> gu = mirror_state<Scalar>(u, normal);
    const Vec2<Scalar> gv = momentum(gu) / density(gu);
    if (ghost_on_right) {
      rhs.col(c) -= detail::face_flux<Scalar>(u, vel.col(c), p(c), gu, gv, p(c), normal, visc, sp.pressure_work) *
                    inv_h;
    } else {
      rhs.col(c) += detail::face_flux<Scalar>(gu, gv, p(c), u, vel.col(c), p(c), normal, visc, sp.pressure_work) *
                    inv_h;
    }
  };

  const Vec2<Scalar> ex(1, 0), ey(0, 1);
  if (mesh.bc() == Boundary::periodic) {
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) interior(mesh.index(i, j), mesh.index((i + 1) % n, j), ex);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) interior(mesh.index(i, j), mesh.index(i, (j + 1) % n), ey);
  } else {
    for (Index j = 0; j < n; ++j) {
      wall(mesh.index(0, j), ex, false);
      for (Index i = 0; i + 1 < n; ++i) interior(mesh.index(i, j), mesh.index(i + 1, j), ex);
      wall(mesh.index(n - 1, j), ex, true);
    }
    for (Index i = 0; i < n; ++i) {
      wall(mesh.index(i, 0), ey, false);
      for (Index j = 0; j + 1 < n; ++j) interior(mesh.index(i, j), mesh.index(i, j + 1), ey);
      wall(mesh.index(i, n - 1), ey, true);
    }
  }
  return rhs;
}

/// dt = cfl * h / max(|u| + c).
template <class Scalar>
Scalar cfl_dt(const ConservativeField<Scalar>& field, const SchemeParams<Scalar>& sp, const GasParams<Scalar>& g) {
  Scalar smax = 0;
  for (Index c = 0; c < field.cells.cols(); ++c) {
    const State<Scalar> u = field.cells.col(c);
    const Scalar speed = (momentum(u) / density(u)).norm() + sound_speed(u, g, c);
    smax = std::max(smax, speed);
  }
  if (!(smax > 0)) throw InvalidState("zero signal speed in cfl_dt");
  return sp.cfl * field.mesh.template h<Scalar>() / smax;
}

/// Classic three-stage SSP-RK3 applied to an arbitrary operator L(U).
/// `check(stage, U)` runs after every stage and may throw.
template <class Array, class Op, class Check>
Array ssp_rk3_advance(const Array& u0, typename Array::Scalar dt, Op&& op, Check&& check) {
  using Scalar = typename Array::Scalar;
  Array u1 = u0 + dt * op(u0);
  check(1, u1);
  Array u2 = Scalar(0.75) * u0 + Scalar(0.25) * (u1 + dt * op(u1));
  check(2, u2);
  Array u3 = (Scalar(1) / Scalar(3)) * u0 + (Scalar(2) / Scalar(3)) * (u2 + dt * op(u2));
  check(3, u3);
  return u3;
}

template <class Scalar>
ConservativeField<Scalar> ssp_rk3_step(const ConservativeField<Scalar>& field, Scalar dt,
                                       const SchemeParams<Scalar>& sp, const GasParams<Scalar>& g) {
  if (!(dt > 0)) throw std::invalid_argument("time step must be positive");
  ConservativeField<Scalar> stage = field;
  auto op = [&](const StateArray<Scalar>& u) {
    stage.cells = u;
    return vfv_rhs(stage, sp, g);
  };
  auto check = [&](int k, const StateArray<Scalar>& u) {
    Index worst = -1;
    Scalar worst_ratio = std::numeric_limits<Scalar>::infinity();
    for (Index c = 0; c < u.cols(); ++c) {
      const State<Scalar> s = u.col(c);
      if (is_admissible(s)) continue;
      const Scalar rho_e = internal_energy_density(s);
      const Scalar ratio = density(s) > 0 && std::isfinite(double(rho_e)) ? rho_e / energy(s) : -1;
      if (!(ratio >= worst_ratio)) {
        worst_ratio = ratio;
        worst = c;
      }
    }
    if (worst >= 0) {
      const State<Scalar> s = u.col(worst);
      throw PositivityFailure(k, worst, double(field.time),
                              "rho=" + std::to_string(double(density(s))) +
                                  " rho_e=" + std::to_string(double(internal_energy_density(s))));
    }
  };
  ConservativeField<Scalar> out(field.mesh, field.time + dt);
  out.cells = ssp_rk3_advance(field.cells, dt, op, check);
  return out;
}

struct StepInfo {
  long step = 0;     // 1-based count of accepted steps in this call
  double dt = 0;
  bool at_stop = false;  // the step landed exactly on a requested stop time
};

template <class Scalar>
using StepSink = std::function<void(const ConservativeField<Scalar>&, const StepInfo&)>;

/// Advances `init` to t_end with CFL-limited SSP-RK3 steps. Steps are clipped
/// so that every stop time in (init.time, t_end] and t_end itself is hit
/// exactly. The sink sees every accepted step; exceptions propagate after the
/// sink has received all completed steps.
template <class Scalar>
ConservativeField<Scalar> run_to_time(const ConservativeField<Scalar>& init, Scalar t_end,
                                      const SchemeParams<Scalar>& sp, const GasParams<Scalar>& g,
                                      const StepSink<Scalar>& sink = {}, std::span<const Scalar> stops = {}) {
  if (t_end < init.time) throw std::invalid_argument("t_end precedes the initial time");
  ConservativeField<Scalar> u = init;
  std::size_t next = 0;
  long step = 0;
  while (u.time < t_end) {
    while (next < stops.size() && stops[next] <= u.time) ++next;
    const Scalar stop = next < stops.size() ? std::min(stops[next], t_end) : t_end;
    Scalar dt = cfl_dt(u, sp, g);
    bool land = false;
    if (u.time + dt >= stop) {
      dt = stop - u.time;
      land = true;
    }
    u = ssp_rk3_step(u, dt, sp, g);
    if (land) u.time = stop;
    ++step;
    if (sink) sink(u, StepInfo{step, double(dt), land});
  }
  return u;
}

}  // namespace vfv
