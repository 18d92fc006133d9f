// Reference implementations used only by the tests. They are written from
// the formulas directly and share no code with the library's numerics.
#pragma once

#include "vfv/grid.hpp"
#include "vfv/scheme.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace oracle {

using vfv::Index;
using S4 = std::array<double, 4>;

struct Prim {
  double rho, u, v, p;
};

inline Prim prim(const S4& q, double gamma) {
  const double u = q[1] / q[0], v = q[2] / q[0];
  return {q[0], u, v, (gamma - 1) * (q[3] - 0.5 * q[0] * (u * u + v * v))};
}

/// Euler flux through normal (nx, ny).
inline S4 euler_flux(const S4& q, double nx, double ny, double gamma) {
  const Prim w = prim(q, gamma);
  const double un = w.u * nx + w.v * ny;
  return {q[0] * un, q[1] * un + w.p * nx, q[2] * un + w.p * ny, (q[3] + w.p) * un};
}

/// Viscous upwind flux, left -> right, written out term by term.
inline S4 vfv_flux(const S4& l, const S4& r, double nx, double ny, double h, double alpha, double eps, double gamma,
                   bool as_printed) {
  const Prim a = prim(l, gamma), b = prim(r, gamma);
  const double ubar = 0.5 * (a.u + b.u), vbar = 0.5 * (a.v + b.v), pbar = 0.5 * (a.p + b.p);
  const double un = ubar * nx + vbar * ny;
  const double mu = std::pow(h, alpha - 1), nu = std::pow(h, eps);
  S4 f;
  for (int k = 0; k < 4; ++k) f[k] = 0.5 * (l[k] + r[k]) * un - (0.5 * std::abs(un) + nu) * (r[k] - l[k]);
  f[1] += pbar * nx - mu * (b.u - a.u);
  f[2] += pbar * ny - mu * (b.v - a.v);
  double work = pbar * un;
  if (as_printed) work = 0.5 * work + 0.25 * ((a.p * a.u + b.p * b.u) * nx + (a.p * a.v + b.p * b.v) * ny);
  f[3] += work - mu * ((b.u - a.u) * ubar + (b.v - a.v) * vbar);
  return f;
}

/// Cell-by-cell assembly: each cell sums its own four outward fluxes.
inline vfv::StateArray<double> brute_force_rhs(const vfv::ConservativeField<double>& f,
                                               const vfv::SchemeParams<double>& sp, double gamma) {
  const Index n = f.mesh.n();
  const double h = 1.0 / double(n);
  const bool periodic = f.mesh.bc() == vfv::Boundary::periodic;
  vfv::StateArray<double> out = vfv::StateArray<double>::Zero(4, n * n);
  auto get = [&](Index i, Index j) {
    S4 q;
    for (int k = 0; k < 4; ++k) q[k] = f.cells(k, j * n + i);
    return q;
  };
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const S4 self = get(i, j);
      for (int side = 0; side < 4; ++side) {
        const double nx = di[side], ny = dj[side];
        Index ni = i + di[side], nj = j + dj[side];
        S4 other;
        if (ni >= 0 && ni < n && nj >= 0 && nj < n) {
          other = get(ni, nj);
        } else if (periodic) {
          other = get((ni + n) % n, (nj + n) % n);
        } else {
          other = self;
          if (nx != 0) other[1] = -other[1];
          if (ny != 0) other[2] = -other[2];
        }
        const S4 fl = vfv_flux(self, other, nx, ny, h, sp.alpha, sp.eps_visc, gamma,
                               sp.pressure_work == vfv::PressureWork::as_printed);
        for (int k = 0; k < 4; ++k) out(k, j * n + i) -= fl[k] / h;
      }
    }
  return out;
}

/// min <c, x> s.t. A x = b, x >= 0, b >= 0, by the two-phase tableau
/// simplex with Bland's rule. Small dense problems only.
inline double simplex_min(std::vector<std::vector<double>> A, std::vector<double> b, const std::vector<double>& c) {
  const std::size_t m = A.size(), n = c.size();
  const double eps = 1e-13;
  // Tableau columns: n structural, m artificial, rhs.
  const std::size_t cols = n + m + 1;
  std::vector<std::vector<double>> T(m + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (b[i] < 0) {
      for (auto& a : A[i]) a = -a;
      b[i] = -b[i];
    }
    for (std::size_t j = 0; j < n; ++j) T[i][j] = A[i][j];
    T[i][n + i] = 1;
    T[i][cols - 1] = b[i];
    basis[i] = n + i;
  }
  auto pivot = [&](std::size_t r, std::size_t col) {
    const double pv = T[r][col];
    for (auto& x : T[r]) x /= pv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r || T[i][col] == 0) continue;
      const double f = T[i][col];
      for (std::size_t j = 0; j < cols; ++j) T[i][j] -= f * T[r][j];
    }
    basis[r] = col;
  };
  auto run = [&](std::size_t allowed) {
    for (int iter = 0; iter < 10000; ++iter) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < allowed; ++j)
        if (T[m][j] < -eps) {
          enter = j;
          break;
        }
      if (enter == cols) return;
      std::size_t leave = m;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i)
        if (T[i][enter] > eps) {
          const double ratio = T[i][cols - 1] / T[i][enter];
          if (ratio < best - eps || (std::abs(ratio - best) <= eps && basis[i] < basis[leave])) {
            best = ratio;
            leave = i;
          }
        }
      if (leave == m) throw std::runtime_error("unbounded LP");
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex did not terminate");
  };
  // Phase 1: minimise the sum of artificials.
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += T[i][j];
    T[m][j] = (j >= n && j < n + m) ? 0.0 : -s;
  }
  run(n + m);
  if (T[m][cols - 1] < -1e-9) throw std::runtime_error("infeasible LP");
  // Drive remaining artificials out of the basis where possible.
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n)
      for (std::size_t j = 0; j < n; ++j)
        if (std::abs(T[i][j]) > eps) {
          pivot(i, j);
          break;
        }
  // Phase 2.
  for (std::size_t j = 0; j < cols; ++j) T[m][j] = j < n ? c[j] : 0.0;
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) {
      const double f = T[m][basis[i]];
      for (std::size_t j = 0; j < cols; ++j) T[m][j] -= f * T[i][j];
    }
  run(n);
  return -T[m][cols - 1];
}

/// Optimal transport cost |x - y| between two weighted point sets.
inline double ot_brute_force(const std::vector<double>& xa, const std::vector<double>& wa,
                             const std::vector<double>& xb, const std::vector<double>& wb) {
  const std::size_t p = xa.size(), q = xb.size();
  std::vector<std::vector<double>> A;
  std::vector<double> b, c(p * q);
  for (std::size_t i = 0; i < p; ++i) {
    std::vector<double> row(p * q, 0.0);
    for (std::size_t j = 0; j < q; ++j) row[i * q + j] = 1;
    A.push_back(row);
    b.push_back(wa[i]);
  }
  for (std::size_t j = 0; j < q; ++j) {
    std::vector<double> row(p * q, 0.0);
    for (std::size_t i = 0; i < p; ++i) row[i * q + j] = 1;
    A.push_back(row);
    b.push_back(wb[j]);
  }
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < q; ++j) c[i * q + j] = std::abs(xa[i] - xb[j]);
  return simplex_min(A, b, c);
}

/// Random admissible state with density in [0.2, 4], speed up to 2 and
/// pressure in [0.2, 4].
inline vfv::State<double> random_state(std::mt19937_64& rng, double gamma = 1.4) {
  std::uniform_real_distribution<double> rho(0.2, 4.0), vel(-2.0, 2.0), p(0.2, 4.0);
  const double r = rho(rng), u = vel(rng), v = vel(rng), pr = p(rng);
  return {r, r * u, r * v, pr / (gamma - 1) + 0.5 * r * (u * u + v * v)};
}

inline vfv::ConservativeField<double> random_field(const vfv::Mesh& mesh, std::mt19937_64& rng) {
  vfv::ConservativeField<double> f(mesh, 0.0);
  for (Index c = 0; c < mesh.cell_count(); ++c) f.cells.col(c) = random_state(rng);
  return f;
}

}  // namespace oracle
